#include "steinlab/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "steinlab/errors.hpp"

namespace steinlab {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw SpecInvalid(where + ": " + what); }

cd read_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(where, "expected a number or [re, im]");
}

Vec read_vector(const json& j, int n, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  if (n >= 0 && static_cast<int>(j.size()) != n)
    fail(where, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = read_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Mat read_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) fail(where, "expected " + std::to_string(n) + " rows");
  Mat m(n, n);
  for (int r = 0; r < n; ++r) m.row(r) = read_vector(j[r], n, where + "[" + std::to_string(r) + "]").transpose();
  return m;
}

int read_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::vector<Block> read_blocks(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty list of [n, alpha]");
  std::vector<Block> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2 || !j[i][1].is_number()) fail(w, "expected [n, alpha]");
    const int n = read_int(j[i][0], w + "[0]");
    if (n < 1) fail(w, "block size must be positive");
    out.push_back({n, j[i][1].get<double>()});
  }
  return out;
}

FiniteGroup read_group(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return named_group(j.get<std::string>());
    if (!j.is_object()) fail(where, "expected a group name or {order, table}");
    if (j.contains("name")) return named_group(j["name"].get<std::string>());
    if (!j.contains("table")) fail(where, "missing 'table'");
    const json& t = j["table"];
    if (!t.is_array()) fail(where + ".table", "expected an array");
    std::vector<std::vector<int>> table;
    for (std::size_t r = 0; r < t.size(); ++r) {
      std::vector<int> row;
      if (!t[r].is_array()) fail(where + ".table[" + std::to_string(r) + "]", "expected an array");
      for (std::size_t c = 0; c < t[r].size(); ++c)
        row.push_back(read_int(t[r][c], where + ".table[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
      table.push_back(std::move(row));
    }
    if (j.contains("order") && read_int(j["order"], where + ".order") != static_cast<int>(table.size()))
      fail(where + ".order", "does not match the table size");
    FiniteGroup g = make_group(std::move(table), j.value("label", std::string("G")));
    if (j.contains("parity")) {
      const json& p = j["parity"];
      if (!p.is_array() || static_cast<int>(p.size()) != g.order) fail(where + ".parity", "expected one entry per element");
      for (std::size_t i = 0; i < p.size(); ++i) g.parity.push_back(read_int(p[i], where + ".parity") & 1);
      for (int a = 0; a < g.order; ++a)
        for (int b = 0; b < g.order; ++b)
          if (g.parity[g.mul(a, b)] != (g.parity[a] ^ g.parity[b])) fail(where + ".parity", "not a homomorphism to Z/2");
    }
    return g;
  } catch (const SpecInvalid&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  } catch (const json::exception& e) {
    fail(where, e.what());
  }
}

LoadedAlgebra read_algebra(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  LoadedAlgebra out;
  try {
    if (j.contains("multimatrix")) {
      const json& m = j["multimatrix"];
      const json& b = m.is_object() && m.contains("blocks") ? m["blocks"] : m;
      out.blocks = read_blocks(b, where + ".multimatrix.blocks");
      FDAlgebra a = multimatrix(*out.blocks);
      if (j.contains("label")) a.label = j["label"].get<std::string>();
      out.algebra = std::make_shared<const FDAlgebra>(std::move(a));
      return out;
    }
    if (j.contains("group_algebra")) {
      out.group = read_group(j["group_algebra"], where + ".group_algebra");
      FDAlgebra a = group_algebra(*out.group);
      if (j.contains("label")) a.label = j["label"].get<std::string>();
      out.algebra = std::make_shared<const FDAlgebra>(std::move(a));
      return out;
    }
    for (const char* key : {"dim", "mult", "star", "unit", "trace"})
      if (!j.contains(key)) fail(where, std::string("missing '") + key + "'");
    const int n = read_int(j["dim"], where + ".dim");
    if (n < 1) fail(where + ".dim", "must be positive");
    const json& mult = j["mult"];
    if (!mult.is_array() || static_cast<int>(mult.size()) != n) fail(where + ".mult", "expected dim x dim x dim entries");
    std::vector<std::vector<std::vector<cd>>> c(n, std::vector<std::vector<cd>>(n, std::vector<cd>(n)));
    for (int a = 0; a < n; ++a) {
      const std::string wa = where + ".mult[" + std::to_string(a) + "]";
      if (!mult[a].is_array() || static_cast<int>(mult[a].size()) != n) fail(wa, "expected dim rows");
      for (int b = 0; b < n; ++b) {
        const Vec v = read_vector(mult[a][b], n, wa + "[" + std::to_string(b) + "]");
        for (int k = 0; k < n; ++k) c[a][b][k] = v(k);
      }
    }
    const Mat s = read_matrix(j["star"], n, where + ".star");
    const Vec unit = read_vector(j["unit"], n, where + ".unit");
    const Vec trace = read_vector(j["trace"], n, where + ".trace");
    out.algebra = std::make_shared<const FDAlgebra>(
        algebra_from_dense(n, c, s, unit, trace, j.value("label", std::string("A"))));
    return out;
  } catch (const SpecInvalid&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  } catch (const json::exception& e) {
    fail(where, e.what());
  }
}

GroupAction read_action(const json& j, const LoadedAlgebra& alg, const FiniteGroup& g, const std::string& where) {
  try {
    std::string kind;
    if (j.is_string()) kind = j.get<std::string>();
    else if (j.is_object() && j.contains("type")) kind = j["type"].get<std::string>();
    else if (j.is_object() && j.contains("ad")) kind = "ad";
    else if (j.is_object() && j.contains("matrices")) kind = "matrices";
    else if (j.is_object() && j.contains("permutation")) kind = "permutation";
    else fail(where, "unrecognized action");

    auto need_blocks = [&]() -> const std::vector<Block>& {
      if (!alg.blocks) fail(where, "'" + kind + "' requires a multimatrix algebra");
      return *alg.blocks;
    };
    if (kind == "trivial") return trivial_action(alg.algebra, g);
    if (kind == "flip") return flip_action(alg.algebra, need_blocks(), g);
    if (kind == "regular") return regular_block_action(alg.algebra, need_blocks(), g);
    if (kind == "fourier") return fourier_action(alg.algebra, g);
    if (kind == "ad") return ad_action(alg.algebra, g, read_vector(j["ad"], alg.algebra->dim, where + ".ad"));
    if (kind == "permutation") {
      const json& p = j["permutation"];
      if (!p.is_array() || static_cast<int>(p.size()) != g.order) fail(where + ".permutation", "expected one row per element");
      std::vector<std::vector<int>> perms;
      for (std::size_t e = 0; e < p.size(); ++e) {
        std::vector<int> row;
        for (std::size_t i = 0; i < p[e].size(); ++i) row.push_back(read_int(p[e][i], where + ".permutation"));
        perms.push_back(std::move(row));
      }
      return block_permutation_action(alg.algebra, need_blocks(), g, perms);
    }
    if (kind == "matrices") {
      const json& m = j["matrices"];
      if (!m.is_array() || static_cast<int>(m.size()) != g.order)
        fail(where + ".matrices", "expected " + std::to_string(g.order) + " matrices, one per group element");
      std::vector<Mat> maps;
      for (std::size_t e = 0; e < m.size(); ++e)
        maps.push_back(read_matrix(m[e], alg.algebra->dim, where + ".matrices[" + std::to_string(e) + "]"));
      // structure is validated later by the runner so that failures become report rows
      GroupAction act;
      act.group = g;
      act.algebra = alg.algebra;
      act.maps = std::move(maps);
      return act;
    }
    fail(where, "unknown action type '" + kind + "'");
  } catch (const SpecInvalid&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  } catch (const json::exception& e) {
    fail(where, e.what());
  }
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("malformed JSON: ") + e.what());
  }
}

json complex_json(cd z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecInvalid(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedAlgebra parse_algebra(const std::string& json_text, const std::string& origin) {
  const json j = parse_json(json_text, origin);
  return read_algebra(j.contains("algebra") ? j["algebra"] : j, origin);
}

LoadedAlgebra load_algebra(const std::string& path) { return parse_algebra(read_file(path), path); }

ExperimentSpec parse_spec(const std::string& json_text, const std::string& origin) {
  const json j = parse_json(json_text, origin);
  if (!j.is_object()) fail(origin, "expected an object");
  ExperimentSpec s;
  s.label = j.value("label", std::string());
  if (!j.contains("algebra")) fail(origin, "missing 'algebra'");
  const LoadedAlgebra alg = read_algebra(j["algebra"], origin + ".algebra");
  s.algebra = alg.algebra;
  s.blocks = alg.blocks;
  s.algebra_group = alg.group;
  if (s.label.empty()) s.label = s.algebra->label;
  if (j.contains("group")) s.group = read_group(j["group"], origin + ".group");
  if (j.contains("action")) {
    if (!s.group) fail(origin + ".action", "an action needs a 'group'");
    s.action = read_action(j["action"], alg, *s.group, origin + ".action");
  }
  if (j.contains("subgroup")) {
    const json& sub = j["subgroup"];
    if (!sub.is_array()) fail(origin + ".subgroup", "expected a list of element indices");
    std::vector<int> elems;
    for (const auto& e : sub) elems.push_back(read_int(e, origin + ".subgroup"));
    s.subgroup = elems;
  }
  if (j.contains("checks")) {
    const json& c = j["checks"];
    if (c.is_string()) s.checks = {c.get<std::string>()};
    else if (c.is_array()) {
      s.checks.clear();
      for (const auto& e : c) {
        if (!e.is_string()) fail(origin + ".checks", "expected strings");
        s.checks.push_back(e.get<std::string>());
      }
    } else fail(origin + ".checks", "expected a list of check ids");
  }
  if (j.contains("tolerance")) {
    if (!j["tolerance"].is_number() || !(j["tolerance"].get<double>() > 0)) fail(origin + ".tolerance", "expected a positive number");
    s.tolerance = j["tolerance"].get<double>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail(origin + ".seed", "expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  try {
    check_spec(s);
  } catch (const SpecInvalid& e) {
    throw SpecInvalid(origin + "." + std::string(e.what()).substr(std::string("SpecInvalid: ").size()));
  }
  return s;
}

ExperimentSpec load_spec(const std::string& path) { return parse_spec(read_file(path), path); }

std::string algebra_to_json(const FDAlgebra& a) {
  json j;
  j["dim"] = a.dim;
  j["label"] = a.label;
  json mult = json::array();
  for (int i = 0; i < a.dim; ++i) {
    json row = json::array();
    for (int k = 0; k < a.dim; ++k) {
      Vec v = Vec::Zero(a.dim);
      for (const auto& e : a.product_of(i, k)) v(e.k) += e.c;
      json entry = json::array();
      for (int m = 0; m < a.dim; ++m) entry.push_back(complex_json(v(m)));
      row.push_back(entry);
    }
    mult.push_back(row);
  }
  j["mult"] = mult;
  json star = json::array();
  for (int r = 0; r < a.dim; ++r) {
    json row = json::array();
    for (int c = 0; c < a.dim; ++c) row.push_back(complex_json(a.star(r, c)));
    star.push_back(row);
  }
  j["star"] = star;
  json unit = json::array(), trace = json::array();
  for (int i = 0; i < a.dim; ++i) {
    unit.push_back(complex_json(a.unit(i)));
    trace.push_back(complex_json(a.trace(i)));
  }
  j["unit"] = unit;
  j["trace"] = trace;
  return j.dump(2);
}

}  // namespace steinlab
