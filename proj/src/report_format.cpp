#include "steinlab/report_format.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "steinlab/errors.hpp"

namespace steinlab {

namespace {

using json = nlohmann::json;

// Fixed significant digits keep text output stable and readable.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json num_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return json::parse(num(v));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

struct Tally {
  int pass = 0, fail = 0, skipped = 0;
};

Tally tally(const std::vector<VerificationReport>& reports) {
  Tally t;
  for (const auto& r : reports)
    for (const auto& row : r.rows) {
      if (row.status == "pass") ++t.pass;
      else if (row.status == "fail") ++t.fail;
      else ++t.skipped;
    }
  return t;
}

std::string value_text(double v, const std::string& exact) { return exact.empty() ? num(v) : num(v) + " (" + exact + ")"; }

std::string to_json(const std::vector<VerificationReport>& reports, const FormatOptions& opt) {
  json out;
  out["tool"] = "steinlab";
  json exps = json::array();
  for (const auto& r : reports) {
    json e;
    e["label"] = r.label;
    e["tolerance"] = num_json(r.tolerance);
    e["seed"] = r.seed;
    e["pass"] = r.all_pass();
    json rows = json::array();
    for (const auto& row : r.rows) {
      json j;
      j["id"] = row.id;
      j["status"] = row.status;
      j["lhs"] = num_json(row.lhs);
      j["rhs"] = num_json(row.rhs);
      j["lhs_exact"] = row.lhs_exact;
      j["rhs_exact"] = row.rhs_exact;
      j["residual"] = num_json(row.residual);
      j["anchor"] = row.anchor;
      j["note"] = row.note;
      if (opt.timings) j["elapsed_s"] = num_json(row.elapsed);
      rows.push_back(j);
    }
    e["rows"] = rows;
    exps.push_back(e);
  }
  out["experiments"] = exps;
  const Tally t = tally(reports);
  out["summary"] = {{"pass", t.pass}, {"fail", t.fail}, {"skipped", t.skipped}};
  return out.dump(2) + "\n";
}

std::string to_csv(const std::vector<VerificationReport>& reports, const FormatOptions& opt) {
  std::ostringstream os;
  os << "experiment,check,status,lhs,rhs,lhs_exact,rhs_exact,residual,anchor,note";
  if (opt.timings) os << ",elapsed_s";
  os << "\n";
  for (const auto& r : reports)
    for (const auto& row : r.rows) {
      os << csv_field(r.label) << ',' << row.id << ',' << row.status << ',' << num(row.lhs) << ',' << num(row.rhs) << ','
         << csv_field(row.lhs_exact) << ',' << csv_field(row.rhs_exact) << ',' << num(row.residual) << ','
         << csv_field(row.anchor) << ',' << csv_field(row.note);
      if (opt.timings) os << ',' << num(row.elapsed);
      os << "\n";
    }
  return os.str();
}

std::string to_markdown(const std::vector<VerificationReport>& reports, const FormatOptions& opt) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << "## " << md_cell(r.label) << " (" << (r.all_pass() ? "pass" : "FAIL") << ")\n\n";
    os << "tolerance " << num(r.tolerance) << ", seed " << r.seed << "\n\n";
    os << "| check | status | lhs | rhs | residual | statement | note |";
    if (opt.timings) os << " time (s) |";
    os << "\n|---|---|---|---|---|---|---|";
    if (opt.timings) os << "---|";
    os << "\n";
    for (const auto& row : r.rows) {
      os << "| " << row.id << " | " << row.status << " | " << md_cell(value_text(row.lhs, row.lhs_exact)) << " | "
         << md_cell(value_text(row.rhs, row.rhs_exact)) << " | " << num(row.residual) << " | " << md_cell(row.anchor)
         << " | " << md_cell(row.note) << " |";
      if (opt.timings) os << ' ' << num(row.elapsed) << " |";
      os << "\n";
    }
    os << "\n";
  }
  const Tally t = tally(reports);
  os << "**" << t.pass << " passed, " << t.fail << " failed, " << t.skipped << " skipped**\n";
  return os.str();
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "md" || name == "markdown") return ReportFormat::markdown;
  throw SpecInvalid("--format: expected json, csv or md, got '" + name + "'");
}

std::string format_reports(const std::vector<VerificationReport>& reports, ReportFormat fmt, const FormatOptions& opt) {
  switch (fmt) {
    case ReportFormat::json: return to_json(reports, opt);
    case ReportFormat::csv: return to_csv(reports, opt);
    case ReportFormat::markdown: break;
  }
  return to_markdown(reports, opt);
}

}  // namespace steinlab
