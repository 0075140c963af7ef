#include "steinlab/constructions.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "steinlab/errors.hpp"

namespace steinlab {

namespace {

void add_entry(std::vector<StructEntry>& row, int k, cd c) {
  for (auto& e : row)
    if (e.k == k) {
      e.c += c;
      return;
    }
  row.push_back({k, c});
}

bool is_cyclic_table(const FiniteGroup& g) {
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b)
      if (g.table[a][b] != (a + b) % g.order) return false;
  return true;
}

}  // namespace

double ActionReport::max() const { return std::max({identity, homomorphism, multiplicative, star, unit, trace}); }

ActionReport action_residuals(const GroupAction& act) {
  const FDAlgebra& a = *act.algebra;
  const int n = a.dim;
  if (static_cast<int>(act.maps.size()) != act.group.order)
    throw ActionInvalid("action has " + std::to_string(act.maps.size()) + " maps for a group of order " +
                        std::to_string(act.group.order));
  for (const auto& u : act.maps)
    if (u.rows() != n || u.cols() != n) throw ActionInvalid("action matrix has the wrong shape");

  ActionReport r;
  r.identity = max_abs(Mat(act.of(act.group.identity) - Mat::Identity(n, n)));
  for (int g = 0; g < act.group.order; ++g) {
    const Mat& u = act.of(g);
    for (int h = 0; h < act.group.order; ++h)
      r.homomorphism = std::max(r.homomorphism, max_abs(Mat(u * act.of(h) - act.of(act.group.mul(g, h)))));
    for (int i = 0; i < n; ++i) {
      const Mat li = a.left_mult(u.col(i));
      for (int j = 0; j < n; ++j) {
        Vec p = Vec::Zero(n);
        for (const auto& e : a.product_of(i, j)) p(e.k) += e.c;
        r.multiplicative = std::max(r.multiplicative, max_abs(Vec(u * p - li * u.col(j))));
      }
    }
    r.star = std::max(r.star, max_abs(Mat(u * a.star - a.star * u.conjugate())));
    r.unit = std::max(r.unit, max_abs(Vec(u * a.unit - a.unit)));
    r.trace = std::max(r.trace, max_abs(Vec(u.transpose() * a.trace - a.trace)));
  }
  return r;
}

void validate_action(const GroupAction& act, double tol) {
  const ActionReport r = action_residuals(act);
  if (r.max() > tol) {
    std::ostringstream os;
    os << "action fails axioms: identity " << r.identity << ", homomorphism " << r.homomorphism
       << ", multiplicative " << r.multiplicative << ", star " << r.star << ", unit " << r.unit << ", trace "
       << r.trace;
    throw ActionInvalid(os.str());
  }
}

GroupAction restrict_action(const GroupAction& act, const Subgroup& sub) {
  GroupAction r;
  r.group = sub.group;
  r.algebra = act.algebra;
  for (int x : sub.elements) r.maps.push_back(act.of(x));
  return r;
}

int block_offset(const std::vector<Block>& blocks, int i) {
  int off = 0;
  for (int l = 0; l < i; ++l) off += blocks[l].n * blocks[l].n;
  return off;
}

FDAlgebra multimatrix(const std::vector<Block>& blocks, double tol) {
  if (blocks.empty()) throw ShapeMismatch("multimatrix needs at least one block");
  double total = 0.0;
  for (const auto& b : blocks) {
    if (b.n < 1) throw ShapeMismatch("block size must be positive");
    if (!(b.alpha > 0)) throw WeightsNotNormalized("block weights must be positive");
    total += b.alpha;
  }
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os << "block weights sum to " << total;
    throw WeightsNotNormalized(os.str());
  }
  const int dim = block_offset(blocks, static_cast<int>(blocks.size()));
  FDAlgebra a;
  a.dim = dim;
  a.mult.assign(static_cast<std::size_t>(dim) * dim, {});
  a.star = Mat::Zero(dim, dim);
  a.unit = Vec::Zero(dim);
  a.trace = Vec::Zero(dim);
  std::ostringstream label;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const int n = blocks[i].n, off = block_offset(blocks, static_cast<int>(i));
    auto idx = [&](int j, int k) { return off + j * n + k; };
    for (int j = 0; j < n; ++j) {
      a.unit(idx(j, j)) = 1.0;
      a.trace(idx(j, j)) = blocks[i].alpha / n;
      for (int k = 0; k < n; ++k) {
        a.star(idx(k, j), idx(j, k)) = 1.0;
        for (int m = 0; m < n; ++m) a.mult[static_cast<std::size_t>(idx(j, k)) * dim + idx(k, m)].push_back({idx(j, m), 1.0});
      }
    }
    label << (i ? "+" : "") << "M" << n << "(" << blocks[i].alpha << ")";
  }
  a.label = label.str();
  return a;
}

FDAlgebra group_algebra(const FiniteGroup& g) {
  const int n = g.order;
  FDAlgebra a;
  a.dim = n;
  a.mult.assign(static_cast<std::size_t>(n) * n, {});
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) a.mult[static_cast<std::size_t>(x) * n + y].push_back({g.mul(x, y), 1.0});
  a.star = Mat::Zero(n, n);
  for (int x = 0; x < n; ++x) a.star(g.inv(x), x) = 1.0;
  a.unit = Vec::Zero(n);
  a.unit(g.identity) = 1.0;
  a.trace = a.unit;
  a.label = "C[" + g.label + "]";
  return a;
}

FDAlgebra opposite(const FDAlgebra& a) {
  FDAlgebra o = a;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) o.mult[static_cast<std::size_t>(i) * a.dim + j] = a.product_of(j, i);
  o.label = a.label + "^op";
  return o;
}

FDAlgebra tensor(const FDAlgebra& a, const FDAlgebra& b) {
  const int n = a.dim * b.dim;
  FDAlgebra t;
  t.dim = n;
  t.mult.assign(static_cast<std::size_t>(n) * n, {});
  for (int i = 0; i < a.dim; ++i)
    for (int k = 0; k < a.dim; ++k) {
      const auto& pa = a.product_of(i, k);
      if (pa.empty()) continue;
      for (int j = 0; j < b.dim; ++j)
        for (int l = 0; l < b.dim; ++l) {
          const auto& pb = b.product_of(j, l);
          if (pb.empty()) continue;
          auto& row = t.mult[static_cast<std::size_t>(i * b.dim + j) * n + (k * b.dim + l)];
          for (const auto& ea : pa)
            for (const auto& eb : pb) add_entry(row, ea.k * b.dim + eb.k, ea.c * eb.c);
        }
    }
  t.star = kron(a.star, b.star);
  t.unit = kron(a.unit, b.unit);
  t.trace = kron(a.trace, b.trace);
  t.label = a.label + "(x)" + b.label;
  return t;
}

GroupAction trivial_action(AlgebraPtr a, const FiniteGroup& g) {
  GroupAction act;
  act.group = g;
  act.maps.assign(static_cast<std::size_t>(g.order), Mat::Identity(a->dim, a->dim));
  act.algebra = std::move(a);
  return act;
}

GroupAction block_permutation_action(AlgebraPtr a, const std::vector<Block>& blocks, const FiniteGroup& g,
                                     const std::vector<std::vector<int>>& perms) {
  const int nb = static_cast<int>(blocks.size());
  if (block_offset(blocks, nb) != a->dim) throw ActionInvalid("block layout does not match the algebra");
  if (static_cast<int>(perms.size()) != g.order) throw ActionInvalid("need one block permutation per element");
  GroupAction act;
  act.group = g;
  for (int x = 0; x < g.order; ++x) {
    if (static_cast<int>(perms[x].size()) != nb) throw ActionInvalid("block permutation has the wrong length");
    Mat u = Mat::Zero(a->dim, a->dim);
    for (int i = 0; i < nb; ++i) {
      const int t = perms[x][i];
      if (t < 0 || t >= nb || blocks[t].n != blocks[i].n)
        throw ActionInvalid("block permutation must map blocks to blocks of the same size");
      const int n = blocks[i].n, src = block_offset(blocks, i), dst = block_offset(blocks, t);
      for (int j = 0; j < n * n; ++j) u(dst + j, src + j) = 1.0;
    }
    act.maps.push_back(u);
  }
  act.algebra = std::move(a);
  validate_action(act);
  return act;
}

GroupAction flip_action(AlgebraPtr a, const std::vector<Block>& blocks, const FiniteGroup& g) {
  if (blocks.size() != 2) throw ActionInvalid("flip needs exactly two blocks");
  if (g.parity.empty()) throw ActionInvalid("group " + g.label + " has no homomorphism to Z/2 for the flip");
  std::vector<std::vector<int>> perms;
  for (int x = 0; x < g.order; ++x) perms.push_back(g.parity[x] ? std::vector<int>{1, 0} : std::vector<int>{0, 1});
  return block_permutation_action(std::move(a), blocks, g, perms);
}

GroupAction regular_block_action(AlgebraPtr a, const std::vector<Block>& blocks, const FiniteGroup& g) {
  if (static_cast<int>(blocks.size()) != g.order) throw ActionInvalid("regular action needs |G| blocks");
  return block_permutation_action(std::move(a), blocks, g, g.table);
}

GroupAction ad_action(AlgebraPtr a, const FiniteGroup& g, const Vec& u) {
  if (!is_cyclic_table(g)) throw ActionInvalid("Ad action expects the standard cyclic group table");
  if (u.size() != a->dim) throw ActionInvalid("unitary has the wrong length");
  GroupAction act;
  act.group = g;
  Vec power = a->unit;
  for (int k = 0; k < g.order; ++k) {
    act.maps.push_back(a->left_mult(power) * a->right_mult(star(*a, power)));
    power = multiply(*a, power, u);
  }
  act.algebra = std::move(a);
  validate_action(act);
  return act;
}

GroupAction fourier_action(AlgebraPtr a, const FiniteGroup& g) {
  if (!is_cyclic_table(g)) throw ActionInvalid("Fourier action expects the standard cyclic group table");
  if (a->dim != g.order) throw ActionInvalid("Fourier action expects C[Z/n] with n = |G|");
  GroupAction act;
  act.group = g;
  const int n = g.order;
  for (int k = 0; k < n; ++k) {
    Mat u = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) u(j, j) = std::polar(1.0, 2.0 * M_PI * ((k * j) % n) / n);
    act.maps.push_back(u);
  }
  act.algebra = std::move(a);
  validate_action(act);
  return act;
}

GroupAction matrix_action(AlgebraPtr a, const FiniteGroup& g, std::vector<Mat> maps, double tol) {
  GroupAction act;
  act.group = g;
  act.algebra = std::move(a);
  act.maps = std::move(maps);
  validate_action(act, tol);
  return act;
}

std::vector<Character> characters(const FiniteGroup& g, std::uint64_t seed) {
  if (!g.is_abelian()) throw NotAbelian("group " + g.label + " is not abelian");
  const int n = g.order;
  std::vector<Mat> reg;
  for (int x = 0; x < n; ++x) {
    Mat l = Mat::Zero(n, n);
    for (int y = 0; y < n; ++y) l(g.mul(x, y), y) = 1.0;
    reg.push_back(l);
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < 20; ++attempt) {
    Mat m = Mat::Zero(n, n);
    for (int x = 0; x < n; ++x) m += rng.complex_normal() * reg[x];
    Eigen::ComplexEigenSolver<Mat> es(m);
    // exponent k with chi(x) = exp(2 pi i k / n), one vector per eigenvector
    std::vector<std::vector<int>> found;
    bool ok = true;
    for (int c = 0; c < n && ok; ++c) {
      const Vec v = es.eigenvectors().col(c);
      Eigen::Index piv = 0;
      v.cwiseAbs().maxCoeff(&piv);
      std::vector<int> ks(static_cast<std::size_t>(n));
      for (int x = 0; x < n && ok; ++x) {
        const cd val = (reg[x] * v)(piv) / v(piv);
        const double turns = std::arg(val) / (2.0 * M_PI) * n;
        const long long k = std::llround(turns);
        if (std::abs(std::abs(val) - 1.0) > 1e-6 || std::abs(turns - static_cast<double>(k)) > 1e-6) ok = false;
        ks[x] = static_cast<int>(((k % n) + n) % n);
      }
      for (int x = 0; x < n && ok; ++x)
        for (int y = 0; y < n && ok; ++y)
          if ((ks[x] + ks[y]) % n != ks[g.mul(x, y)]) ok = false;
      if (ok) found.push_back(ks);
    }
    if (!ok) continue;
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    if (static_cast<int>(found.size()) != n) continue;
    std::vector<Character> out;
    for (const auto& ks : found) {
      Character ch;
      ch.values = Vec(n);
      for (int x = 0; x < n; ++x) ch.values(x) = std::polar(1.0, 2.0 * M_PI * ks[x] / n);
      out.push_back(ch);
    }
    return out;  // sorted exponent tuples put the trivial character first
  }
  throw NotAbelian("could not split the regular representation of " + g.label);
}

Mat character_gram(const FiniteGroup& g, const std::vector<Character>& chars) {
  const auto m = static_cast<Eigen::Index>(chars.size());
  Mat out(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) out(a, b) = chars[a].values.dot(chars[b].values) / double(g.order);
  return out;  // entry (a,b) = (1/|G|) sum conj(chi_a) chi_b
}

std::vector<ScaledVector> scaled_generating_set(const std::vector<Vec>& x, const GroupAction& act,
                                                std::uint64_t seed) {
  const auto chars = characters(act.group, seed);
  const Mat gm = gram(*act.algebra);
  std::vector<ScaledVector> out;
  for (const auto& v : x) {
    for (std::size_t c = 0; c < chars.size(); ++c) {
      Vec y = Vec::Zero(act.algebra->dim);
      for (int g = 0; g < act.group.order; ++g) y += std::conj(chars[c].values(g)) * (act.of(g) * v);
      y /= double(act.group.order);
      const double nrm = std::sqrt(std::max(0.0, (y.adjoint() * gm * y)(0).real()));
      if (nrm < 1e-10) continue;
      out.push_back({y, static_cast<int>(c)});
    }
  }
  return out;
}

double scaling_residual(const std::vector<ScaledVector>& y, const GroupAction& act, std::uint64_t seed) {
  const auto chars = characters(act.group, seed);
  double r = 0.0;
  for (const auto& s : y)
    for (int h = 0; h < act.group.order; ++h)
      r = std::max(r, max_abs(Vec(act.of(h) * s.vector - chars[s.character].values(h) * s.vector)));
  return r;
}

Mat subalgebra_generate(const FDAlgebra& ambient, const std::vector<Vec>& s, bool star_closed) {
  const Mat gm = gram(ambient);
  Mat start(ambient.dim, 0);
  auto append = [](Mat& m, const Vec& v) {
    m.conservativeResize(Eigen::NoChange, m.cols() + 1);
    m.col(m.cols() - 1) = v;
  };
  append(start, ambient.unit);
  for (const auto& v : s) {
    if (v.size() != ambient.dim) throw ShapeMismatch("generator has the wrong length");
    append(start, v);
    if (star_closed) append(start, star(ambient, v));
  }
  Mat q = gram_orthonormalize(start, gm);
  Eigen::Index fresh_from = 0;
  while (true) {
    Mat cand(ambient.dim, 0);
    for (Eigen::Index a = 0; a < q.cols(); ++a) {
      const Mat la = ambient.left_mult(q.col(a));
      // products involving at least one column added in the last round
      const Eigen::Index b0 = a >= fresh_from ? 0 : fresh_from;
      for (Eigen::Index b = b0; b < q.cols(); ++b) append(cand, la * q.col(b));
    }
    if (cand.cols() == 0) break;
    Mat all(ambient.dim, q.cols() + cand.cols());
    all << q, cand;
    Mat grown = gram_orthonormalize(all, gm);
    if (grown.cols() == q.cols()) break;
    fresh_from = q.cols();
    q = grown;
    if (star_closed) {
      // products of star-closed sets stay star-closed up to span, but re-add stars for safety
      Mat st(ambient.dim, q.cols());
      for (Eigen::Index a = 0; a < q.cols(); ++a) st.col(a) = star(ambient, q.col(a));
      Mat both(ambient.dim, 2 * q.cols());
      both << q, st;
      q = gram_orthonormalize(both, gm);
    }
  }
  return q;
}

bool same_subspace(const FDAlgebra& ambient, const Mat& a, const Mat& b, double tol) {
  const Mat gm = gram(ambient);
  const Mat qa = gram_orthonormalize(a, gm), qb = gram_orthonormalize(b, gm);
  if (qa.cols() != qb.cols()) return false;
  const Mat ra = qb - qa * (qa.adjoint() * gm * qb);
  const Mat rb = qa - qb * (qb.adjoint() * gm * qa);
  return max_abs(ra) <= tol && max_abs(rb) <= tol;
}

std::vector<Vec> orbit(const std::vector<Vec>& s, const GroupAction& act) {
  std::vector<Vec> out;
  for (const auto& v : s)
    for (int g = 0; g < act.group.order; ++g) out.push_back(act.of(g) * v);
  return out;
}

}  // namespace steinlab
