#include "steinlab/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "steinlab/crossed.hpp"
#include "steinlab/decompose.hpp"
#include "steinlab/derivations.hpp"
#include "steinlab/errors.hpp"
#include "steinlab/vndim.hpp"

namespace steinlab {

namespace {

constexpr long long kQmax = 10000;

struct Skip {
  std::string why;
};

std::string exact(double v) { return rationalize(v, kQmax, 1e-6).str(); }

Vec random_unit(Eigen::Index n, Rng& rng) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
  const double norm = v.norm();
  return norm > 0 ? Vec(v / norm) : v;
}

// Linear combination sum_i c_i d_i of a space's basis, without materializing every element.
Derivation combo(const DerivationSpace& s, const Vec& c) {
  const int n = s.algebra->dim;
  Derivation d;
  d.matrix = Mat::Zero(static_cast<Eigen::Index>(n) * n, n);
  Eigen::Index off = 0;
  for (const auto& b : s.blocks) {
    const auto m = b.coeffs.cols();
    if (m == 0) continue;
    const int r = s.block_rank(b);
    const Mat f = s.frame(b);
    const Vec y = b.coeffs * c.segment(off, m);
    for (int k = 0; k < n; ++k) d.matrix.col(k) += f * y.segment(static_cast<Eigen::Index>(k) * r, r);
    off += m;
  }
  return d;
}

Derivation random_derivation(const DerivationSpace& s, Rng& rng) { return combo(s, random_unit(s.size(), rng)); }

double weight_sum(const std::vector<Block>& blocks) {
  double s = 0.0;
  for (const auto& b : blocks) s += b.alpha * b.alpha / (static_cast<double>(b.n) * b.n);
  return s;
}

bool trivial_maps(const GroupAction& act) {
  for (const auto& m : act.maps)
    if (max_abs(Mat(m - Mat::Identity(m.rows(), m.cols()))) > 0) return false;
  return true;
}

// Lazily computed objects shared between checks.
class Lab {
 public:
  Lab(const ExperimentSpec& spec, double tol, std::uint64_t seed) : rng(seed), spec_(spec), tol_(tol), seed_(seed) {}

  const ExperimentSpec& spec() const { return spec_; }
  double tol() const { return tol_; }
  double residual_tol() const { return tol_ / 10.0; }
  std::uint64_t seed() const { return seed_; }
  const FDAlgebra& a() const { return *spec_.algebra; }
  AlgebraPtr a_ptr() const { return spec_.algebra; }

  VnOptions vn() const {
    VnOptions o;
    o.tol = tol_;
    o.seed = seed_;
    o.qmax = kQmax;
    return o;
  }

  const GroupAction& action() const {
    if (!spec_.action) throw Skip{"no group action given"};
    return *spec_.action;
  }
  const FiniteGroup& group() const { return action().group; }
  const FiniteGroup& any_group() const {
    if (spec_.group) return *spec_.group;
    if (spec_.algebra_group) return *spec_.algebra_group;
    throw Skip{"no group given"};
  }
  void require_abelian() const {
    if (!group().is_abelian()) throw Skip{"group is not abelian; characters are undefined"};
  }

  const std::vector<Vec>& gens() {
    if (gens_.empty()) gens_ = hermitian_generators(a(), seed_);
    return gens_;
  }

  const std::vector<Block>& blocks() {
    if (!blocks_) blocks_ = spec_.blocks ? *spec_.blocks : multimatrix_decompose(a(), seed_);
    return *blocks_;
  }

  AlgebraPtr n0() {
    if (!n0_) n0_ = std::make_shared<const FDAlgebra>(tensor(a(), opposite(a())));
    return n0_;
  }

  const DerivationSpace& der_a() {
    if (!der_a_) {
      SolveOptions o;
      o.seed = seed_;
      der_a_ = derivation_space(spec_.algebra, o);
    }
    return *der_a_;
  }
  const DerivationSpace& inn_a() {
    if (!inn_a_) {
      SolveOptions o;
      o.seed = seed_;
      o.frames = der_a().frames;
      inn_a_ = inner_derivations(spec_.algebra, o);
    }
    return *inn_a_;
  }
  double dim_der_a() {
    if (!dim_der_a_) dim_der_a_ = vn_dimension(phi_x(der_a(), gens()), vn()).value;
    return *dim_der_a_;
  }
  double dim_inn_a() {
    if (!dim_inn_a_) dim_inn_a_ = vn_dimension(phi_x(inn_a(), gens()), vn()).value;
    return *dim_inn_a_;
  }

  const CrossedContext& cp() {
    if (!cp_) cp_ = make_crossed(action(), residual_tol());
    return *cp_;
  }
  const std::vector<Vec>& y() {
    if (y_.empty()) y_ = crossed_generators(cp(), gens());
    return y_;
  }
  const Mat& big_gram() {
    if (big_gram_.size() == 0) big_gram_ = gram(*cp().big);
    return big_gram_;
  }
  const DerivationSpace& der_cp() {
    if (!der_cp_) {
      SolveOptions o;
      o.seed = seed_;
      der_cp_ = derivation_space(cp().product, o);
    }
    return *der_cp_;
  }
  const DerivationSpace& inn_cp() {
    if (!inn_cp_) {
      SolveOptions o;
      o.seed = seed_;
      o.frames = der_cp().frames;
      inn_cp_ = inner_derivations(cp().product, o);
    }
    return *inn_cp_;
  }
  double dim_der_cp() {
    if (!dim_der_cp_) dim_der_cp_ = vn_dimension(phi_x(der_cp(), hermitian_generators(*cp().product, seed_)), vn()).value;
    return *dim_der_cp_;
  }
  double dim_inn_cp() {
    if (!dim_inn_cp_) dim_inn_cp_ = vn_dimension(phi_x(inn_cp(), hermitian_generators(*cp().product, seed_)), vn()).value;
    return *dim_inn_cp_;
  }
  const DerivationSpace& vanishing() {
    if (!vanishing_) vanishing_ = relative_derivations(der_cp(), group_basis(cp()), tol_);
    return *vanishing_;
  }
  const CosetResiduals& cosets() {
    if (!cosets_) cosets_ = coset_residuals(cp());
    return *cosets_;
  }

  Rng rng;

 private:
  const ExperimentSpec& spec_;
  double tol_;
  std::uint64_t seed_;
  std::vector<Vec> gens_, y_;
  std::optional<std::vector<Block>> blocks_;
  AlgebraPtr n0_;
  std::optional<DerivationSpace> der_a_, inn_a_, der_cp_, inn_cp_, vanishing_;
  std::optional<double> dim_der_a_, dim_inn_a_, dim_der_cp_, dim_inn_cp_;
  std::optional<CrossedContext> cp_;
  std::optional<CosetResiduals> cosets_;
  Mat big_gram_;
};

void set_values(CheckRow& row, double lhs, double rhs) {
  row.lhs = lhs;
  row.rhs = rhs;
  row.residual = std::abs(lhs - rhs);
  row.lhs_exact = exact(lhs);
  row.rhs_exact = exact(rhs);
}

// ---- stage 0 ----

void check_validate_algebra(Lab& lab, CheckRow& row) {
  const ValidationReport rep = validate(lab.a(), lab.residual_tol());
  double worst = 0.0;
  for (const auto& [k, v] : rep.residuals) worst = std::max(worst, v);
  row.residual = worst;
  row.lhs = rep.min_gram_eigenvalue;
  row.rhs = lab.residual_tol();
  for (const auto& f : rep.failures) row.note += (row.note.empty() ? "" : "; ") + f;
  if (!rep.pass) row.status = "fail";
}

void check_validate_action(Lab& lab, CheckRow& row) {
  const ActionReport r = action_residuals(lab.action());
  row.residual = r.max();
  if (r.max() > lab.residual_tol()) row.status = "fail";
  row.lhs = static_cast<double>(lab.group().order);
  row.rhs = static_cast<double>(lab.action().maps.size());
}

// ---- stage 1 ----

void check_crossed_structure(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const ValidationReport rep = validate(*c.product, lab.residual_tol());
  double worst = 0.0;
  for (const auto& [k, v] : rep.residuals) worst = std::max(worst, v);
  const auto blocks = multimatrix_decompose(*c.product, lab.seed());
  double alpha = 0.0;
  int squares = 0;
  for (const auto& b : blocks) {
    alpha += b.alpha;
    squares += b.n * b.n;
  }
  row.lhs = squares;
  row.rhs = c.dim_cp();
  row.lhs_exact = std::to_string(squares);
  row.rhs_exact = std::to_string(c.dim_cp());
  row.residual = std::max({worst, std::abs(alpha - 1.0), std::abs(row.lhs - row.rhs)});
  if (!rep.pass) row.residual = std::max(row.residual, 1.0);
  if (trivial_maps(lab.action())) {
    // b_i u_g at g*n+i against b_i (x) u_g at i*|G|+g
    const FDAlgebra t = tensor(lab.a(), group_algebra(lab.group()));
    const int n = lab.a().dim, order = lab.group().order;
    auto to_tensor = [&](int k) { return (k % n) * order + k / n; };
    double diff = 0.0;
    for (int p = 0; p < c.dim_cp(); ++p)
      for (int q = 0; q < c.dim_cp(); ++q) {
        Vec x = Vec::Zero(c.dim_cp()), y = Vec::Zero(c.dim_cp());
        for (const auto& e : c.product->product_of(p, q)) x(to_tensor(e.k)) += e.c;
        for (const auto& e : t.product_of(to_tensor(p), to_tensor(q))) y(e.k) += e.c;
        diff = std::max(diff, max_abs(Vec(x - y)));
      }
    row.residual = std::max(row.residual, diff);
    row.note = "trivial action: structure constants compared with A (x) C[G]";
  }
}

void check_scaled_generating_set(Lab& lab, CheckRow& row) {
  lab.require_abelian();
  const auto scaled = scaled_generating_set(lab.gens(), lab.action(), lab.seed());
  std::vector<Vec> ys;
  for (const auto& s : scaled) ys.push_back(s.vector);
  const double scale = scaling_residual(scaled, lab.action(), lab.seed());
  const Mat generated = subalgebra_generate(lab.a(), ys);
  const Mat orbit_alg = subalgebra_generate(lab.a(), orbit(lab.gens(), lab.action()));
  const bool same = same_subspace(lab.a(), generated, orbit_alg, lab.tol());
  row.lhs = static_cast<double>(generated.cols());
  row.rhs = static_cast<double>(orbit_alg.cols());
  row.lhs_exact = std::to_string(generated.cols());
  row.rhs_exact = std::to_string(orbit_alg.cols());
  row.residual = scale;
  row.note = std::to_string(ys.size()) + " scaled vectors";
  if (!same) row.note += "; generated subalgebras differ";
  // scaling equations are held to the residual tolerance
  if (!same || scale > lab.residual_tol()) row.status = "fail";
}

void check_central_projection(Lab& lab, CheckRow& row) {
  const FDAlgebra& a = lab.a();
  const AlgebraPtr n = lab.n0();
  const MatrixUnits units = matrix_units(a, lab.seed());
  const Mat p = unit_central_projection(a, *n, units, lab.residual_tol());
  const Mat c = central_vectors(a, *n, lab.gens());
  const Mat pc = c * (c.adjoint() * gram(*n));
  const double op = max_abs(Mat(p - pc));
  const double tp = trace(*n, unit_central_element(a, units)).real();
  set_values(row, tp, weight_sum(lab.blocks()));
  row.residual = std::max(row.residual, op);
  row.note = "operator residual " + std::to_string(op);
}

void check_group_central_family(Lab& lab, CheckRow& row) {
  const FiniteGroup& g = lab.any_group();
  const auto cg = std::make_shared<const FDAlgebra>(group_algebra(g));
  const auto n = std::make_shared<const FDAlgebra>(tensor(*cg, opposite(*cg)));
  const int order = g.order;
  Mat f = Mat::Zero(n->dim, order);
  for (int h = 0; h < order; ++h)
    for (int k = 0; k < order; ++k) f(g.mul(k, h) * order + g.inv(k), h) = 1.0 / std::sqrt(double(order));
  const Mat gn = gram(*n);
  double res = max_abs(Mat(f.adjoint() * gn * f - Mat::Identity(order, order)));
  for (int k = 0; k < order; ++k)
    for (int h = 0; h < order; ++h)
      res = std::max(res, max_abs(commutator_with(*cg, cg->basis(k), f.col(h))));
  const Mat c = central_vectors(*cg, *n, basis_set(*cg));
  if (c.cols() != order) res = std::max(res, 1.0);
  res = std::max(res, max_abs(Mat(f - c * (c.adjoint() * gn * f))));
  const double dim = vn_dimension(from_vectors(n, 1, f, tensor_generators(*cg, basis_set(*cg))), lab.vn()).value;
  set_values(row, dim, 1.0 / order);
  row.residual = std::max(row.residual, res);
}

// ---- stage 2 ----

void check_inner_equals_der(Lab& lab, CheckRow& row) {
  row.lhs = lab.der_a().size();
  row.rhs = lab.inn_a().size();
  row.lhs_exact = std::to_string(lab.der_a().size());
  row.rhs_exact = std::to_string(lab.inn_a().size());
  row.residual = std::max(subspace_distance(lab.der_a(), lab.inn_a()), space_leibniz_residual(lab.der_a()));
  row.note = "linear dimensions; residual is mutual containment";
}

// ---- stage 3 ----

void check_group_algebra_dim(Lab& lab, CheckRow& row) {
  const FiniteGroup& g = lab.any_group();
  const auto cg = std::make_shared<const FDAlgebra>(group_algebra(g));
  SolveOptions o;
  o.seed = lab.seed();
  const double dim = vn_dimension(phi_x(derivation_space(cg, o), hermitian_generators(*cg, lab.seed())), lab.vn()).value;
  set_values(row, dim, 1.0 - 1.0 / g.order);
}

void check_multimatrix_dim(Lab& lab, CheckRow& row) { set_values(row, lab.dim_der_a(), 1.0 - weight_sum(lab.blocks())); }

void check_generating_set_independence(Lab& lab, CheckRow& row) {
  const auto rep = generating_set_independence(lab.der_a(), lab.gens(), basis_set(lab.a()), lab.vn());
  set_values(row, rep.dim1, rep.dim2);
  row.note = "hermitian generators vs full basis";
  if (lab.spec().action && lab.group().is_abelian()) {
    std::vector<Vec> y2;
    for (const auto& s : scaled_generating_set(lab.gens(), lab.action(), lab.seed()))
      y2.push_back(lab.cp().embed_base * s.vector);
    for (const auto& u : group_basis(lab.cp())) y2.push_back(u);
    const auto cprep = generating_set_independence(lab.der_cp(), lab.y(), y2, lab.vn());
    row.residual = std::max(row.residual, cprep.difference);
    row.note += "; crossed product: Y vs scaled Y gives " + std::to_string(cprep.dim1) + " vs " +
                std::to_string(cprep.dim2);
  }
}

void check_relative_decomposition(Lab& lab, CheckRow& row) {
  const FDAlgebra& a = lab.a();
  const double full = lab.dim_der_a();
  // B = maximal abelian subalgebra spanned by minimal projections
  std::vector<Vec> masa;
  for (const auto& b : wedderburn(a, lab.seed()))
    for (const auto& e : b.minimal_projections) masa.push_back(e);
  const DerivationSpace rel = relative_derivations(lab.der_a(), masa, lab.tol());
  double sum = 0.0;
  for (const auto& e : masa) sum += std::pow(trace(a, e).real(), 2);
  const double rel_dim = vn_dimension(phi_x(rel, lab.gens()), lab.vn()).value;
  set_values(row, full, (1.0 - sum) + rel_dim);

  // B = A gives the zero space
  const DerivationSpace rel_all = relative_derivations(lab.der_a(), basis_set(a), lab.tol());
  double res = row.residual;
  if (rel_all.size() != 0) res = std::max(res, 1.0);

  // sum_y [y^*, d(y)] over Y = {e x e'} must be B-central for d vanishing on B
  std::vector<Vec> ys;
  for (const auto& x : lab.gens())
    for (const auto& e : masa)
      for (const auto& e2 : masa) {
        const Vec y = multiply(a, multiply(a, e, x), e2);
        if (y.norm() > 1e-12) ys.push_back(y);
      }
  for (int probe = 0; probe < 3 && rel.size() > 0; ++probe) {
    const Derivation d = random_derivation(rel, lab.rng);
    Vec eta = Vec::Zero(static_cast<Eigen::Index>(a.dim) * a.dim);
    for (const auto& y : ys) eta += commutator_with(a, star(a, y), d(y));
    const double scale = std::max(1.0, eta.norm());
    for (const auto& e : masa) res = std::max(res, max_abs(commutator_with(a, e, eta)) / scale);
  }
  row.residual = res;
  row.note = "B = span of minimal projections, dim Der(B subset A) = " + std::to_string(rel_dim);
}

void check_schreier_dim_der(Lab& lab, CheckRow& row) {
  const int order = lab.group().order;
  set_values(row, lab.dim_der_cp(), 1.0 + (lab.dim_der_a() - 1.0) / order);
}

void check_schreier_vanishing(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const int order = c.order();
  const ModuleSubspace sub = phi_x(lab.vanishing(), lab.y());
  const double over_big = vn_dimension(sub, lab.vn()).value;
  const double over_small = vn_dimension(restrict_scalars(sub, c), lab.vn()).value;
  const double base = lab.dim_der_a();
  set_values(row, over_small, order * base);
  double res = std::max(row.residual, std::abs(over_big - base / order));
  // twisted copies of Der(A) carry the same dimension
  const ModuleSubspace plain = phi_x(lab.der_a(), lab.gens());
  for (int h = 0; h < order; ++h) res = std::max(res, std::abs(vn_dimension(untwist(plain, c, h), lab.vn()).value - base));
  row.residual = res;
  row.note = "over the big tensor algebra: " + std::to_string(over_big);
}

void check_index_scaling(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const int order = c.order();
  const double full = vn_dimension(restrict_scalars(full_ambient(c.big, 1, {}), c), lab.vn()).value;
  const ModuleSubspace sub = phi_x(lab.der_cp(), lab.y());
  const double big = vn_dimension(sub, lab.vn()).value;
  const double small = vn_dimension(restrict_scalars(sub, c), lab.vn()).value;
  set_values(row, small, double(order) * order * big);
  row.residual = std::max(row.residual, std::abs(full - double(order) * order));
  row.note = "full ambient restricts to " + std::to_string(full);
}

void check_betti_difference(Lab& lab, CheckRow& row) {
  const int order = lab.group().order;
  auto diff = [](double der, double inn) { return (der - inn) - (1.0 - inn); };
  set_values(row, diff(lab.dim_der_cp(), lab.dim_inn_cp()), diff(lab.dim_der_a(), lab.dim_inn_a()) / order);
  row.note = "inner and all derivations coincide, so this equals the Schreier relation";
}

void check_subgroup_corollary(Lab& lab, CheckRow& row) {
  if (!lab.spec().subgroup) throw Skip{"no subgroup given"};
  const Subgroup sub = make_subgroup(lab.group(), *lab.spec().subgroup);
  const GroupAction act_h = restrict_action(lab.action(), sub);
  const CrossedContext ch = make_crossed(act_h, lab.residual_tol());
  SolveOptions o;
  o.seed = lab.seed();
  const double dim_h =
      vn_dimension(phi_x(derivation_space(ch.product, o), hermitian_generators(*ch.product, lab.seed())), lab.vn()).value;
  const double index = double(lab.group().order) / sub.group.order;
  set_values(row, lab.dim_der_cp() - 1.0, (dim_h - 1.0) / index);
  row.note = "[G:H] = " + std::to_string(static_cast<int>(std::lround(index)));
}

// ---- stage 4 ----

void check_coset_partition(Lab& lab, CheckRow& row) {
  row.residual = std::max(lab.cosets().partition, lab.cosets().commutant);
}
void check_coset_translation(Lab& lab, CheckRow& row) { row.residual = lab.cosets().translation; }
void check_coset_tomita(Lab& lab, CheckRow& row) { row.residual = lab.cosets().tomita; }

void check_covariance_equivalence(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const DerivationSpace& all = lab.der_cp();
  const int order = c.order(), dcp = c.dim_cp(), db = c.big->dim;
  const Eigen::Index per = static_cast<Eigen::Index>(db) * dcp;
  std::vector<Mat> ads;
  for (int g = 0; g < order; ++g) ads.push_back(c.ad(g));
  Mat cons(per * order, all.size());
  for (int i = 0; i < all.size(); ++i) {
    const Derivation d = all.materialize(i);
    for (int g = 0; g < order; ++g) {
      Mat diff = d.matrix * ads[g];
      for (int b = 0; b < dcp; ++b) diff.col(b) -= c.act_units(d.matrix.col(b), g, c.action.group.inv(g));
      cons.block(per * g, i, per, 1) = Eigen::Map<const Vec>(diff.data(), per);
    }
  }
  const Mat cov = all.size() ? nullspace(cons).basis : Mat(0, 0);
  double res = 0.0;
  // covariant => vanishing on C[G]
  for (Eigen::Index k = 0; k < cov.cols(); ++k) res = std::max(res, vanishing_residual(c, combo(all, cov.col(k))));
  // vanishing => covariant
  for (int probe = 0; probe < 3 && lab.vanishing().size() > 0; ++probe)
    res = std::max(res, covariance_residual(c, random_derivation(lab.vanishing(), lab.rng)));
  row.lhs = static_cast<double>(cov.cols());
  row.rhs = lab.vanishing().size();
  row.lhs_exact = std::to_string(cov.cols());
  row.rhs_exact = std::to_string(lab.vanishing().size());
  if (cov.cols() != lab.vanishing().size()) res = std::max(res, 1.0);
  // negative case: the inner derivation of u_s (x) 1 for s != e
  if (order > 1) {
    const int s = c.action.group.identity == 0 ? 1 : 0;
    const Derivation d = inner_derivation(*c.product, c.unitary_pair(s, c.action.group.identity));
    const bool covariant = covariance_residual(c, d) <= lab.tol();
    const bool vanishes = vanishing_residual(c, d) <= lab.tol();
    if (covariant != vanishes) res = std::max(res, 1.0);
    row.note = std::string("inner by u_s (x) 1: covariant=") + (covariant ? "yes" : "no") +
               ", vanishes on C[G]=" + (vanishes ? "yes" : "no");
  }
  row.residual = res;
}

void check_extension_vanishing(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const DerivationSpace& der = lab.der_a();
  double res = 0.0;
  for (int probe = 0; probe < 2; ++probe) {
    const Derivation d = random_derivation(der, lab.rng);
    for (int h = 0; h < c.order(); ++h) {
      const Derivation dh = extend(c, d, h);
      res = std::max({res, leibniz_residual(*c.product, dh), vanishing_residual(c, dh), covariance_residual(c, dh)});
    }
  }
  // injectivity: the extension of a basis keeps full rank
  int rank_defect = 0;
  if (der.size() > 0) {
    const Eigen::Index len = static_cast<Eigen::Index>(c.big->dim) * c.dim_cp();
    for (int h = 0; h < c.order(); ++h) {
      Mat cols(len, der.size());
      for (int i = 0; i < der.size(); ++i) {
        const Derivation dh = extend(c, der.materialize(i), h);
        cols.col(i) = Eigen::Map<const Vec>(dh.matrix.data(), len);
      }
      rank_defect = std::max(rank_defect, der.size() - static_cast<int>(column_space(cols).cols()));
    }
  }
  row.lhs = der.size();
  row.rhs = der.size() - rank_defect;
  row.lhs_exact = std::to_string(der.size());
  row.rhs_exact = std::to_string(der.size() - rank_defect);
  row.residual = rank_defect ? std::max(res, 1.0) : res;
  row.note = "Leibniz, vanishing on C[G] and covariance of d^h; injectivity by rank";
}

void check_extension_orthogonality(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const Mat& gb = lab.big_gram();
  double res = 0.0;
  for (int probe = 0; probe < 2; ++probe) {
    const Derivation d = random_derivation(lab.der_a(), lab.rng);
    std::vector<Derivation> ext;
    for (int h = 0; h < c.order(); ++h) ext.push_back(extend(c, d, h));
    for (int h = 0; h < c.order(); ++h)
      for (int k = h + 1; k < c.order(); ++k) {
        const double n1 = std::sqrt(std::abs(inner_x(gb, ext[h], ext[h], lab.y())));
        const double n2 = std::sqrt(std::abs(inner_x(gb, ext[k], ext[k], lab.y())));
        const double ip = std::abs(inner_x(gb, ext[h], ext[k], lab.y()));
        res = std::max(res, ip / std::max(1.0, n1 * n2));
      }
  }
  row.residual = res;
}

void check_decomposition_roundtrip(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const int order = c.order(), e = c.action.group.identity;
  double res = 0.0;
  // (sum_g (d_g)^g)_h = d_h
  for (int probe = 0; probe < 2; ++probe) {
    std::vector<Derivation> ds;
    Derivation total;
    total.matrix = Mat::Zero(c.big->dim, c.dim_cp());
    for (int g = 0; g < order; ++g) {
      ds.push_back(random_derivation(lab.der_a(), lab.rng));
      total.matrix += extend(c, ds.back(), g).matrix;
    }
    for (int h = 0; h < order; ++h) res = std::max(res, max_abs(Mat(restrict(c, total, e, h).matrix - ds[h].matrix)));
  }
  // D = sum_h (D_h)^h on the vanishing space, and each D_{g,h} is a derivation
  for (int probe = 0; probe < 2 && lab.vanishing().size() > 0; ++probe) {
    const Derivation d = random_derivation(lab.vanishing(), lab.rng);
    Mat sum = Mat::Zero(d.matrix.rows(), d.matrix.cols());
    for (int h = 0; h < order; ++h) sum += extend(c, restrict(c, d, e, h), h).matrix;
    res = std::max(res, max_abs(Mat(sum - d.matrix)));
    for (int g = 0; g < order; ++g)
      for (int h = 0; h < order; ++h) res = std::max(res, leibniz_residual(*c.base, restrict(c, d, g, h)));
  }
  row.residual = res;
}

void check_decomposition_module_linearity(Lab& lab, CheckRow& row) {
  const CrossedContext& c = lab.cp();
  const int order = c.order(), e = c.action.group.identity;
  const FiniteGroup& grp = c.action.group;
  double res = 0.0;
  for (int probe = 0; probe < 2; ++probe) {
    const Vec m = random_unit(c.small->dim, lab.rng);
    const Derivation d = random_derivation(lab.der_a(), lab.rng);
    for (int h = 0; h < order; ++h) {
      // (d ._{h^-1} m)^h = d^h . m
      const Derivation lhs = extend(c, right_act(*c.base, *c.small, d, twist_action(c, m, grp.inv(h))), h);
      const Derivation rhs = right_act(*c.product, *c.big, extend(c, d, h), c.embed_small(m));
      res = std::max(res, max_abs(Mat(lhs.matrix - rhs.matrix)));
    }
    if (lab.vanishing().size() == 0) continue;
    const Derivation big = random_derivation(lab.vanishing(), lab.rng);
    for (int h = 0; h < order; ++h) {
      // (D ._h m)_h = D_h . m
      const Derivation moved = right_act(*c.product, *c.big, big, c.embed_small(twist_action(c, m, h)));
      const Derivation lhs = restrict(c, moved, e, h);
      const Derivation rhs = right_act(*c.base, *c.small, restrict(c, big, e, h), m);
      res = std::max(res, max_abs(Mat(lhs.matrix - rhs.matrix)));
    }
  }
  // the twist is an action: (1 (x) alpha_g)(1 (x) alpha_h) = 1 (x) alpha_gh
  const Vec m = random_unit(c.small->dim, lab.rng);
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h)
      res = std::max(res, max_abs(Vec(twist_action(c, twist_action(c, m, h), g) - twist_action(c, m, grp.mul(g, h)))));
  row.residual = res;
}

std::vector<Vec> scaled_y(Lab& lab) {
  lab.require_abelian();
  const CrossedContext& c = lab.cp();
  std::vector<Vec> y;
  for (const auto& s : scaled_generating_set(lab.gens(), lab.action(), lab.seed())) y.push_back(c.embed_base * s.vector);
  for (const auto& u : group_basis(c)) y.push_back(u);
  require_scaled(c, y, lab.residual_tol());
  return y;
}

void check_vg_unitary(Lab& lab, CheckRow& row) {
  const std::vector<Vec> y = scaled_y(lab);
  const CrossedContext& c = lab.cp();
  const Mat& gb = lab.big_gram();
  double res = 0.0;
  for (int probe = 0; probe < 2; ++probe) {
    const Derivation d1 = random_derivation(lab.der_cp(), lab.rng);
    const Derivation d2 = random_derivation(lab.der_cp(), lab.rng);
    for (int g = 0; g < c.order(); ++g) {
      const Derivation v1 = vg_apply(c, d1, g);
      const Derivation v2 = vg_apply(c, d2, c.action.group.inv(g));
      res = std::max(res, std::abs(inner_x(gb, v1, d2, y) - inner_x(gb, d1, v2, y)));
      res = std::max(res, std::abs(inner_x(gb, v1, v1, y) - inner_x(gb, d1, d1, y)));
      res = std::max(res, leibniz_residual(*c.product, v1));
    }
  }
  row.residual = res;
  row.note = "Y = scaled generators with the group unitaries";
}

void check_vg_module(Lab& lab, CheckRow& row) {
  lab.require_abelian();
  const CrossedContext& c = lab.cp();
  double res = 0.0;
  for (int probe = 0; probe < 2; ++probe) {
    const Derivation d = random_derivation(lab.der_cp(), lab.rng);
    const Vec m = c.embed_small(random_unit(c.small->dim, lab.rng));
    for (int g = 0; g < c.order(); ++g) {
      const Derivation lhs = vg_apply(c, right_act(*c.product, *c.big, d, m), g);
      const Derivation rhs = right_act(*c.product, *c.big, vg_apply(c, d, g), m);
      res = std::max(res, max_abs(Mat(lhs.matrix - rhs.matrix)));
    }
  }
  row.residual = res;
}

void check_vg_average(Lab& lab, CheckRow& row) {
  lab.require_abelian();
  const CrossedContext& c = lab.cp();
  double res = 0.0;
  for (int probe = 0; probe < 2; ++probe) {
    const Derivation d = random_derivation(lab.der_cp(), lab.rng);
    Derivation avg;
    avg.matrix = Mat::Zero(d.matrix.rows(), d.matrix.cols());
    for (int g = 0; g < c.order(); ++g) avg.matrix += vg_apply(c, d, g).matrix;
    avg.matrix /= double(c.order());
    res = std::max(res, vanishing_residual(c, avg));
    // V_e is the identity
    res = std::max(res, max_abs(Mat(vg_apply(c, d, c.action.group.identity).matrix - d.matrix)));
  }
  row.residual = res;
}

enum class Needs { algebra, group, action };

struct Entry {
  CheckInfo info;
  Needs needs;
  std::function<void(Lab&, CheckRow&)> fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{"validate_algebra", "associativity, unit, involution, faithful normalized trace", 0}, Needs::algebra,
       check_validate_algebra},
      {{"validate_action", "alpha_e = id, alpha_g alpha_h = alpha_gh, trace-preserving *-automorphisms", 0},
       Needs::action, check_validate_action},
      {{"crossed_structure", "A x| G is a tracial *-algebra with sum n_i^2 = |G| dim A", 1}, Needs::action,
       check_crossed_structure},
      {{"scaled_generating_set", "alpha_h(y) = chi(h) y for y in X_G^; same generated subalgebra", 1}, Needs::action,
       check_scaled_generating_set},
      {{"central_projection", "p = sum (1/n_i) sum e_jk (x) e_kj^op projects onto the central vectors", 1},
       Needs::algebra, check_central_projection},
      {{"group_central_family", "f_h = |G|^-1/2 sum_k u_kh (x) u_k^-1 is an orthonormal basis of central vectors",
        1},
       Needs::group, check_group_central_family},
      {{"inner_equals_der", "every derivation is inner in finite dimensions", 2}, Needs::algebra,
       check_inner_equals_der},
      {{"lemma_group_algebra_dim", "dim Der(C[G]) = 1 - 1/|G|", 3}, Needs::group, check_group_algebra_dim},
      {{"multimatrix_dim", "dim Der(A) = 1 - sum alpha_i^2/n_i^2", 3}, Needs::algebra, check_multimatrix_dim},
      {{"generating_set_independence", "dimension does not depend on the generating set", 3}, Needs::algebra,
       check_generating_set_independence},
      {{"relative_decomposition", "dim Der(A) = dim Der(B) + dim Der(B subset A)", 3}, Needs::algebra,
       check_relative_decomposition},
      {{"schreier_dim_der", "dim Der(A x| G) - 1 = (1/|G|)(dim Der(A) - 1)", 3}, Needs::action,
       check_schreier_dim_der},
      {{"schreier_vanishing", "dim Der(C[G] subset A x| G) over A (x) A^op = |G| dim Der(A)", 3}, Needs::action,
       check_schreier_vanishing},
      {{"index_scaling", "restriction to A (x) A^op multiplies dimensions by |G|^2", 3}, Needs::action,
       check_index_scaling},
      {{"betti_difference", "(b1 - b0)(A x| G) = (1/|G|)(b1 - b0)(A)", 3}, Needs::action, check_betti_difference},
      {{"subgroup_corollary", "dim Der(A x| G) - 1 = (1/[G:H])(dim Der(A x| H) - 1)", 3}, Needs::action,
       check_subgroup_corollary},
      {{"coset_partition", "p_gh are orthogonal projections summing to 1 and commuting with A (x) A^op", 4},
       Needs::action, check_coset_partition},
      {{"coset_translation", "p_gh (u_k (x) u_l^op) = (u_k (x) u_l^op) p_{k^-1 g, h l^-1}", 4}, Needs::action,
       check_coset_translation},
      {{"coset_tomita", "J p_gh = p_{g^-1,h^-1} J", 4}, Needs::action, check_coset_tomita},
      {{"covariance_equivalence", "D(u_g b u_g^*) = u_g.D(b).u_g^* iff D vanishes on C[G]", 4}, Needs::action,
       check_covariance_equivalence},
      {{"extension_vanishing", "d^h is an injective extension vanishing on C[G]", 4}, Needs::action,
       check_extension_vanishing},
      {{"extension_orthogonality", "{d^h}_h are orthogonal for <.,.>_Y", 4}, Needs::action,
       check_extension_orthogonality},
      {{"decomposition_roundtrip", "D = sum_h (D_h)^h and (sum_g (d_g)^g)_h = d_h", 4}, Needs::action,
       check_decomposition_roundtrip},
      {{"decomposition_module_linearity", "(d ._{h^-1} m)^h = d^h . m and (D ._h m)_h = D_h . m", 4},
       Needs::action, check_decomposition_module_linearity},
      {{"vg_unitary", "V_g D = u_g^* . D(alpha_g(.)) . u_g is unitary for <.,.>_Y", 4}, Needs::action,
       check_vg_unitary},
      {{"vg_module", "V_g commutes with the right module action", 4}, Needs::action, check_vg_module},
      {{"vg_average", "(1/|G|) sum_g V_g D vanishes on C[G]", 4}, Needs::action, check_vg_average},
  };
  return list;
}

}  // namespace

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

std::vector<std::string> resolve_checks(const std::vector<std::string>& requested) {
  std::set<std::string> wanted;
  for (const auto& r : requested) {
    if (r == "all") {
      for (const auto& e : entries()) wanted.insert(e.info.id);
      continue;
    }
    if (r == "identities") {
      for (const auto& e : entries())
        if (e.info.stage == 4) wanted.insert(e.info.id);
      continue;
    }
    const bool known = std::any_of(entries().begin(), entries().end(), [&](const Entry& e) { return e.info.id == r; });
    if (!known) throw SpecInvalid("checks: unknown check id '" + r + "'");
    wanted.insert(r);
  }
  std::vector<std::string> out;
  for (const auto& e : entries())
    if (wanted.count(e.info.id)) out.push_back(e.info.id);
  return out;
}

bool VerificationReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.status != "fail"; });
}

double effective_tolerance(const ExperimentSpec& spec, std::optional<double> override_tol) {
  if (override_tol) return *override_tol;
  if (spec.tolerance) return *spec.tolerance;
  if (const char* env = std::getenv("STEINLAB_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) throw SpecInvalid("STEINLAB_TOL: not a positive number");
    return v;
  }
  return 1e-8;
}

void check_spec(const ExperimentSpec& spec) {
  if (!spec.algebra) throw SpecInvalid("algebra: missing");
  if (spec.action) {
    if (spec.action->algebra->dim != spec.algebra->dim)
      throw SpecInvalid("action: maps act on dimension " + std::to_string(spec.action->algebra->dim) +
                        " but the algebra has dimension " + std::to_string(spec.algebra->dim));
    if (static_cast<int>(spec.action->maps.size()) != spec.action->group.order)
      throw SpecInvalid("action: expected one matrix per group element");
    for (const auto& m : spec.action->maps)
      if (m.rows() != spec.algebra->dim || m.cols() != spec.algebra->dim)
        throw SpecInvalid("action: matrix shape does not match the algebra dimension");
  }
  if (spec.subgroup) {
    if (!spec.action) throw SpecInvalid("subgroup: requires a group action");
    try {
      make_subgroup(spec.action->group, *spec.subgroup);
    } catch (const Error& e) {
      throw SpecInvalid(std::string("subgroup: ") + e.what());
    }
  }
  resolve_checks(spec.checks);
}

VerificationReport run(const ExperimentSpec& spec, std::optional<double> override_tol,
                       std::optional<std::uint64_t> override_seed) {
  check_spec(spec);
  VerificationReport rep;
  rep.label = spec.label;
  rep.tolerance = effective_tolerance(spec, override_tol);
  rep.seed = override_seed ? *override_seed : spec.seed;
  Lab lab(spec, rep.tolerance, rep.seed);

  const std::vector<std::string> ids = resolve_checks(spec.checks);
  std::set<std::string> wanted(ids.begin(), ids.end());
  // gating validations are always reported, so a failure cannot hide behind skipped rows
  wanted.insert("validate_algebra");
  if (spec.action) wanted.insert("validate_action");

  // validation gates everything downstream, whether or not its row was requested
  std::string algebra_block, action_block;
  {
    const ValidationReport v = validate(lab.a(), lab.residual_tol());
    if (!v.pass) algebra_block = "algebra validation failed";
    if (spec.action && v.pass) {
      if (action_residuals(*spec.action).max() > lab.residual_tol()) action_block = "action validation failed";
    }
  }

  for (const auto& e : entries()) {
    if (!wanted.count(e.info.id)) continue;
    CheckRow row;
    row.id = e.info.id;
    row.anchor = e.info.anchor;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const bool is_validation = e.info.id == "validate_algebra";
      if (!is_validation && !algebra_block.empty()) throw Skip{algebra_block};
      if (e.needs == Needs::action && !spec.action) throw Skip{"no group action given"};
      if (e.needs == Needs::action && e.info.id != "validate_action" && !action_block.empty()) throw Skip{action_block};
      e.fn(lab, row);
      if (row.status.empty())
        row.status = (std::isfinite(row.residual) && row.residual <= rep.tolerance) ? "pass" : "fail";
    } catch (const Skip& s) {
      row.status = "skipped";
      row.note = s.why;
      row.lhs = row.rhs = row.residual = 0.0;
      row.lhs_exact.clear();
      row.rhs_exact.clear();
    } catch (const Error& err) {
      row.status = "fail";
      row.note = err.what();
      row.residual = std::numeric_limits<double>::infinity();
    }
    row.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace steinlab
