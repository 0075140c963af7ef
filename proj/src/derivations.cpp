#include "steinlab/derivations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steinlab/constructions.hpp"
#include "steinlab/errors.hpp"

namespace steinlab {

namespace {

using RMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RMat as_matrix(const Vec& xi, int n) { return Eigen::Map<const RMat>(xi.data(), n, n); }
Vec as_vector(const RMat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat reduced_combo(const std::vector<Mat>& red, const Vec& x) {
  Mat out = Mat::Zero(red[0].rows(), red[0].cols());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x(j) != cd(0)) out += x(j) * red[static_cast<std::size_t>(j)];
  return out;
}

// Sum_j x_j C_j where C_j are the r-row slices of a coefficient matrix.
Mat evaluate_coeffs(const Mat& c, int r, const Vec& x) {
  Mat out = Mat::Zero(r, c.cols());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x(j) != cd(0)) out += x(j) * c.middleRows(j * r, r);
  return out;
}

struct BlockGeometry {
  int nl = 0, nr = 0, r = 0;
  Mat h;  // frame Gram kron(U^H G U, V^H G V)
};

BlockGeometry geometry(const ProjectionFrames& f, int l, int m) {
  BlockGeometry g;
  const Mat& u = f.left_ideal[l];
  const Mat& v = f.right_ideal[m];
  g.nl = static_cast<int>(u.cols());
  g.nr = static_cast<int>(v.cols());
  g.r = g.nl * g.nr;
  g.h = kron(Mat(u.adjoint() * f.gram_a * u), Mat(v.adjoint() * f.gram_a * v));
  return g;
}

// Gram of <.,.>_X on coefficient vectors: kron(sum_x conj(x) x^T, H).
Mat inner_gram(const std::vector<Vec>& x, int dim, const Mat& h) {
  Mat k = Mat::Zero(dim, dim);
  for (const auto& v : x) k += v.conjugate() * v.transpose();
  return kron(k, h);
}

// Leibniz rows for x in `rows_for`, plus d(1) = 0.
Mat leibniz_system(const ProjectionFrames& f, int l, int m, const std::vector<Vec>& rows_for) {
  const FDAlgebra& a = *f.algebra;
  const int n = a.dim;
  const int nl = static_cast<int>(f.left_ideal[l].cols()), nr = static_cast<int>(f.right_ideal[m].cols());
  const int r = nl * nr;
  const Mat il = Mat::Identity(nl, nl), ir = Mat::Identity(nr, nr), id = Mat::Identity(r, r);
  std::vector<Mat> right_k(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) right_k[k] = kron(il, f.right_red[m][k]);

  Mat sys = Mat::Zero(static_cast<Eigen::Index>((rows_for.size() * n + 1) * r), static_cast<Eigen::Index>(n) * r);
  Eigen::Index row = 0;
  for (const auto& x : rows_for) {
    const Mat lx = a.left_mult(x);
    const Mat left_x = kron(reduced_combo(f.left_red[l], x), ir);
    for (int k = 0; k < n; ++k, row += r) {
      // d(x b_k) - x.d(b_k) - d(x).b_k
      for (int kk = 0; kk < n; ++kk)
        if (lx(kk, k) != cd(0)) sys.block(row, kk * r, r, r) += lx(kk, k) * id;
      sys.block(row, k * r, r, r) -= left_x;
      for (int j = 0; j < n; ++j)
        if (x(j) != cd(0)) sys.block(row, j * r, r, r) -= x(j) * right_k[k];
    }
  }
  for (int j = 0; j < n; ++j)
    if (a.unit(j) != cd(0)) sys.block(row, j * r, r, r) += a.unit(j) * id;
  return sys;
}

std::vector<Vec> default_inner_set(const FDAlgebra& a, const std::vector<Vec>& given) {
  return given.empty() ? basis_set(a) : given;
}

}  // namespace

Vec bimodule_act(const FDAlgebra& a, const Vec& x, const Vec& xi, const Vec& y) {
  const RMat m = a.left_mult(x) * as_matrix(xi, a.dim) * a.right_mult(y).transpose();
  return as_vector(m);
}

Vec commutator_with(const FDAlgebra& a, const Vec& x, const Vec& xi) {
  const RMat m = a.left_mult(x) * as_matrix(xi, a.dim) - as_matrix(xi, a.dim) * a.right_mult(x).transpose();
  return as_vector(m);
}

double leibniz_residual(const FDAlgebra& a, const Derivation& d) {
  const int n = a.dim;
  std::vector<Mat> l(static_cast<std::size_t>(n)), rt(static_cast<std::size_t>(n));
  std::vector<RMat> vals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    l[i] = a.left_basis(i);
    rt[i] = a.right_basis(i).transpose();
    vals[i] = as_matrix(d.matrix.col(i), n);
  }
  double res = max_abs(Vec(d.matrix * a.unit));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      RMat lhs = RMat::Zero(n, n);
      for (const auto& e : a.product_of(i, j)) lhs += e.c * vals[e.k];
      lhs -= l[i] * vals[j] + vals[i] * rt[j];
      res = std::max(res, lhs.cwiseAbs().maxCoeff());
    }
  return res;
}

Derivation inner_derivation(const FDAlgebra& a, const Vec& xi) {
  Derivation d;
  d.matrix = Mat(xi.size(), a.dim);
  for (int j = 0; j < a.dim; ++j) d.matrix.col(j) = commutator_with(a, a.basis(j), xi);
  return d;
}

Derivation right_act(const FDAlgebra& a, const FDAlgebra& n, const Derivation& d, const Vec& m) {
  Derivation out;
  out.matrix = Mat(n.dim, a.dim);
  for (int j = 0; j < a.dim; ++j) out.matrix.col(j) = multiply(n, d.matrix.col(j), m);
  return out;
}

cd inner_x(const Mat& gram_n, const Derivation& d1, const Derivation& d2, const std::vector<Vec>& x) {
  cd s = 0.0;
  for (const auto& v : x) {
    const Vec a = d1(v), b = d2(v);
    s += (b.adjoint() * gram_n * a)(0);
  }
  return s;
}

FramesPtr make_frames(AlgebraPtr a, const std::vector<Vec>& projections) {
  auto f = std::make_shared<ProjectionFrames>();
  f->algebra = a;
  f->projections = projections;
  f->gram_a = gram(*a);
  const int n = a->dim;
  std::vector<Mat> lb(static_cast<std::size_t>(n)), rb(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    lb[k] = a->left_basis(k);
    rb[k] = a->right_basis(k);
  }
  for (const auto& e : projections) {
    Mat u, v;
    if (max_abs(Vec(e - a->unit)) < 1e-12) {
      u = v = Mat::Identity(n, n);
    } else {
      u = column_space(a->right_mult(e));
      v = column_space(a->left_mult(e));
    }
    std::vector<Mat> lr, rr;
    for (int k = 0; k < n; ++k) {
      lr.push_back(u.adjoint() * lb[k] * u);
      rr.push_back(v.adjoint() * rb[k] * v);
    }
    f->left_ideal.push_back(u);
    f->right_ideal.push_back(v);
    f->left_red.push_back(std::move(lr));
    f->right_red.push_back(std::move(rr));
  }
  return f;
}

FramesPtr minimal_frames(AlgebraPtr a, std::uint64_t seed) {
  std::vector<Vec> projections;
  for (const auto& b : wedderburn(*a, seed))
    for (const auto& e : b.minimal_projections) projections.push_back(e);
  return make_frames(std::move(a), projections);
}

FramesPtr trivial_frames(AlgebraPtr a) {
  const Vec unit = a->unit;
  return make_frames(std::move(a), {unit});
}

int DerivationSpace::size() const {
  int s = 0;
  for (const auto& b : blocks) s += static_cast<int>(b.coeffs.cols());
  return s;
}

int DerivationSpace::block_rank(const DerBlock& b) const {
  return static_cast<int>(frames->left_ideal[b.left].cols() * frames->right_ideal[b.right].cols());
}

Mat DerivationSpace::frame(const DerBlock& b) const { return kron(frames->left_ideal[b.left], frames->right_ideal[b.right]); }

Derivation DerivationSpace::materialize(int index) const {
  for (const auto& b : blocks) {
    if (index >= b.coeffs.cols()) {
      index -= static_cast<int>(b.coeffs.cols());
      continue;
    }
    const Mat f = frame(b);
    const int r = block_rank(b), n = algebra->dim;
    Derivation d;
    d.matrix = Mat(f.rows(), n);
    for (int k = 0; k < n; ++k) d.matrix.col(k) = f * b.coeffs.block(k * r, index, r, 1);
    return d;
  }
  throw ShapeMismatch("derivation index out of range");
}

std::vector<Derivation> DerivationSpace::materialize_all() const {
  std::vector<Derivation> out;
  for (int i = 0; i < size(); ++i) out.push_back(materialize(i));
  return out;
}

bool generates_plain(const FDAlgebra& a, const std::vector<Vec>& x) {
  return subalgebra_generate(a, x, false).cols() == a.dim;
}

std::vector<Vec> basis_set(const FDAlgebra& a) {
  std::vector<Vec> out;
  for (int i = 0; i < a.dim; ++i) out.push_back(a.basis(i));
  return out;
}

std::vector<Vec> hermitian_generators(const FDAlgebra& a, std::uint64_t seed) {
  if (a.dim == 1) return basis_set(a);
  Rng rng(seed ^ 0x2545f4914f6cdd1dULL);
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<Vec> x;
    for (int t = 0; t < 2; ++t) {
      Vec v(a.dim);
      for (int i = 0; i < a.dim; ++i) v(i) = rng.complex_normal();
      x.push_back((v + star(a, v)) * 0.5);
    }
    if (generates_plain(a, x)) return x;
  }
  return basis_set(a);
}

DerivationSpace derivation_space(AlgebraPtr a, const SolveOptions& opt) {
  DerivationSpace s;
  s.algebra = a;
  s.frames = opt.frames ? opt.frames : opt.use_blocks ? minimal_frames(a, opt.seed) : trivial_frames(a);
  s.inner_set = default_inner_set(*a, opt.inner_set);
  std::vector<Vec> rows_for = opt.solve_set;
  if (rows_for.empty()) rows_for = hermitian_generators(*a, opt.seed);
  else if (!generates_plain(*a, rows_for))
    throw NotGenerating("Leibniz rows must be imposed on a generating set");

  const ProjectionFrames& f = *s.frames;
  for (int l = 0; l < f.count(); ++l)
    for (int m = 0; m < f.count(); ++m) {
      const BlockGeometry g = geometry(f, l, m);
      const Mat sys = leibniz_system(f, l, m, rows_for);
      const Mat z = nullspace(sys, opt.policy).basis;
      if (z.cols() == 0) continue;
      DerBlock b;
      b.left = l;
      b.right = m;
      b.coeffs = gram_orthonormalize(z, inner_gram(s.inner_set, a->dim, g.h), opt.policy);
      s.blocks.push_back(std::move(b));
    }
  return s;
}

DerivationSpace inner_derivations(AlgebraPtr a, const SolveOptions& opt) {
  DerivationSpace s;
  s.algebra = a;
  s.frames = opt.frames ? opt.frames : opt.use_blocks ? minimal_frames(a, opt.seed) : trivial_frames(a);
  s.inner_set = default_inner_set(*a, opt.inner_set);
  const ProjectionFrames& f = *s.frames;
  const int n = a->dim;
  for (int l = 0; l < f.count(); ++l)
    for (int m = 0; m < f.count(); ++m) {
      const BlockGeometry g = geometry(f, l, m);
      const Mat il = Mat::Identity(g.nl, g.nl), ir = Mat::Identity(g.nr, g.nr);
      Mat t(static_cast<Eigen::Index>(n) * g.r, g.r);
      for (int k = 0; k < n; ++k) t.middleRows(k * g.r, g.r) = kron(f.left_red[l][k], ir) - kron(il, f.right_red[m][k]);
      Mat c = gram_orthonormalize(t, inner_gram(s.inner_set, n, g.h), opt.policy);
      if (c.cols() == 0) continue;
      s.blocks.push_back({l, m, c});
    }
  return s;
}

DerivationSpace relative_derivations(const DerivationSpace& space, const std::vector<Vec>& b_basis, double tol) {
  const FDAlgebra& a = *space.algebra;
  std::vector<Vec> gens = b_basis;
  if (gens.empty()) gens.push_back(a.unit);
  Mat bm(a.dim, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) bm.col(static_cast<Eigen::Index>(i)) = gens[i];
  if (!same_subspace(a, bm, subalgebra_generate(a, gens, true), tol))
    throw NotSubalgebra("span of the given elements is not a unital *-subalgebra");

  DerivationSpace out = space;
  out.blocks.clear();
  for (const auto& b : space.blocks) {
    const int r = space.block_rank(b);
    Mat cons(static_cast<Eigen::Index>(b_basis.size()) * r, b.coeffs.cols());
    for (std::size_t i = 0; i < b_basis.size(); ++i)
      cons.middleRows(static_cast<Eigen::Index>(i) * r, r) = evaluate_coeffs(b.coeffs, r, b_basis[i]);
    const Mat w = cons.rows() ? nullspace(cons).basis : Mat(Mat::Identity(b.coeffs.cols(), b.coeffs.cols()));
    if (w.cols() == 0) continue;
    out.blocks.push_back({b.left, b.right, b.coeffs * w});
  }
  return out;
}

Mat central_vectors(const FDAlgebra& a, const FDAlgebra& n, const std::vector<Vec>& b_basis) {
  const int d = a.dim, dn = n.dim;
  const Mat id = Mat::Identity(d, d);
  if (b_basis.empty()) return gram_orthonormalize(Mat::Identity(dn, dn), gram(n));
  Mat stacked(static_cast<Eigen::Index>(b_basis.size()) * dn, dn);
  for (std::size_t i = 0; i < b_basis.size(); ++i)
    stacked.middleRows(static_cast<Eigen::Index>(i) * dn, dn) =
        kron(a.left_mult(b_basis[i]), id) - kron(id, a.right_mult(b_basis[i]));
  return gram_orthonormalize(nullspace(stacked).basis, gram(n));
}

Vec unit_central_element(const FDAlgebra& a, const MatrixUnits& units) {
  Vec p = Vec::Zero(static_cast<Eigen::Index>(a.dim) * a.dim);
  for (const auto& block : units) {
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(block.size()))));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) p += kron(block[j * n + k], block[k * n + j]) / double(n);
  }
  return p;
}

Mat unit_central_projection(const FDAlgebra& a, const FDAlgebra& n, const MatrixUnits& units, double tol) {
  const double r = matrix_unit_residual(a, units);
  if (r > tol) throw UnitsInvalid("matrix unit relations fail with residual " + std::to_string(r));
  return n.left_mult(unit_central_element(a, units));
}

double space_leibniz_residual(const DerivationSpace& s) {
  const FDAlgebra& a = *s.algebra;
  const ProjectionFrames& f = *s.frames;
  const int n = a.dim;
  double res = 0.0;
  for (const auto& b : s.blocks) {
    const int nl = static_cast<int>(f.left_ideal[b.left].cols()), nr = static_cast<int>(f.right_ideal[b.right].cols());
    const int r = nl * nr;
    const Mat il = Mat::Identity(nl, nl), ir = Mat::Identity(nr, nr);
    std::vector<Mat> lk, rk;
    for (int k = 0; k < n; ++k) {
      lk.push_back(kron(f.left_red[b.left][k], ir));
      rk.push_back(kron(il, f.right_red[b.right][k]));
    }
    res = std::max(res, max_abs(evaluate_coeffs(b.coeffs, r, a.unit)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Mat lhs = Mat::Zero(r, b.coeffs.cols());
        for (const auto& e : a.product_of(i, j)) lhs += e.c * b.coeffs.middleRows(e.k * r, r);
        lhs -= lk[i] * b.coeffs.middleRows(j * r, r) + rk[j] * b.coeffs.middleRows(i * r, r);
        res = std::max(res, max_abs(lhs));
      }
  }
  return res;
}

double space_orthonormality_residual(const DerivationSpace& s) {
  double res = 0.0;
  for (const auto& b : s.blocks) {
    const BlockGeometry g = geometry(*s.frames, b.left, b.right);
    const Mat m = inner_gram(s.inner_set, s.algebra->dim, g.h);
    const Mat c = b.coeffs.adjoint() * m * b.coeffs;
    res = std::max(res, max_abs(Mat(c - Mat::Identity(c.rows(), c.cols()))));
  }
  return res;
}

double subspace_distance(const DerivationSpace& s1, const DerivationSpace& s2) {
  if (s1.frames != s2.frames) throw ShapeMismatch("derivation spaces use different frames");
  const double inf = std::numeric_limits<double>::infinity();
  auto find = [](const DerivationSpace& s, int l, int m) -> const DerBlock* {
    for (const auto& b : s.blocks)
      if (b.left == l && b.right == m) return &b;
    return nullptr;
  };
  double res = 0.0;
  const int c = s1.frames->count();
  for (int l = 0; l < c; ++l)
    for (int m = 0; m < c; ++m) {
      const DerBlock* b1 = find(s1, l, m);
      const DerBlock* b2 = find(s2, l, m);
      const Eigen::Index k1 = b1 ? b1->coeffs.cols() : 0, k2 = b2 ? b2->coeffs.cols() : 0;
      if (k1 != k2) return inf;
      if (k1 == 0) continue;
      const BlockGeometry g = geometry(*s1.frames, l, m);
      const Mat m1 = inner_gram(s1.inner_set, s1.algebra->dim, g.h);
      // orthogonal projection of each basis onto the other span, in the first space's metric
      const Mat q1 = gram_orthonormalize(b1->coeffs, m1), q2 = gram_orthonormalize(b2->coeffs, m1);
      res = std::max(res, max_abs(Mat(b2->coeffs - q1 * (q1.adjoint() * m1 * b2->coeffs))));
      res = std::max(res, max_abs(Mat(b1->coeffs - q2 * (q2.adjoint() * m1 * b1->coeffs))));
    }
  return res;
}

}  // namespace steinlab
