#include "steinlab/algebra.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "steinlab/errors.hpp"

namespace steinlab {

Vec FDAlgebra::basis(int i) const {
  Vec v = Vec::Zero(dim);
  v(i) = 1.0;
  return v;
}

Mat FDAlgebra::left_mult(const Vec& x) const {
  Mat L = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (x(i) == cd(0)) continue;
    for (int j = 0; j < dim; ++j)
      for (const auto& e : product_of(i, j)) L(e.k, j) += x(i) * e.c;
  }
  return L;
}

Mat FDAlgebra::right_mult(const Vec& x) const {
  Mat R = Mat::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    if (x(j) == cd(0)) continue;
    for (int i = 0; i < dim; ++i)
      for (const auto& e : product_of(i, j)) R(e.k, i) += x(j) * e.c;
  }
  return R;
}

Mat FDAlgebra::left_basis(int i) const { return left_mult(basis(i)); }
Mat FDAlgebra::right_basis(int i) const { return right_mult(basis(i)); }

FDAlgebra algebra_from_dense(int dim, const std::vector<std::vector<std::vector<cd>>>& c, const Mat& star,
                             const Vec& unit, const Vec& trace, std::string label) {
  FDAlgebra a;
  a.dim = dim;
  if (static_cast<int>(c.size()) != dim) throw ShapeMismatch("mult has wrong outer size");
  a.mult.assign(static_cast<std::size_t>(dim) * dim, {});
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(c[i].size()) != dim) throw ShapeMismatch("mult has wrong middle size");
    for (int j = 0; j < dim; ++j) {
      if (static_cast<int>(c[i][j].size()) != dim) throw ShapeMismatch("mult has wrong inner size");
      for (int k = 0; k < dim; ++k)
        if (c[i][j][k] != cd(0)) a.mult[static_cast<std::size_t>(i) * dim + j].push_back({k, c[i][j][k]});
    }
  }
  a.star = star;
  a.unit = unit;
  a.trace = trace;
  a.label = std::move(label);
  return a;
}

void check_shapes(const FDAlgebra& alg) {
  if (alg.dim < 1) throw ShapeMismatch("dim must be at least 1");
  const auto n = static_cast<std::size_t>(alg.dim);
  if (alg.mult.size() != n * n) throw ShapeMismatch("mult must hold dim^2 entries");
  for (const auto& row : alg.mult)
    for (const auto& e : row)
      if (e.k < 0 || e.k >= alg.dim) throw ShapeMismatch("structure constant index out of range");
  if (alg.star.rows() != alg.dim || alg.star.cols() != alg.dim) throw ShapeMismatch("star must be dim x dim");
  if (alg.unit.size() != alg.dim) throw ShapeMismatch("unit must have length dim");
  if (alg.trace.size() != alg.dim) throw ShapeMismatch("trace must have length dim");
}

namespace {
void require_len(const FDAlgebra& alg, const Vec& x) {
  if (x.size() != alg.dim) {
    std::ostringstream os;
    os << "vector of length " << x.size() << " for algebra of dim " << alg.dim;
    throw ShapeMismatch(os.str());
  }
}
}  // namespace

Vec multiply(const FDAlgebra& alg, const Vec& x, const Vec& y) {
  require_len(alg, x);
  require_len(alg, y);
  Vec out = Vec::Zero(alg.dim);
  for (int i = 0; i < alg.dim; ++i) {
    if (x(i) == cd(0)) continue;
    for (int j = 0; j < alg.dim; ++j) {
      if (y(j) == cd(0)) continue;
      const cd w = x(i) * y(j);
      for (const auto& e : alg.product_of(i, j)) out(e.k) += w * e.c;
    }
  }
  return out;
}

Vec star(const FDAlgebra& alg, const Vec& x) {
  require_len(alg, x);
  return alg.star * x.conjugate();
}

cd trace(const FDAlgebra& alg, const Vec& x) {
  require_len(alg, x);
  return (alg.trace.transpose() * x)(0);
}

cd gns_inner(const FDAlgebra& alg, const Vec& x, const Vec& y) { return trace(alg, multiply(alg, star(alg, y), x)); }

Mat gram(const FDAlgebra& alg) {
  const int n = alg.dim;
  Mat G = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const Vec bj_star = alg.star.col(j);  // b_j^* (basis vectors are real)
    for (int l = 0; l < n; ++l) {
      if (bj_star(l) == cd(0)) continue;
      for (int i = 0; i < n; ++i)
        for (const auto& e : alg.product_of(l, i)) G(i, j) += bj_star(l) * e.c * alg.trace(e.k);
    }
  }
  return G;
}

ValidationReport validate(const FDAlgebra& alg, double tol) {
  check_shapes(alg);
  ValidationReport rep;
  const int n = alg.dim;
  using Sparse = std::vector<StructEntry>;

  std::vector<Sparse> star_cols(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      if (alg.star(l, j) != cd(0)) star_cols[j].push_back({l, alg.star(l, j)});

  Vec acc = Vec::Zero(n);
  std::vector<int> touched;
  auto add = [&](int k, cd c) {
    if (acc(k) == cd(0)) touched.push_back(k);
    acc(k) += c;
  };
  auto drain = [&]() {
    double m = 0.0;
    for (int k : touched) {
      m = std::max(m, std::abs(acc(k)));
      acc(k) = 0.0;
    }
    touched.clear();
    return m;
  };

  double assoc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        for (const auto& e : alg.product_of(i, j))
          for (const auto& f : alg.product_of(e.k, k)) add(f.k, e.c * f.c);
        for (const auto& e : alg.product_of(j, k))
          for (const auto& f : alg.product_of(i, e.k)) add(f.k, -e.c * f.c);
        assoc = std::max(assoc, drain());
      }
  rep.residuals["associativity"] = assoc;

  double unit = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      if (alg.unit(l) == cd(0)) continue;
      for (const auto& e : alg.product_of(l, i)) add(e.k, alg.unit(l) * e.c);
    }
    add(i, -1.0);
    unit = std::max(unit, drain());
    for (int l = 0; l < n; ++l) {
      if (alg.unit(l) == cd(0)) continue;
      for (const auto& e : alg.product_of(i, l)) add(e.k, alg.unit(l) * e.c);
    }
    add(i, -1.0);
    unit = std::max(unit, drain());
  }
  rep.residuals["unit"] = unit;

  double inv = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // (b_i b_j)^* against b_j^* b_i^*
      for (const auto& e : alg.product_of(i, j))
        for (const auto& s : star_cols[e.k]) add(s.k, std::conj(e.c) * s.c);
      for (const auto& s : star_cols[j])
        for (const auto& t : star_cols[i])
          for (const auto& e : alg.product_of(s.k, t.k)) add(e.k, -s.c * t.c * e.c);
      inv = std::max(inv, drain());
    }
  rep.residuals["star_antimultiplicative"] = inv;
  rep.residuals["star_involutive"] = max_abs(Mat(alg.star * alg.star.conjugate() - Mat::Identity(n, n)));
  {
    // conjugate-linearity on a fixed probe
    Rng rng(17);
    Vec x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = rng.complex_normal();
      y(i) = rng.complex_normal();
    }
    const cd a(0.3, -1.2);
    const Vec lhs = star(alg, a * x + y);
    const Vec rhs = std::conj(a) * star(alg, x) + star(alg, y);
    rep.residuals["star_conjugate_linear"] = max_abs(Vec(lhs - rhs));
  }

  rep.residuals["trace_unital"] = std::abs(trace(alg, alg.unit) - cd(1.0));
  double tr = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      cd s = 0.0;
      for (const auto& e : alg.product_of(i, j)) s += e.c * alg.trace(e.k);
      for (const auto& e : alg.product_of(j, i)) s -= e.c * alg.trace(e.k);
      tr = std::max(tr, std::abs(s));
    }
  rep.residuals["trace_tracial"] = tr;

  const Mat G = gram(alg);
  rep.residuals["gram_hermitian"] = max_abs(Mat(G - G.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat((G + G.adjoint()) * 0.5), Eigen::EigenvaluesOnly);
  rep.min_gram_eigenvalue = es.eigenvalues()(0);

  for (const auto& [name, r] : rep.residuals)
    if (!(r <= tol)) rep.failures.push_back(name);
  if (!(rep.min_gram_eigenvalue > tol)) rep.failures.push_back("trace_faithful");
  rep.pass = rep.failures.empty();
  return rep;
}

AntilinearOp tomita_j(const FDAlgebra& alg) { return AntilinearOp{alg.star}; }

GNSSpace GNSSpace::of(AlgebraPtr alg) {
  GNSSpace s;
  s.gram = steinlab::gram(*alg);
  s.gram = (s.gram + s.gram.adjoint()) * 0.5;
  Eigen::LLT<Mat> llt(s.gram);
  if (llt.info() != Eigen::Success) throw ShapeMismatch("GNS Gram matrix is not positive definite");
  s.chol = llt.matrixL();
  s.algebra = std::move(alg);
  return s;
}

double GNSSpace::chol_residual() const { return max_abs(Mat(chol * chol.adjoint() - gram)); }

Mat GNSSpace::whiten(const Mat& v) const { return chol.adjoint() * v; }

Mat GNSSpace::unwhiten(const Mat& w) const {
  return chol.adjoint().triangularView<Eigen::Upper>().solve(w);
}

}  // namespace steinlab
