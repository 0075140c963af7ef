#pragma once

// Reference computations for tests. They share only FDAlgebra's raw structure constants
// with the library: no solver, frame, whitening or crossed-product code is reused.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <vector>

#include "steinlab/algebra.hpp"
#include "steinlab/constructions.hpp"

namespace oracle {

using steinlab::cd;
using steinlab::FDAlgebra;
using steinlab::Mat;
using steinlab::Vec;

inline Mat left_mult(const FDAlgebra& a, int i) {
  Mat m = Mat::Zero(a.dim, a.dim);
  for (int j = 0; j < a.dim; ++j)
    for (const auto& e : a.product_of(i, j)) m(e.k, j) += e.c;
  return m;
}

inline Mat right_mult(const FDAlgebra& a, int i) {
  Mat m = Mat::Zero(a.dim, a.dim);
  for (int j = 0; j < a.dim; ++j)
    for (const auto& e : a.product_of(j, i)) m(e.k, j) += e.c;
  return m;
}

inline Mat combine(const std::vector<Mat>& ms, const Vec& x) {
  Mat out = Mat::Zero(ms[0].rows(), ms[0].cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) out += x(i) * ms[static_cast<std::size_t>(i)];
  return out;
}

// G(i,j) = tau(b_j^* b_i), straight from the definitions.
inline Mat gram(const FDAlgebra& a) {
  Mat g(a.dim, a.dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) {
      const Vec bj_star = a.star.col(j);  // b_j^* = star * conj(e_j)
      Vec prod = Vec::Zero(a.dim);
      for (int k = 0; k < a.dim; ++k)
        if (bj_star(k) != cd(0))
          for (const auto& e : a.product_of(k, i)) prod(e.k) += bj_star(k) * e.c;
      g(i, j) = a.trace.transpose() * prod;
    }
  return g;
}

// Crossed product on basis b_i u_g at g*dim + i.
inline FDAlgebra crossed_product(const steinlab::GroupAction& act) {
  const FDAlgebra& a = *act.algebra;
  const auto& grp = act.group;
  const int n = a.dim, order = grp.order, d = n * order;
  std::vector<std::vector<std::vector<cd>>> c(d, std::vector<std::vector<cd>>(d, std::vector<cd>(d, 0.0)));
  std::vector<Mat> left;
  for (int i = 0; i < n; ++i) left.push_back(left_mult(a, i));
  for (int g = 0; g < order; ++g)
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < order; ++h)
        for (int j = 0; j < n; ++j) {
          const Vec v = left[static_cast<std::size_t>(i)] * act.of(g).col(j);  // b_i alpha_g(b_j)
          const int gh = grp.mul(g, h);
          for (int k = 0; k < n; ++k) c[g * n + i][h * n + j][gh * n + k] = v(k);
        }
  Mat star = Mat::Zero(d, d);
  for (int g = 0; g < order; ++g)
    for (int i = 0; i < n; ++i) {
      const int gi = grp.inv(g);
      star.block(gi * n, g * n + i, n, 1) = act.of(gi) * a.star.col(i);  // (b_i u_g)^* = alpha_{g^-1}(b_i^*) u_{g^-1}
    }
  Vec unit = Vec::Zero(d), tr = Vec::Zero(d);
  unit.segment(grp.identity * n, n) = a.unit;
  tr.segment(grp.identity * n, n) = a.trace;
  return steinlab::algebra_from_dense(d, c, star, unit, tr, "oracle crossed product");
}

struct DerivationBasis {
  std::vector<Mat> maps;  // (dim*dim) x dim, column j = d(b_j), index i*dim + k for b_i (x) b_k^op
};

// All linear d : A -> A (x) A^op with d(x b) = x.d(b) + d(x).b for x in `gens` and every basis b.
// Solved through the normal matrix and a Hermitian eigensolver.
inline DerivationBasis derivations(const FDAlgebra& a, const std::vector<Vec>& gens) {
  const int n = a.dim, nn = n * n;
  std::vector<Mat> left, right;
  for (int i = 0; i < n; ++i) {
    left.push_back(left_mult(a, i));
    right.push_back(right_mult(a, i));
  }
  // unknown vector: column-major D, entry (r, j) at j*nn + r
  const Eigen::Index unknowns = static_cast<Eigen::Index>(nn) * n;
  Mat normal = Mat::Zero(unknowns, unknowns);
  for (const Vec& x : gens) {
    const Mat lx = combine(left, x), rx = combine(right, x);
    for (int b = 0; b < n; ++b) {
      // rows: d(x b) - x.d(b) - d(x).b, each an nn-vector linear in D
      Mat rows = Mat::Zero(nn, unknowns);
      const Vec xb = lx.col(b);
      for (int j = 0; j < n; ++j)
        if (xb(j) != cd(0)) rows.block(0, j * nn, nn, nn) += xb(j) * Mat::Identity(nn, nn);
      // x.(b_p (x) b_q^op) = (x b_p) (x) b_q^op: left mult on the first index
      rows.block(0, b * nn, nn, nn) -= Eigen::kroneckerProduct(lx, Mat::Identity(n, n)).eval();
      // (b_p (x) b_q^op).b = b_p (x) (b_q b)^op: right mult on the second index
      const Mat rb = right[static_cast<std::size_t>(b)];
      for (int j = 0; j < n; ++j)
        if (x(j) != cd(0))
          rows.block(0, j * nn, nn, nn) -= x(j) * Eigen::kroneckerProduct(Mat::Identity(n, n), rb).eval();
      normal.noalias() += rows.adjoint() * rows;
    }
  }
  // d(1) = 0
  {
    Mat rows = Mat::Zero(nn, unknowns);
    for (int j = 0; j < n; ++j)
      if (a.unit(j) != cd(0)) rows.block(0, j * nn, nn, nn) += a.unit(j) * Mat::Identity(nn, nn);
    normal.noalias() += rows.adjoint() * rows;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(normal);
  const double top = std::max(1.0, es.eigenvalues().maxCoeff());
  DerivationBasis out;
  for (Eigen::Index k = 0; k < unknowns; ++k) {
    if (es.eigenvalues()(k) > 1e-16 * top * unknowns) break;
    const Vec v = es.eigenvectors().col(k);
    out.maps.push_back(Eigen::Map<const Mat>(v.data(), nn, n));
  }
  return out;
}

inline std::vector<Vec> basis(const FDAlgebra& a) {
  std::vector<Vec> out;
  for (int i = 0; i < a.dim; ++i) out.push_back(Vec::Unit(a.dim, i));
  return out;
}

// Sum over slots x of <P Omega_x, Omega_x> for P the GNS-orthogonal projection onto
// span{(d(x))_x}. Uses a pseudo-inverse of the coefficient Gram matrix.
inline double vn_dimension(const FDAlgebra& a, const DerivationBasis& ders, const std::vector<Vec>& xs) {
  if (ders.maps.empty()) return 0.0;
  const int nn = a.dim * a.dim;
  const Mat ga = oracle::gram(a);
  const Mat gn = Eigen::kroneckerProduct(ga, ga).eval();
  const Eigen::Index slots = static_cast<Eigen::Index>(xs.size());
  Mat s(nn * slots, static_cast<Eigen::Index>(ders.maps.size()));
  for (std::size_t i = 0; i < ders.maps.size(); ++i)
    for (Eigen::Index x = 0; x < slots; ++x) s.block(x * nn, i, nn, 1) = ders.maps[i] * xs[static_cast<std::size_t>(x)];
  Mat gbig = Mat::Zero(nn * slots, nn * slots);
  for (Eigen::Index x = 0; x < slots; ++x) gbig.block(x * nn, x * nn, nn, nn) = gn;
  const Mat h = s.adjoint() * gbig * s;
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const double cut = 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff());
  Mat hinv = Mat::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    if (es.eigenvalues()(k) > cut)
      hinv += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint() / es.eigenvalues()(k);
  // unit of N = 1 (x) 1^op
  const Vec one = Eigen::kroneckerProduct(a.unit, a.unit).eval();
  double total = 0.0;
  for (Eigen::Index x = 0; x < slots; ++x) {
    Vec omega = Vec::Zero(nn * slots);
    omega.segment(x * nn, nn) = one;
    const Vec c = s.adjoint() * gbig * omega;
    total += (c.adjoint() * hinv * c)(0).real();
  }
  return total;
}

inline double der_dimension(const FDAlgebra& a) {
  const auto xs = basis(a);
  return vn_dimension(a, derivations(a, xs), xs);
}

// Generating set of a crossed product built by crossed_product(): A u_e together with the u_g.
inline std::vector<Vec> crossed_generators(const steinlab::GroupAction& act) {
  const int n = act.algebra->dim, order = act.group.order, e = act.group.identity;
  std::vector<Vec> out;
  for (int i = 0; i < n; ++i) out.push_back(Vec::Unit(n * order, e * n + i));
  for (int g = 0; g < order; ++g) {
    Vec u = Vec::Zero(n * order);
    u.segment(g * n, n) = act.algebra->unit;
    out.push_back(u);
  }
  return out;
}

inline double crossed_der_dimension(const steinlab::GroupAction& act) {
  const FDAlgebra cp = crossed_product(act);
  const auto xs = crossed_generators(act);
  return vn_dimension(cp, derivations(cp, xs), xs);
}

inline double multimatrix_formula(const std::vector<steinlab::Block>& blocks) {
  double s = 0.0;
  for (const auto& b : blocks) s += b.alpha * b.alpha / (double(b.n) * b.n);
  return 1.0 - s;
}

}  // namespace oracle
