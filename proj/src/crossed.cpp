#include "steinlab/crossed.hpp"

#include <algorithm>
#include <cmath>

#include "steinlab/errors.hpp"

namespace steinlab {

namespace {

using RMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RMat as_matrix(const Vec& xi, Eigen::Index n) { return Eigen::Map<const RMat>(xi.data(), n, n); }
Vec as_vector(const RMat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

}  // namespace

Vec CrossedContext::embed_small(const Vec& m) const {
  Vec out = Vec::Zero(big->dim);
  for (std::size_t i = 0; i < small_to_big.size(); ++i) out(small_to_big[i]) = m(static_cast<Eigen::Index>(i));
  return out;
}

Vec CrossedContext::extract_small(const Vec& xi) const {
  Vec out(static_cast<Eigen::Index>(small_to_big.size()));
  for (std::size_t i = 0; i < small_to_big.size(); ++i) out(static_cast<Eigen::Index>(i)) = xi(small_to_big[i]);
  return out;
}

Vec CrossedContext::unitary_pair(int a, int b) const { return kron(group_element(a), group_element(b)); }

Vec CrossedContext::act_units(const Vec& xi, int a, int b) const {
  const auto n = static_cast<Eigen::Index>(dim_cp());
  return as_vector(RMat(left_u[a] * as_matrix(xi, n) * right_u[b].transpose()));
}

Vec CrossedContext::right_units(const Vec& xi, int a, int b) const {
  const auto n = static_cast<Eigen::Index>(dim_cp());
  return as_vector(RMat(right_u[a] * as_matrix(xi, n) * left_u[b].transpose()));
}

Mat CrossedContext::ad(int g) const { return left_u[g] * right_u[action.group.inv(g)]; }

FDAlgebra crossed_product(const FDAlgebra& a, const GroupAction& act) {
  const FiniteGroup& grp = act.group;
  const int n = a.dim, order = grp.order, dim = n * order;
  FDAlgebra cp;
  cp.dim = dim;
  cp.mult.assign(static_cast<std::size_t>(dim) * dim, {});
  for (int g = 0; g < order; ++g) {
    const Mat& u = act.of(g);
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < order; ++h)
        for (int j = 0; j < n; ++j) {
          // (b_i u_g)(b_j u_h) = b_i alpha_g(b_j) u_{gh}
          Vec acc = Vec::Zero(n);
          for (int l = 0; l < n; ++l) {
            if (u(l, j) == cd(0)) continue;
            for (const auto& e : a.product_of(i, l)) acc(e.k) += u(l, j) * e.c;
          }
          auto& row = cp.mult[static_cast<std::size_t>(g * n + i) * dim + (h * n + j)];
          const int gh = grp.mul(g, h);
          for (int k = 0; k < n; ++k)
            if (std::abs(acc(k)) > 0) row.push_back({gh * n + k, acc(k)});
        }
  }
  cp.star = Mat::Zero(dim, dim);
  for (int g = 0; g < order; ++g) {
    const int gi = grp.inv(g);
    for (int i = 0; i < n; ++i) cp.star.block(gi * n, g * n + i, n, 1) = act.of(gi) * a.star.col(i);
  }
  cp.unit = Vec::Zero(dim);
  cp.unit.segment(grp.identity * n, n) = a.unit;
  cp.trace = Vec::Zero(dim);
  cp.trace.segment(grp.identity * n, n) = a.trace;
  cp.label = a.label + "x|" + grp.label;
  return cp;
}

CrossedContext make_crossed(const GroupAction& act, double tol) {
  validate_action(act, tol);
  CrossedContext c;
  c.action = act;
  c.base = act.algebra;
  c.product = std::make_shared<const FDAlgebra>(crossed_product(*act.algebra, act));
  c.small = std::make_shared<const FDAlgebra>(tensor(*c.base, opposite(*c.base)));
  c.big = std::make_shared<const FDAlgebra>(tensor(*c.product, opposite(*c.product)));
  const int n = c.dim_a(), dcp = c.dim_cp(), e = act.group.identity;
  c.embed_base = Mat::Zero(dcp, n);
  for (int i = 0; i < n; ++i) c.embed_base(e * n + i, i) = 1.0;
  for (int g = 0; g < act.group.order; ++g) {
    Vec u = Vec::Zero(dcp);
    u.segment(g * n, n) = c.base->unit;
    c.unitaries.push_back(u);
    c.left_u.push_back(c.product->left_mult(u));
    c.right_u.push_back(c.product->right_mult(u));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.small_to_big.push_back((e * n + i) * dcp + (e * n + j));
  return c;
}

Vec coset_mask(const CrossedContext& c, int g, int h) {
  const int n = c.dim_a(), dcp = c.dim_cp();
  Vec p = Vec::Zero(c.big->dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p((g * n + i) * dcp + (h * n + j)) = 1.0;
  return p;
}

CosetResiduals coset_residuals(const CrossedContext& c) {
  CosetResiduals r;
  const int order = c.order(), dn = c.big->dim;
  const FiniteGroup& grp = c.action.group;
  const Mat gb = gram(*c.big);
  std::vector<std::vector<Vec>> masks(static_cast<std::size_t>(order));
  Vec total = Vec::Zero(dn);
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h) {
      masks[g].push_back(coset_mask(c, g, h));
      total += masks[g][h];
    }
  r.partition = max_abs(Vec(total - Vec::Ones(dn)));
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h) {
      const auto p = masks[g][h].asDiagonal();
      // GNS self-adjointness: G p = p^H G
      r.partition = std::max(r.partition, max_abs(Mat(gb * p - p * gb)));
    }

  // commutation with the left action of iota(A (x) A^op)
  for (int i = 0; i < c.dim_a(); ++i)
    for (int j = 0; j < c.dim_a(); ++j) {
      const Mat l = c.big->left_mult(c.embed_small(kron(c.base->basis(i), c.base->basis(j))));
      for (int g = 0; g < order; ++g)
        for (int h = 0; h < order; ++h) {
          const auto p = masks[g][h].asDiagonal();
          r.commutant = std::max(r.commutant, max_abs(Mat(l * p - p * l)));
        }
    }

  for (int k = 0; k < order; ++k)
    for (int l = 0; l < order; ++l) {
      const Mat lm = c.big->left_mult(c.unitary_pair(k, l));
      for (int g = 0; g < order; ++g)
        for (int h = 0; h < order; ++h) {
          const int g2 = grp.mul(grp.inv(k), g), h2 = grp.mul(h, grp.inv(l));
          r.translation = std::max(
              r.translation, max_abs(Mat(masks[g][h].asDiagonal() * lm - lm * masks[g2][h2].asDiagonal())));
        }
    }

  // J v = S conj(v) and p is real, so J p = p' J reads S p = p' S
  const Mat& s = c.big->star;
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h)
      r.tomita = std::max(r.tomita, max_abs(Mat(s * masks[g][h].asDiagonal() -
                                                  masks[grp.inv(g)][grp.inv(h)].asDiagonal() * s)));
  return r;
}

Derivation extend(const CrossedContext& c, const Derivation& d, int h) {
  const FiniteGroup& grp = c.action.group;
  const int n = c.dim_a(), order = c.order();
  Derivation out;
  out.matrix = Mat::Zero(c.big->dim, c.dim_cp());
  for (int k = 0; k < order; ++k)
    for (int i = 0; i < n; ++i) {
      Vec acc = Vec::Zero(c.big->dim);
      for (int g = 0; g < order; ++g) {
        const Vec val = c.embed_small(d.matrix * c.action.of(g).col(i));
        acc += c.act_units(val, grp.inv(g), grp.mul(g, k));
      }
      out.matrix.col(k * n + i) = c.right_units(acc, grp.identity, h);
    }
  return out;
}

Derivation restrict(const CrossedContext& c, const Derivation& big, int g, int h) {
  const FiniteGroup& grp = c.action.group;
  const Vec mask = coset_mask(c, g, h);
  Derivation out;
  out.matrix = Mat(c.small->dim, c.dim_a());
  for (int i = 0; i < c.dim_a(); ++i) {
    const Vec xi = mask.cwiseProduct(Vec(big.matrix * c.embed_base.col(i)));
    out.matrix.col(i) = c.extract_small(c.right_units(xi, grp.inv(g), grp.inv(h)));
  }
  return out;
}

double covariance_residual(const CrossedContext& c, const Derivation& big) {
  const FiniteGroup& grp = c.action.group;
  double r = 0.0;
  for (int g = 0; g < c.order(); ++g) {
    const Mat ad = c.ad(g);
    const Mat lhs = big.matrix * ad;
    for (int b = 0; b < c.dim_cp(); ++b)
      r = std::max(r, max_abs(Vec(lhs.col(b) - c.act_units(big.matrix.col(b), g, grp.inv(g)))));
  }
  return r;
}

double vanishing_residual(const CrossedContext& c, const Derivation& big) {
  double r = 0.0;
  for (int g = 0; g < c.order(); ++g) r = std::max(r, max_abs(big(c.group_element(g))));
  return r;
}

bool is_covariant(const CrossedContext& c, const Derivation& big, double tol) {
  return covariance_residual(c, big) <= tol;
}

Mat twist_matrix(const CrossedContext& c, int h) {
  return kron(Mat(Mat::Identity(c.dim_a(), c.dim_a())), c.action.of(h));
}

Vec twist_action(const CrossedContext& c, const Vec& m, int h) { return twist_matrix(c, h) * m; }

Derivation vg_apply(const CrossedContext& c, const Derivation& big, int g) {
  const FiniteGroup& grp = c.action.group;
  const Mat ad = c.ad(g);
  const Mat moved = big.matrix * ad;
  Derivation out;
  out.matrix = Mat(big.matrix.rows(), big.matrix.cols());
  for (int b = 0; b < c.dim_cp(); ++b) out.matrix.col(b) = c.act_units(moved.col(b), grp.inv(g), g);
  return out;
}

void require_scaled(const CrossedContext& c, const std::vector<Vec>& y, double tol) {
  for (std::size_t k = 0; k < y.size(); ++k)
    for (int g = 0; g < c.order(); ++g) {
      const Vec v = c.ad(g) * y[k];
      const cd lambda = y[k].dot(v) / y[k].squaredNorm();
      if (max_abs(Vec(v - lambda * y[k])) > tol * std::max(1.0, y[k].norm()))
        throw GeneratingSetNotScaled("element " + std::to_string(k) + " is not an eigenvector of Ad u_" +
                                     std::to_string(g));
    }
}

std::vector<Vec> crossed_generators(const CrossedContext& c, const std::vector<Vec>& x) {
  std::vector<Vec> y;
  for (const auto& v : x) y.push_back(c.embed_base * v);
  for (int g = 0; g < c.order(); ++g) y.push_back(c.group_element(g));
  return y;
}

std::vector<Vec> group_basis(const CrossedContext& c) { return c.unitaries; }

}  // namespace steinlab
