#include "steinlab/vndim.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "steinlab/constructions.hpp"
#include "steinlab/errors.hpp"

namespace steinlab {

namespace {

// Block data in whitened frame coordinates: frame vector F c has GNS norm |L^H c|.
struct Prepared {
  Mat frame, gframe;
  Mat lower;  // H = F^H G F = L L^H
  Mat q;      // orthonormal, (slots*r) x rank
  Vec omega;  // L^{-1} F^H G 1
  int r = 0;
};

Mat lower_solve(const Mat& lower, const Mat& rhs) { return lower.triangularView<Eigen::Lower>().solve(rhs); }
Mat upper_solve(const Mat& lower, const Mat& rhs) {
  return lower.adjoint().triangularView<Eigen::Upper>().solve(rhs);
}

Prepared prepare(const ModuleSubspace& sub, const ModuleBlock& b, const Mat& g, const RankPolicy& policy) {
  Prepared p;
  const int dn = sub.n0->dim;
  p.frame = b.frame.size() == 0 ? Mat(Mat::Identity(dn, dn)) : b.frame;
  p.gframe = b.gframe.size() == 0 ? Mat(g * p.frame) : b.gframe;
  p.r = static_cast<int>(p.frame.cols());
  Mat h = p.frame.adjoint() * p.gframe;
  h = (h + h.adjoint()) * 0.5;
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success) throw RankAmbiguous("module block frame is not linearly independent");
  p.lower = llt.matrixL();
  const Mat upper = p.lower.adjoint();
  Mat w(b.span.rows(), b.span.cols());
  for (int x = 0; x < sub.slots; ++x) w.middleRows(x * p.r, p.r) = upper * b.span.middleRows(x * p.r, p.r);
  p.q = b.span.cols() == 0 ? Mat(w.rows(), 0) : column_space(w, policy);
  p.omega = lower_solve(p.lower, Mat(p.gframe.adjoint() * sub.n0->unit));
  return p;
}

// Whitened block coordinates -> ambient vectors, slot by slot.
Mat to_ambient(const Prepared& p, const Mat& white, int slots, int dn) {
  Mat out(static_cast<Eigen::Index>(slots) * dn, white.cols());
  for (int x = 0; x < slots; ++x)
    out.middleRows(static_cast<Eigen::Index>(x) * dn, dn) = p.frame * upper_solve(p.lower, white.middleRows(x * p.r, p.r));
  return out;
}

Mat project(const std::vector<Prepared>& blocks, const Mat& v, int slots, int dn) {
  Mat out = Mat::Zero(v.rows(), v.cols());
  for (const auto& p : blocks) {
    if (p.q.cols() == 0) continue;
    Mat z(static_cast<Eigen::Index>(slots) * p.r, v.cols());
    for (int x = 0; x < slots; ++x)
      z.middleRows(x * p.r, p.r) =
          lower_solve(p.lower, Mat(p.gframe.adjoint() * v.middleRows(static_cast<Eigen::Index>(x) * dn, dn)));
    out += to_ambient(p, p.q * (p.q.adjoint() * z), slots, dn);
  }
  return out;
}

RVec gns_norms(const Mat& v, const Mat& g, int slots, int dn) {
  RVec out = RVec::Zero(v.cols());
  for (int x = 0; x < slots; ++x) {
    const auto vx = v.middleRows(static_cast<Eigen::Index>(x) * dn, dn);
    const Mat gv = g * vx;
    for (Eigen::Index c = 0; c < v.cols(); ++c) out(c) += std::max(0.0, vx.col(c).dot(gv.col(c)).real());
  }
  return out.cwiseSqrt();
}

long long default_qmax(const ModuleSubspace& sub) {
  return std::max<long long>(1000, 16LL * sub.n0->dim);
}

}  // namespace

int ModuleSubspace::columns() const {
  int c = 0;
  for (const auto& b : blocks) c += static_cast<int>(b.span.cols());
  return c;
}

Mat ModuleSubspace::materialize() const {
  const int dn = n0->dim;
  Mat out(static_cast<Eigen::Index>(slots) * dn, columns());
  Eigen::Index col = 0;
  for (const auto& b : blocks) {
    const Mat f = b.frame.size() == 0 ? Mat(Mat::Identity(dn, dn)) : b.frame;
    const auto r = f.cols();
    for (int x = 0; x < slots; ++x)
      out.block(static_cast<Eigen::Index>(x) * dn, col, dn, b.span.cols()) = f * b.span.middleRows(x * r, r);
    col += b.span.cols();
  }
  return out;
}

ModuleSubspace full_ambient(AlgebraPtr n0, int slots, std::vector<Vec> closure_elems) {
  const auto total = static_cast<Eigen::Index>(slots) * n0->dim;
  return from_vectors(std::move(n0), slots, Mat::Identity(total, total), std::move(closure_elems));
}

ModuleSubspace from_vectors(AlgebraPtr n0, int slots, const Mat& vectors, std::vector<Vec> closure_elems) {
  if (vectors.rows() != static_cast<Eigen::Index>(slots) * n0->dim)
    throw ShapeMismatch("module vectors must have slots*dim(N0) rows");
  ModuleSubspace s;
  s.n0 = std::move(n0);
  s.slots = slots;
  s.blocks.push_back({Mat(), Mat(), vectors});
  s.closure_elems = std::move(closure_elems);
  return s;
}

std::vector<Vec> tensor_generators(const FDAlgebra& a, const std::vector<Vec>& x) {
  std::vector<Vec> out;
  for (const auto& v : x) {
    out.push_back(kron(v, a.unit));
    out.push_back(kron(a.unit, v));
  }
  return out;
}

VnResult vn_dimension(const ModuleSubspace& sub, const VnOptions& opt) {
  const int dn = sub.n0->dim, slots = sub.slots;
  const Mat g = gram(*sub.n0);
  std::vector<Prepared> blocks;
  VnResult res;
  for (const auto& b : sub.blocks) {
    blocks.push_back(prepare(sub, b, g, opt.policy));
    const Prepared& p = blocks.back();
    res.rank += static_cast<int>(p.q.cols());
    for (int x = 0; x < slots; ++x) res.value += (p.q.middleRows(x * p.r, p.r).adjoint() * p.omega).squaredNorm();
  }

  // Right closure: span vectors times each generator of N0 must stay in the span.
  if (res.rank > 0 && !sub.closure_elems.empty()) {
    double per_vector = 2.0 * dn * dn;
    for (const auto& p : blocks) per_vector += 4.0 * dn * p.r;
    const double cost = per_vector * slots * res.rank * static_cast<double>(sub.closure_elems.size());
    res.closure_exhaustive = cost <= static_cast<double>(opt.exhaustive_budget);

    Mat tests;
    if (res.closure_exhaustive) {
      tests = Mat(static_cast<Eigen::Index>(slots) * dn, res.rank);
      Eigen::Index col = 0;
      for (const auto& p : blocks) {
        if (p.q.cols() == 0) continue;
        tests.middleCols(col, p.q.cols()) = to_ambient(p, p.q, slots, dn);
        col += p.q.cols();
      }
    } else {
      Rng rng(opt.seed ^ 0x632be59bd9b4e019ULL);
      const int probes = 6;
      tests = Mat::Zero(static_cast<Eigen::Index>(slots) * dn, probes);
      for (const auto& p : blocks) {
        if (p.q.cols() == 0) continue;
        Mat coef(p.q.cols(), probes);
        for (Eigen::Index i = 0; i < coef.rows(); ++i)
          for (int j = 0; j < probes; ++j) coef(i, j) = rng.complex_normal();
        tests += to_ambient(p, p.q * coef, slots, dn);
      }
    }
    const RVec base = gns_norms(tests, g, slots, dn);
    for (const auto& m : sub.closure_elems) {
      const Mat rm = sub.n0->right_mult(m);
      Mat moved(tests.rows(), tests.cols());
      for (int x = 0; x < slots; ++x)
        moved.middleRows(static_cast<Eigen::Index>(x) * dn, dn) = rm * tests.middleRows(static_cast<Eigen::Index>(x) * dn, dn);
      const RVec err = gns_norms(Mat(moved - project(blocks, moved, slots, dn)), g, slots, dn);
      const RVec scale = gns_norms(moved, g, slots, dn);
      for (Eigen::Index c = 0; c < err.size(); ++c) {
        const double denom = std::max({scale(c), base(c), 1e-300});
        res.closure_residual = std::max(res.closure_residual, err(c) / denom);
      }
    }
    if (res.closure_residual > opt.tol)
      throw NotRightClosed("span is not invariant under the right action (residual " +
                           std::to_string(res.closure_residual) + ")");
  }
  res.rational = rationalize(res.value, opt.qmax > 0 ? opt.qmax : default_qmax(sub), 1e-6);
  return res;
}

ModuleSubspace phi_x(const DerivationSpace& space, const std::vector<Vec>& x) {
  const FDAlgebra& a = *space.algebra;
  if (x.empty() || !generates_plain(a, x)) throw NotGenerating("X does not generate the algebra");
  ModuleSubspace s;
  s.n0 = std::make_shared<const FDAlgebra>(tensor(a, opposite(a)));
  s.slots = static_cast<int>(x.size());
  const ProjectionFrames& f = *space.frames;
  for (const auto& b : space.blocks) {
    const int r = space.block_rank(b);
    const Mat& u = f.left_ideal[b.left];
    const Mat& v = f.right_ideal[b.right];
    ModuleBlock mb;
    mb.frame = space.frame(b);
    mb.gframe = kron(Mat(f.gram_a * u), Mat(f.gram_a * v));
    mb.span = Mat::Zero(static_cast<Eigen::Index>(s.slots) * r, b.coeffs.cols());
    for (int xi = 0; xi < s.slots; ++xi)
      for (int k = 0; k < a.dim; ++k)
        if (x[xi](k) != cd(0)) mb.span.middleRows(xi * r, r) += x[xi](k) * b.coeffs.middleRows(k * r, r);
    s.blocks.push_back(std::move(mb));
  }
  s.closure_elems = tensor_generators(a, hermitian_generators(a));
  if (phi_x_defect(space, x) != 0) throw NotGenerating("evaluation on X is not injective");
  return s;
}

int phi_x_defect(const DerivationSpace& space, const std::vector<Vec>& x) {
  const ProjectionFrames& f = *space.frames;
  int rank = 0;
  for (const auto& b : space.blocks) {
    if (b.coeffs.cols() == 0) continue;
    const int r = space.block_rank(b);
    const Mat& u = f.left_ideal[b.left];
    const Mat& v = f.right_ideal[b.right];
    const Mat h = kron(Mat(u.adjoint() * f.gram_a * u), Mat(v.adjoint() * f.gram_a * v));
    const Mat upper = Eigen::LLT<Mat>(h).matrixU();
    Mat w = Mat::Zero(static_cast<Eigen::Index>(x.size()) * r, b.coeffs.cols());
    for (std::size_t xi = 0; xi < x.size(); ++xi) {
      Mat slot = Mat::Zero(r, b.coeffs.cols());
      for (Eigen::Index k = 0; k < x[xi].size(); ++k)
        if (x[xi](k) != cd(0)) slot += x[xi](k) * b.coeffs.middleRows(k * r, r);
      w.middleRows(static_cast<Eigen::Index>(xi) * r, r) = upper * slot;
    }
    rank += static_cast<int>(column_space(w).cols());
  }
  return rank - space.size();
}

ModuleSubspace phi_x_materialized(AlgebraPtr a, AlgebraPtr n, const std::vector<Derivation>& ds,
                                  const std::vector<Vec>& x, std::vector<Vec> closure_elems) {
  if (x.empty() || !generates_plain(*a, x)) throw NotGenerating("X does not generate the algebra");
  const int dn = n->dim, slots = static_cast<int>(x.size());
  Mat v(static_cast<Eigen::Index>(slots) * dn, static_cast<Eigen::Index>(ds.size()));
  for (std::size_t j = 0; j < ds.size(); ++j)
    for (int xi = 0; xi < slots; ++xi)
      v.block(static_cast<Eigen::Index>(xi) * dn, static_cast<Eigen::Index>(j), dn, 1) = ds[j](x[xi]);
  return from_vectors(std::move(n), slots, v, std::move(closure_elems));
}

ModuleSubspace restrict_scalars(const ModuleSubspace& sub, const CrossedContext& c) {
  if (sub.n0->dim != c.big->dim) throw ShapeMismatch("restrict_scalars expects a subspace over the big tensor algebra");
  const FiniteGroup& grp = c.action.group;
  const int order = c.order(), db = c.big->dim, ds = c.small->dim;
  const Mat v = sub.materialize();
  std::vector<Vec> masks;
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h) masks.push_back(coset_mask(c, g, h));
  const int slots = sub.slots * order * order;
  Mat out(static_cast<Eigen::Index>(slots) * ds, v.cols());
  for (Eigen::Index col = 0; col < v.cols(); ++col)
    for (int x = 0; x < sub.slots; ++x) {
      const Vec xi = v.block(static_cast<Eigen::Index>(x) * db, col, db, 1);
      for (int g = 0; g < order; ++g)
        for (int h = 0; h < order; ++h) {
          const Vec part = masks[static_cast<std::size_t>(g * order + h)].cwiseProduct(xi);
          const int slot = (x * order + g) * order + h;
          out.block(static_cast<Eigen::Index>(slot) * ds, col, ds, 1) =
              c.extract_small(c.act_units(part, grp.inv(g), grp.inv(h)));
        }
    }
  return from_vectors(c.small, slots, out, tensor_generators(*c.base, hermitian_generators(*c.base)));
}

ModuleSubspace untwist(const ModuleSubspace& sub, const CrossedContext& c, int h) {
  if (sub.n0->dim != c.small->dim) throw ShapeMismatch("untwist expects a subspace over A (x) A^op");
  const Mat w = twist_matrix(c, c.action.group.inv(h));
  ModuleSubspace out = sub;
  const int dn = sub.n0->dim;
  for (auto& b : out.blocks) {
    b.frame = w * (b.frame.size() == 0 ? Mat(Mat::Identity(dn, dn)) : b.frame);
    b.gframe = Mat();
  }
  return out;
}

IndependenceReport generating_set_independence(const DerivationSpace& space, const std::vector<Vec>& x1,
                                               const std::vector<Vec>& x2, const VnOptions& opt) {
  IndependenceReport r;
  r.dim1 = vn_dimension(phi_x(space, x1), opt).value;
  r.dim2 = vn_dimension(phi_x(space, x2), opt).value;
  r.difference = std::abs(r.dim1 - r.dim2);
  r.pass = r.difference <= opt.tol;
  return r;
}

}  // namespace steinlab
