#include "steinlab/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "steinlab/errors.hpp"

namespace steinlab {

std::uint64_t Rng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u <= 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double t = 2.0 * M_PI * v;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

namespace {

struct SvdParts {
  RVec sv;
  Mat v;  // full right singular basis (cols x cols)
};

SvdParts svd_right(const Mat& M) {
  const Eigen::Index rows = M.rows(), cols = M.cols();
  SvdParts out;
  if (cols == 0) {
    out.v = Mat(0, 0);
    return out;
  }
  if (rows == 0) {
    out.sv = RVec(0);
    out.v = Mat::Identity(cols, cols);
    return out;
  }
  Mat work;
  if (rows > 2 * cols) {
    Eigen::HouseholderQR<Mat> qr(M);
    work = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  } else {
    work = M;
  }
  Eigen::BDCSVD<Mat> svd(work, Eigen::ComputeFullV);
  out.sv = svd.singularValues();
  out.v = svd.matrixV();
  // BDCSVD can return a wrong basis when singular values are heavily repeated (exact zeros
  // and equal nonzeros); each column must reproduce its singular value, else redo with Jacobi.
  const double slack = 1e-10 * std::max(1.0, out.sv.size() ? out.sv(0) : 0.0);
  const RVec norms = (work * out.v).colwise().norm();
  bool ok = true;
  for (Eigen::Index k = 0; k < cols && ok; ++k) {
    const double expect = k < out.sv.size() ? out.sv(k) : 0.0;
    ok = std::abs(norms(k) - expect) <= slack;
  }
  if (!ok) {
    Eigen::JacobiSVD<Mat> jac(work, Eigen::ComputeFullV);
    out.sv = jac.singularValues();
    out.v = jac.matrixV();
  }
  return out;
}

// number of singular values kept and the gap diagnostic
int decide_rank(const RVec& sv, const RankPolicy& p, double* thr, double* gap) {
  const double scale = sv.size() ? std::max(1.0, sv(0)) : 1.0;
  *thr = std::max(scale * p.rel, p.abs);
  int rank = 0;
  while (rank < sv.size() && sv(rank) >= *thr) ++rank;
  *gap = std::numeric_limits<double>::infinity();
  if (rank > 0 && rank < sv.size()) {
    const double dropped = sv(rank);
    *gap = dropped > 0 ? sv(rank - 1) / dropped : std::numeric_limits<double>::infinity();
    if (*gap < p.min_gap) {
      std::ostringstream os;
      os << "singular values straddle the cut (" << sv(rank - 1) << " vs " << dropped
         << ", threshold " << *thr << ")";
      throw RankAmbiguous(os.str());
    }
  }
  return rank;
}

}  // namespace

NullspaceResult nullspace(const Mat& M, const RankPolicy& policy) {
  NullspaceResult r;
  SvdParts parts = svd_right(M);
  r.singular_values = parts.sv;
  r.rank = decide_rank(parts.sv, policy, &r.threshold, &r.gap_ratio);
  const Eigen::Index cols = M.cols();
  r.basis = parts.v.rightCols(cols - r.rank);
  return r;
}

Mat column_space(const Mat& M, const RankPolicy& policy) {
  if (M.cols() == 0 || M.rows() == 0) return Mat(M.rows(), 0);
  Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeThinU);
  double thr = 0, gap = 0;
  const int rank = decide_rank(svd.singularValues(), policy, &thr, &gap);
  Mat u = svd.matrixU().leftCols(rank);
  // same guard as svd_right: the kept columns must capture M
  const double slack = 1e-10 * std::max(1.0, svd.singularValues()(0)) * std::sqrt(double(M.cols()));
  if (max_abs(Mat(M - u * (u.adjoint() * M))) > std::max(slack, thr)) {
    Eigen::JacobiSVD<Mat> jac(M, Eigen::ComputeThinU);
    u = jac.matrixU().leftCols(decide_rank(jac.singularValues(), policy, &thr, &gap));
  }
  return u;
}

Mat gram_orthonormalize(const Mat& S, const Mat& gram, const RankPolicy& policy) {
  const Eigen::Index n = S.rows();
  std::vector<Vec> kept;
  std::vector<Vec> kept_g;  // gram * q, cached for projections
  double min_kept = std::numeric_limits<double>::infinity();
  double max_dropped = 0.0;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    scale = std::max(scale, std::sqrt(std::max(0.0, (S.col(j).adjoint() * gram * S.col(j))(0).real())));
  }
  const double floor = std::max(scale * policy.rel, policy.abs);
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    Vec v = S.col(j);
    const double n0 = std::sqrt(std::max(0.0, (v.adjoint() * gram * v)(0).real()));
    if (n0 < floor) {
      max_dropped = std::max(max_dropped, n0 / std::max(scale, 1.0));
      continue;
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < kept.size(); ++k) {
        const cd c = kept_g[k].dot(v);  // conj(gq)^T v = q^H gram v
        v -= c * kept[k];
      }
    }
    const double n1 = std::sqrt(std::max(0.0, (v.adjoint() * gram * v)(0).real()));
    const double ratio = n1 / n0;
    if (ratio < policy.rel * 10 || n1 < floor) {
      max_dropped = std::max(max_dropped, ratio);
      continue;
    }
    min_kept = std::min(min_kept, ratio);
    v /= n1;
    kept.push_back(v);
    kept_g.push_back(gram * v);
  }
  if (!kept.empty() && max_dropped > 0 && min_kept / max_dropped < policy.min_gap) {
    std::ostringstream os;
    os << "Gram-Schmidt residual ratios straddle the cut (" << min_kept << " vs " << max_dropped << ")";
    throw RankAmbiguous(os.str());
  }
  Mat Q(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) Q.col(static_cast<Eigen::Index>(k)) = kept[k];
  return Q;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Mat inv_sqrt_psd(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  RVec d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(d(i));
  return es.eigenvectors() * d.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

std::string Rational::str() const {
  if (!exact) return "";
  if (q == 1) return std::to_string(p);
  return std::to_string(p) + "/" + std::to_string(q);
}

Rational rationalize(double x, long long qmax, double tol) {
  Rational best;
  double best_err = std::numeric_limits<double>::infinity();
  if (qmax < 1) qmax = 1;
  for (long long q = 1; q <= qmax; ++q) {
    const long long p = std::llround(x * static_cast<double>(q));
    const double err = std::abs(x - static_cast<double>(p) / static_cast<double>(q));
    if (err < best_err - 1e-15) {
      best_err = err;
      best.p = p;
      best.q = q;
    }
    if (err < 1e-12) break;
  }
  best.exact = best_err <= tol;
  return best;
}

}  // namespace steinlab
