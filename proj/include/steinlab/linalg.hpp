#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace steinlab {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Deterministic across platforms: raw 64-bit output mapped by hand, no std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next();
  double uniform();  // [0,1)
  double normal();
  cd complex_normal() { return {normal(), normal()}; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct RankPolicy {
  double rel = 1e-10;
  double abs = 1e-10;
  double min_gap = 10.0;
};

struct NullspaceResult {
  Mat basis;                 // orthonormal columns (Euclidean)
  RVec singular_values;      // descending
  double threshold = 0.0;
  double gap_ratio = 0.0;    // smallest kept / largest dropped; inf if one side empty
  int rank = 0;
};

// Singular values below max(scale*rel, abs) count as zero; a kept/dropped ratio
// under min_gap raises RankAmbiguous.
NullspaceResult nullspace(const Mat& M, const RankPolicy& policy = {});

// Orthonormal (Euclidean) basis of the column space, same rank rule.
Mat column_space(const Mat& M, const RankPolicy& policy = {});

// Modified Gram-Schmidt with one reorthogonalization pass against the Hermitian
// positive definite form `gram`. Returns columns orthonormal for v^H gram w.
Mat gram_orthonormalize(const Mat& S, const Mat& gram, const RankPolicy& policy = {});

Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);

double max_abs(const Mat& m);
double max_abs(const Vec& v);

// Hermitian square-root inverse of a positive definite matrix.
Mat inv_sqrt_psd(const Mat& h);

struct Rational {
  long long p = 0;
  long long q = 1;
  bool exact = false;  // true when within tolerance of p/q
  std::string str() const;
};

// Nearest p/q with q <= qmax; cosmetic only.
Rational rationalize(double x, long long qmax, double tol = 1e-6);

}  // namespace steinlab
