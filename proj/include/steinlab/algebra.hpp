#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "steinlab/linalg.hpp"

namespace steinlab {

struct StructEntry {
  int k;
  cd c;
};

// Finite-dimensional tracial *-algebra on a fixed basis b_0..b_{n-1}.
// Structure constants are stored sparsely: mult[i*n+j] lists (k, c) with b_i b_j = sum c b_k.
// The involution acts as x -> star * conj(x); column i of `star` holds b_i^*.
struct FDAlgebra {
  int dim = 0;
  std::vector<std::vector<StructEntry>> mult;
  Mat star;
  Vec unit;
  Vec trace;
  std::string label;

  const std::vector<StructEntry>& product_of(int i, int j) const { return mult[static_cast<std::size_t>(i) * dim + j]; }
  Vec basis(int i) const;
  Mat left_mult(const Vec& x) const;   // matrix of y -> x y
  Mat right_mult(const Vec& x) const;  // matrix of y -> y x
  Mat left_basis(int i) const;
  Mat right_basis(int i) const;
};

using AlgebraPtr = std::shared_ptr<const FDAlgebra>;

// Builds an algebra from a dense rank-3 array c[i][j][k]; zeros are dropped.
FDAlgebra algebra_from_dense(int dim, const std::vector<std::vector<std::vector<cd>>>& c, const Mat& star,
                             const Vec& unit, const Vec& trace, std::string label);

struct ValidationReport {
  std::map<std::string, double> residuals;
  double min_gram_eigenvalue = 0.0;
  std::vector<std::string> failures;
  bool pass = false;
};

// Raises ShapeMismatch for inconsistent arrays; axiom failures are reported, not thrown.
ValidationReport validate(const FDAlgebra& alg, double tol = 1e-9);
void check_shapes(const FDAlgebra& alg);

Vec multiply(const FDAlgebra& alg, const Vec& x, const Vec& y);
Vec star(const FDAlgebra& alg, const Vec& x);
cd trace(const FDAlgebra& alg, const Vec& x);
cd gns_inner(const FDAlgebra& alg, const Vec& x, const Vec& y);  // tau(y^* x)
Mat gram(const FDAlgebra& alg);                                  // G(i,j) = tau(b_j^* b_i)

// Antilinear operator v -> matrix * conj(v).
struct AntilinearOp {
  Mat matrix;
  Vec apply(const Vec& v) const { return matrix * v.conjugate(); }
  // (this o other) is linear: v -> M1 conj(M2) v
  Mat compose_linear(const AntilinearOp& other) const { return matrix * other.matrix.conjugate(); }
};

AntilinearOp tomita_j(const FDAlgebra& alg);

// GNS Hilbert space data: gram and its Cholesky factor (gram = L L^H).
struct GNSSpace {
  AlgebraPtr algebra;
  Mat gram;
  Mat chol;  // lower triangular L
  static GNSSpace of(AlgebraPtr alg);
  double chol_residual() const;
  // Coordinates in which the GNS inner product is Euclidean: w = L^H v.
  Mat whiten(const Mat& v) const;
  Mat unwhiten(const Mat& w) const;
};

}  // namespace steinlab
