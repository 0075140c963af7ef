#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "steinlab/algebra.hpp"
#include "steinlab/constructions.hpp"
#include "steinlab/errors.hpp"

using namespace steinlab;

namespace {

bool has_failure(const ValidationReport& r, const std::string& name) {
  return std::find(r.failures.begin(), r.failures.end(), name) != r.failures.end();
}

}  // namespace

TEST_CASE("one-dimensional algebra validates with zero residuals") {
  const FDAlgebra c = multimatrix({{1, 1.0}});
  const ValidationReport r = validate(c);
  CHECK(r.pass);
  for (const auto& [name, value] : r.residuals) CHECK_MESSAGE(value < 1e-14, name);
}

TEST_CASE("M_2 with normalized trace passes every axiom") {
  const FDAlgebra m2 = multimatrix({{2, 1.0}});
  CHECK(m2.dim == 4);
  const ValidationReport r = validate(m2);
  CHECK(r.pass);
  CHECK(r.min_gram_eigenvalue == doctest::Approx(0.5));
}

TEST_CASE("trace with tau(1) = 2 is rejected as non-unital") {
  FDAlgebra m2 = multimatrix({{2, 1.0}});
  m2.trace *= 2.0;
  const ValidationReport r = validate(m2);
  CHECK_FALSE(r.pass);
  CHECK(has_failure(r, "trace_unital"));
}

TEST_CASE("non-tracial functional is rejected") {
  FDAlgebra m2 = multimatrix({{2, 1.0}});
  m2.trace(0) = 0.8;  // e_11
  m2.trace(3) = 0.2;  // e_22
  const ValidationReport r = validate(m2);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(has_failure(r, "trace_unital"));
  CHECK(has_failure(r, "trace_tracial"));
}

TEST_CASE("a zero on the trace of a projection breaks faithfulness") {
  FDAlgebra c2 = multimatrix({{1, 0.5}, {1, 0.5}});
  c2.trace(0) = 1.0;
  c2.trace(1) = 0.0;
  const ValidationReport r = validate(c2);
  CHECK_FALSE(r.pass);
  CHECK(has_failure(r, "trace_faithful"));
}

TEST_CASE("non-associative structure constants are rejected") {
  FDAlgebra c2 = multimatrix({{1, 0.5}, {1, 0.5}});
  c2.mult[0] = {{1, 1.0}};  // b_0 b_0 = b_1
  CHECK_FALSE(validate(c2).pass);
}

TEST_CASE("shape mismatches raise") {
  FDAlgebra c2 = multimatrix({{1, 0.5}, {1, 0.5}});
  c2.unit = Vec::Zero(3);
  CHECK_THROWS_AS(check_shapes(c2), ShapeMismatch);
}

TEST_CASE("C[Z/2]: u_g u_g = u_e and the trace is the identity coefficient") {
  const FDAlgebra a = group_algebra(cyclic_group(2));
  const Vec ug = a.basis(1);
  const Vec sq = multiply(a, ug, ug);
  CHECK(std::abs(sq(0) - cd(1.0)) < 1e-15);
  CHECK(std::abs(sq(1)) < 1e-15);
  CHECK(std::abs(trace(a, ug)) < 1e-15);
  CHECK(std::abs(trace(a, a.unit) - cd(1.0)) < 1e-15);
}

TEST_CASE("involution is conjugate-linear and antimultiplicative on C[S_3]") {
  const FDAlgebra a = group_algebra(symmetric3());
  Rng rng(3);
  Vec x(a.dim), y(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    x(i) = rng.complex_normal();
    y(i) = rng.complex_normal();
  }
  const Vec lhs = star(a, multiply(a, x, y));
  const Vec rhs = multiply(a, star(a, y), star(a, x));
  CHECK((lhs - rhs).norm() < 1e-12);
  const cd s(0.3, -1.7);
  CHECK((star(a, Vec(s * x)) - std::conj(s) * star(a, x)).norm() < 1e-12);
}

TEST_CASE("gram matches the definition and is positive definite") {
  for (const FDAlgebra& a : {multimatrix({{2, 0.6}, {1, 0.4}}), group_algebra(dihedral4())}) {
    const Mat g = gram(a);
    CHECK(max_abs(Mat(g - oracle::gram(a))) < 1e-13);
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("GNS inner product is tau(y^* x)") {
  const FDAlgebra a = multimatrix({{2, 1.0}});
  const Vec x = a.basis(1), y = a.basis(1);  // e_12
  CHECK(std::abs(gns_inner(a, x, y) - cd(0.5)) < 1e-15);
  CHECK(std::abs(gns_inner(a, a.basis(0), a.basis(3))) < 1e-15);
}

TEST_CASE("Tomita conjugation is an antiunitary involution") {
  const FDAlgebra a = multimatrix({{2, 2.0 / 3.0}, {1, 1.0 / 3.0}});
  const AntilinearOp j = tomita_j(a);
  const Mat jj = j.compose_linear(j);
  CHECK(max_abs(Mat(jj - Mat::Identity(a.dim, a.dim))) < 1e-13);
  Rng rng(5);
  Vec x(a.dim), y(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    x(i) = rng.complex_normal();
    y(i) = rng.complex_normal();
  }
  // <Jx, Jy> = <y, x>
  CHECK(std::abs(gns_inner(a, j.apply(x), j.apply(y)) - gns_inner(a, y, x)) < 1e-12);
}

TEST_CASE("opposite and tensor products stay tracial *-algebras") {
  const FDAlgebra a = group_algebra(cyclic_group(2));
  const FDAlgebra op = opposite(a);
  CHECK(validate(op).pass);
  const FDAlgebra t = tensor(a, op);
  CHECK(t.dim == 4);
  CHECK(validate(t).pass);

  const FDAlgebra m2 = multimatrix({{2, 1.0}});
  const FDAlgebra m2op = opposite(m2);
  // e_12 e_21 = e_11 in M_2, so e_21 e_12 = e_11 in the opposite product
  CHECK(std::abs(multiply(m2op, m2.basis(2), m2.basis(1))(0) - cd(1.0)) < 1e-15);
  const FDAlgebra n = tensor(m2, m2op);
  CHECK(validate(n).pass);
  CHECK(max_abs(Mat(gram(n) - Eigen::kroneckerProduct(gram(m2), gram(m2)).eval())) < 1e-14);
}

TEST_CASE("GNS whitening turns the inner product Euclidean") {
  const auto a = std::make_shared<const FDAlgebra>(multimatrix({{2, 0.7}, {1, 0.3}}));
  const GNSSpace s = GNSSpace::of(a);
  CHECK(s.chol_residual() < 1e-13);
  const Mat w = s.whiten(Mat::Identity(a->dim, a->dim));
  CHECK(max_abs(Mat(w.adjoint() * w - s.gram)) < 1e-13);
  CHECK(max_abs(Mat(s.unwhiten(w) - Mat::Identity(a->dim, a->dim))) < 1e-12);
}

TEST_CASE("linalg: rationalize and rank decisions") {
  const Rational r = rationalize(0.875, 100);
  CHECK(r.exact);
  CHECK(r.str() == "7/8");
  CHECK(rationalize(-1.0 / 3.0, 100).str() == "-1/3");
  Mat m(3, 2);
  m << 1, 2, 2, 4, 3, 6;
  CHECK(nullspace(m).basis.cols() == 1);
  Mat amb = Mat::Zero(3, 3);
  amb.diagonal() << 1.0, 2e-5, 9e-6;  // kept and dropped values too close to decide
  RankPolicy p;
  p.rel = 1e-5;
  p.abs = 1e-5;
  p.min_gap = 1e3;
  CHECK_THROWS_AS(nullspace(amb, p), RankAmbiguous);
}
