#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "steinlab/crossed.hpp"
#include "steinlab/derivations.hpp"
#include "steinlab/errors.hpp"
#include "steinlab/vndim.hpp"

using namespace steinlab;

namespace {

AlgebraPtr share(FDAlgebra a) { return std::make_shared<const FDAlgebra>(std::move(a)); }

double der_dim(const AlgebraPtr& a, const std::vector<Vec>& x) { return vn_dimension(phi_x(derivation_space(a), x)).value; }

}  // namespace

TEST_CASE("C[Z/n]: dimension 1 - 1/n, matching the projection-trace oracle") {
  for (int n = 2; n <= 6; ++n) {
    CAPTURE(n);
    const auto a = share(group_algebra(cyclic_group(n)));
    const double got = der_dim(a, hermitian_generators(*a));
    CHECK(got == doctest::Approx(1.0 - 1.0 / n).epsilon(1e-10));
    CHECK(got == doctest::Approx(oracle::der_dimension(*a)).epsilon(1e-9));
  }
}

TEST_CASE("multi-matrix algebras: oracle and closed form agree with the solver") {
  const std::vector<std::vector<Block>> cases{
      {{2, 1.0}}, {{3, 1.0}}, {{1, 0.5}, {1, 0.3}, {1, 0.2}}, {{2, 0.5}, {1, 0.3}, {1, 0.2}}, {{3, 0.6}, {2, 0.4}}};
  for (const auto& blocks : cases) {
    const auto a = share(multimatrix(blocks));
    const double got = der_dim(a, hermitian_generators(*a));
    CHECK(got == doctest::Approx(oracle::multimatrix_formula(blocks)).epsilon(1e-10));
    if (a->dim <= 9) CHECK(got == doctest::Approx(oracle::der_dimension(*a)).epsilon(1e-9));
  }
}

TEST_CASE("dimension of a full ambient is the number of slots, and rationalizes") {
  const auto a = share(multimatrix({{2, 0.5}, {1, 0.5}}));
  const auto n = share(tensor(*a, opposite(*a)));
  const auto gens = tensor_generators(*a, hermitian_generators(*a));
  const VnResult r = vn_dimension(full_ambient(n, 3, gens));
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.rational.exact);
  CHECK(r.rational.str() == "3");
}

TEST_CASE("orthogonal complements add up: central vectors plus the rest fill L^2(N)") {
  const std::vector<Block> blocks{{2, 0.6}, {1, 0.4}};
  const auto a = share(multimatrix(blocks));
  const auto n = share(tensor(*a, opposite(*a)));
  const auto gens = tensor_generators(*a, basis_set(*a));
  const Mat c = central_vectors(*a, *n, basis_set(*a));
  const Mat g = gram(*n);
  // complement: null space of c^H G
  const Mat comp = nullspace(Mat(c.adjoint() * g)).basis;
  const double d1 = vn_dimension(from_vectors(n, 1, c, gens)).value;
  const double d2 = vn_dimension(from_vectors(n, 1, comp, gens)).value;
  CHECK(d1 + d2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d1 >= 0.0);
  CHECK(d2 <= 1.0 + 1e-12);
}

TEST_CASE("a subspace that is not right-closed has no dimension") {
  const auto a = share(multimatrix({{2, 1.0}}));
  const auto n = share(tensor(*a, opposite(*a)));
  Rng rng(1);
  Mat v(n->dim, 1);
  for (int i = 0; i < n->dim; ++i) v(i, 0) = rng.complex_normal();
  CHECK_THROWS_AS(vn_dimension(from_vectors(n, 1, v, tensor_generators(*a, basis_set(*a)))), NotRightClosed);
}

TEST_CASE("evaluation on a non-generating set is refused") {
  const auto a = share(multimatrix({{2, 1.0}}));
  const DerivationSpace s = derivation_space(a);
  CHECK_THROWS_AS(phi_x(s, {a->basis(0)}), NotGenerating);
  CHECK(phi_x_defect(s, hermitian_generators(*a)) == 0);
}

TEST_CASE("evaluation map on C[Z/2] with X = {u_g} has rank 2") {
  const auto a = share(group_algebra(cyclic_group(2)));
  const DerivationSpace s = derivation_space(a);
  const ModuleSubspace sub = phi_x(s, {a->basis(1)});
  CHECK(sub.columns() == 2);
  CHECK(vn_dimension(sub).value == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("generating-set independence on several algebras") {
  for (const auto& a : {share(multimatrix({{2, 1.0}})), share(group_algebra(symmetric3())),
                        share(multimatrix({{2, 2.0 / 3.0}, {1, 1.0 / 3.0}}))}) {
    const DerivationSpace s = derivation_space(a);
    const IndependenceReport r = generating_set_independence(s, basis_set(*a), hermitian_generators(*a, 17));
    CHECK(r.pass);
    CHECK(r.difference < 1e-9);
  }
}

TEST_CASE("materialized evaluation agrees with the block evaluation") {
  const auto a = share(multimatrix({{2, 0.5}, {1, 0.5}}));
  const auto n = share(tensor(*a, opposite(*a)));
  const DerivationSpace s = derivation_space(a);
  const auto x = hermitian_generators(*a);
  const double blockwise = vn_dimension(phi_x(s, x)).value;
  const double dense =
      vn_dimension(phi_x_materialized(a, n, s.materialize_all(), x, tensor_generators(*a, basis_set(*a)))).value;
  CHECK(blockwise == doctest::Approx(dense).epsilon(1e-10));
}

TEST_CASE("restriction of scalars multiplies by |G|^2 and untwisting preserves dimension") {
  const std::vector<Block> c2{{1, 0.5}, {1, 0.5}};
  const auto a = share(multimatrix(c2));
  const CrossedContext c = make_crossed(flip_action(a, c2, cyclic_group(2)));
  CHECK(vn_dimension(restrict_scalars(full_ambient(c.big, 1, {}), c)).value == doctest::Approx(4.0).epsilon(1e-10));

  const DerivationSpace der = derivation_space(a);
  const ModuleSubspace plain = phi_x(der, hermitian_generators(*a));
  const double base = vn_dimension(plain).value;
  CHECK(base == doctest::Approx(0.5).epsilon(1e-10));
  for (int h = 0; h < 2; ++h) CHECK(vn_dimension(untwist(plain, c, h)).value == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("crossed products against the independent oracle: 3/4 and 7/8") {
  const std::vector<Block> c2{{1, 0.5}, {1, 0.5}};
  const auto a = share(multimatrix(c2));
  const GroupAction flip = flip_action(a, c2, cyclic_group(2));
  CHECK(oracle::crossed_der_dimension(flip) == doctest::Approx(0.75).epsilon(1e-9));

  const auto m2 = share(multimatrix({{2, 1.0}}));
  Vec u = Vec::Zero(4);
  u(0) = 1.0;
  u(3) = -1.0;
  const GroupAction ad = ad_action(m2, cyclic_group(2), u);
  CHECK(oracle::crossed_der_dimension(ad) == doctest::Approx(0.875).epsilon(1e-9));

  const CrossedContext c = make_crossed(ad);
  CHECK(der_dim(c.product, hermitian_generators(*c.product)) == doctest::Approx(0.875).epsilon(1e-10));
}
