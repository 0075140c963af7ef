#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "steinlab/crossed.hpp"
#include "steinlab/decompose.hpp"
#include "steinlab/derivations.hpp"
#include "steinlab/errors.hpp"
#include "steinlab/vndim.hpp"

using namespace steinlab;

namespace {

AlgebraPtr share(FDAlgebra a) { return std::make_shared<const FDAlgebra>(std::move(a)); }
AlgebraPtr tensor_op(const FDAlgebra& a) { return share(tensor(a, opposite(a))); }

Vec random_vec(int n, Rng& rng) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v;
}

double der_dim(const DerivationSpace& s, std::uint64_t seed = 1) {
  return vn_dimension(phi_x(s, hermitian_generators(*s.algebra, seed))).value;
}

std::vector<AlgebraPtr> sample_algebras() {
  return {share(multimatrix({{1, 1.0}})),
          share(multimatrix({{1, 0.5}, {1, 0.5}})),
          share(multimatrix({{1, 0.5}, {1, 0.3}, {1, 0.2}})),
          share(multimatrix({{2, 1.0}})),
          share(multimatrix({{2, 2.0 / 3.0}, {1, 1.0 / 3.0}})),
          share(group_algebra(cyclic_group(3))),
          share(group_algebra(symmetric3()))};
}

}  // namespace

TEST_CASE("bimodule action matches the definition x.(a (x) b^op).y = xa (x) (by)^op") {
  const FDAlgebra a = multimatrix({{2, 0.6}, {1, 0.4}});
  Rng rng(11);
  const Vec x = random_vec(a.dim, rng), y = random_vec(a.dim, rng), xi = random_vec(a.dim * a.dim, rng);
  const Vec got = bimodule_act(a, x, xi, y);
  const Mat lx = oracle::combine([&] {
    std::vector<Mat> v;
    for (int i = 0; i < a.dim; ++i) v.push_back(oracle::left_mult(a, i));
    return v;
  }(), x);
  const Mat ry = oracle::combine([&] {
    std::vector<Mat> v;
    for (int i = 0; i < a.dim; ++i) v.push_back(oracle::right_mult(a, i));
    return v;
  }(), y);
  const Vec want = Eigen::kroneckerProduct(lx, ry).eval() * xi;
  CHECK((got - want).norm() < 1e-12);
  CHECK((commutator_with(a, x, xi) - (bimodule_act(a, x, xi, a.unit) - bimodule_act(a, a.unit, xi, x))).norm() <
        1e-12);
}

TEST_CASE("C has no nonzero derivations") {
  const DerivationSpace s = derivation_space(share(multimatrix({{1, 1.0}})));
  CHECK(s.size() == 0);
  CHECK(der_dim(s) == doctest::Approx(0.0));
}

TEST_CASE("C[Z/2]: two inner derivations, all derivations inner, dimension 1/2") {
  const auto a = share(group_algebra(cyclic_group(2)));
  const DerivationSpace der = derivation_space(a);
  SolveOptions o;
  o.frames = der.frames;
  const DerivationSpace inn = inner_derivations(a, o);
  CHECK(der.size() == 2);  // dim N - dim(central vectors) = 4 - 2
  CHECK(inn.size() == 2);
  CHECK(subspace_distance(der, inn) < 1e-9);
  CHECK(der_dim(der) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("M_2: dimension 3/4 and twelve linear dimensions") {
  const auto a = share(multimatrix({{2, 1.0}}));
  const DerivationSpace s = derivation_space(a);
  CHECK(s.size() == 12);
  CHECK(der_dim(s) == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("solver agrees with the dense Leibniz oracle on linear and von Neumann dimension") {
  for (const auto& a : sample_algebras()) {
    CAPTURE(a->label);
    const oracle::DerivationBasis ref = oracle::derivations(*a, oracle::basis(*a));
    const DerivationSpace fast = derivation_space(a);
    SolveOptions plain;
    plain.use_blocks = false;
    const DerivationSpace slow = derivation_space(a, plain);
    CHECK(fast.size() == static_cast<int>(ref.maps.size()));
    CHECK(slow.size() == static_cast<int>(ref.maps.size()));
    const double want = oracle::vn_dimension(*a, ref, oracle::basis(*a));
    CHECK(der_dim(fast) == doctest::Approx(want).epsilon(1e-9));
    CHECK(der_dim(slow) == doctest::Approx(want).epsilon(1e-9));
    CHECK(space_leibniz_residual(fast) < 1e-9);
    CHECK(space_orthonormality_residual(fast) < 1e-9);
    if (fast.size() > 0) CHECK(leibniz_residual(*a, fast.materialize(fast.size() - 1)) < 1e-9);
  }
}

TEST_CASE("derivation spaces equal inner derivations on the sample algebras") {
  for (const auto& a : sample_algebras()) {
    CAPTURE(a->label);
    const DerivationSpace der = derivation_space(a);
    SolveOptions o;
    o.frames = der.frames;
    CHECK(subspace_distance(der, inner_derivations(a, o)) < 1e-9);
  }
}

TEST_CASE("inner derivation of xi is x -> [x, xi] and satisfies Leibniz") {
  const FDAlgebra a = group_algebra(symmetric3());
  Rng rng(2);
  const Vec xi = random_vec(a.dim * a.dim, rng);
  const Derivation d = inner_derivation(a, xi);
  CHECK(leibniz_residual(a, d) < 1e-12);
  const Vec x = random_vec(a.dim, rng);
  CHECK((d(x) - commutator_with(a, x, xi)).norm() < 1e-12);
}

TEST_CASE("right module action (d.m)(x) = d(x) m keeps the Leibniz rule") {
  const FDAlgebra a = multimatrix({{2, 1.0}});
  const FDAlgebra n = tensor(a, opposite(a));
  Rng rng(4);
  const Derivation d = inner_derivation(a, random_vec(n.dim, rng));
  const Vec m = random_vec(n.dim, rng);
  const Derivation dm = right_act(a, n, d, m);
  CHECK(leibniz_residual(a, dm) < 1e-11);
  const Vec x = random_vec(a.dim, rng);
  CHECK((dm(x) - multiply(n, d(x), m)).norm() < 1e-12);
  // <d, d>_X is the sum of squared GNS norms
  const cd self = inner_x(gram(n), d, d, basis_set(a));
  CHECK(self.real() > 0.0);
  CHECK(std::abs(self.imag()) < 1e-12);
}

TEST_CASE("relative derivations: M_2 over its diagonal has dimension 1/4") {
  const auto a = share(multimatrix({{2, 1.0}}));
  const DerivationSpace der = derivation_space(a);
  const DerivationSpace rel = relative_derivations(der, {a->basis(0), a->basis(3)});
  CHECK(der_dim(rel) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK_THROWS_AS(relative_derivations(der, {a->basis(1)}), NotSubalgebra);
}

TEST_CASE("central vectors: f_h family for B = A = C[G], sum alpha^2/n^2 for multi-matrix") {
  const FDAlgebra cg = group_algebra(dihedral4());
  CHECK(central_vectors(cg, tensor(cg, opposite(cg)), basis_set(cg)).cols() == 8);

  const std::vector<Block> blocks{{2, 0.5}, {1, 0.3}, {1, 0.2}};
  const auto a = share(multimatrix(blocks));
  const auto n = tensor_op(*a);
  const Mat c = central_vectors(*a, *n, basis_set(*a));
  const double dim = vn_dimension(from_vectors(n, 1, c, tensor_generators(*a, basis_set(*a)))).value;
  CHECK(dim == doctest::Approx(1.0 - oracle::multimatrix_formula(blocks)).epsilon(1e-10));
}

TEST_CASE("matrix-unit projection equals the orthogonal projection onto central vectors") {
  const std::vector<Block> blocks{{2, 2.0 / 3.0}, {1, 1.0 / 3.0}};
  const auto a = share(multimatrix(blocks));
  const auto n = tensor_op(*a);
  const Mat p = unit_central_projection(*a, *n, standard_matrix_units(blocks));
  const Mat c = central_vectors(*a, *n, basis_set(*a));
  const Mat g = gram(*n);
  CHECK(max_abs(Mat(p - c * c.adjoint() * g)) < 1e-10);
  CHECK(max_abs(Mat(p * p - p)) < 1e-12);
  // units from the decomposition work as well
  CHECK(max_abs(Mat(unit_central_projection(*a, *n, matrix_units(*a)) - p)) < 1e-8);
  MatrixUnits bad = standard_matrix_units(blocks);
  bad[0][1] = bad[0][0];
  CHECK_THROWS_AS(unit_central_projection(*a, *n, bad), UnitsInvalid);
}

TEST_CASE("hermitian generators generate the algebra") {
  for (const auto& a : sample_algebras()) {
    const auto x = hermitian_generators(*a, 9);
    CHECK(generates_plain(*a, x));
    for (const auto& v : x) CHECK((star(*a, v) - v).norm() < 1e-12);
  }
}

TEST_CASE("crossed products: coset projections and the d^h / D_{g,h} round trip") {
  const std::vector<Block> c2{{1, 0.5}, {1, 0.5}};
  const auto a = share(multimatrix(c2));
  const CrossedContext c = make_crossed(flip_action(a, c2, cyclic_group(2)));
  const CosetResiduals r = coset_residuals(c);
  CHECK(r.partition < 1e-12);
  CHECK(r.commutant < 1e-12);
  CHECK(r.translation < 1e-12);
  CHECK(r.tomita < 1e-12);

  const FDAlgebra n0 = tensor(*a, opposite(*a));
  Rng rng(8);
  const Derivation d = inner_derivation(*a, random_vec(n0.dim, rng));
  for (int h = 0; h < c.order(); ++h) {
    const Derivation dh = extend(c, d, h);
    CHECK(leibniz_residual(*c.product, dh) < 1e-11);
    CHECK(vanishing_residual(c, dh) < 1e-12);
    CHECK(is_covariant(c, dh));
    // only the h-th restriction is nonzero, and it returns d
    for (int k = 0; k < c.order(); ++k) {
      const Derivation back = restrict(c, dh, c.action.group.identity, k);
      if (k == h) CHECK(max_abs(Mat(back.matrix - d.matrix)) < 1e-11);
      else CHECK(max_abs(back.matrix) < 1e-11);
    }
  }
  // inner by u_g (x) 1 moves u_g, so it is neither covariant nor vanishing
  const Derivation inner_u = inner_derivation(*c.product, c.unitary_pair(1, 0));
  CHECK_FALSE(is_covariant(c, inner_u));
  CHECK(vanishing_residual(c, inner_u) > 0.1);
}
