#pragma once

#include <cstdint>
#include <vector>

#include "steinlab/constructions.hpp"
#include "steinlab/derivations.hpp"

namespace steinlab {

// A x| G on the basis b_i u_g at index g*dim_A + i, with the tensor algebras used by the
// derivation identities: small = A (x) A^op, big = (A x| G) (x) (A x| G)^op.
struct CrossedContext {
  GroupAction action;
  AlgebraPtr base;       // A
  AlgebraPtr product;    // A x| G
  AlgebraPtr small;      // A (x) A^op
  AlgebraPtr big;        // (A x| G) (x) (A x| G)^op
  Mat embed_base;        // dim_CP x dim_A, iota_A
  std::vector<Vec> unitaries;  // u_g in CP coordinates
  std::vector<int> small_to_big;  // coordinate map of iota (x) iota
  std::vector<Mat> left_u, right_u;  // multiplication by u_g on A x| G

  int order() const { return action.group.order; }
  int dim_a() const { return base->dim; }
  int dim_cp() const { return product->dim; }
  Vec embed_small(const Vec& m) const;      // N0 -> N_big coordinates
  Vec extract_small(const Vec& xi) const;   // (e,e) block of N_big -> N0
  Vec group_element(int g) const { return unitaries[static_cast<std::size_t>(g)]; }
  // element u_a (x) u_b^op of N_big
  Vec unitary_pair(int a, int b) const;
  // u_a . xi . u_b, i.e. left multiplication by u_a (x) u_b^op in N_big
  Vec act_units(const Vec& xi, int a, int b) const;
  // xi (u_a (x) u_b^op)
  Vec right_units(const Vec& xi, int a, int b) const;
  Mat ad(int g) const;  // x -> u_g x u_g^* on A x| G
};

FDAlgebra crossed_product(const FDAlgebra& a, const GroupAction& act);
CrossedContext make_crossed(const GroupAction& act, double tol = 1e-9);

// p_{g,h} as a 0/1 diagonal on N_big coordinates: first factor in coset g, second in coset h.
Vec coset_mask(const CrossedContext& c, int g, int h);
struct CosetResiduals {
  double partition = 0;      // sum p = 1, p^2 = p, GNS self-adjoint, mutual orthogonality
  double commutant = 0;      // [p, L_{iota(a (x) b^op)}] = 0
  double translation = 0;    // p_{g,h} (u_k (x) u_l^op) = (u_k (x) u_l^op) p_{k^-1 g, h l^-1}
  double tomita = 0;         // J p_{g,h} = p_{g^-1,h^-1} J
};
CosetResiduals coset_residuals(const CrossedContext& c);

// Derivations on A x| G are materialized with values in N_big.
// d^h(a u_k) = [sum_g u_g^* . d(alpha_g(a)) . u_g u_k] (1 (x) u_h^op)
Derivation extend(const CrossedContext& c, const Derivation& d, int h);
// D_{g,h}(a) = p_{g,h} D(iota a) (u_g (x) u_h^op)^*, read in the (e,e) coset.
Derivation restrict(const CrossedContext& c, const Derivation& big, int g, int h);
// max over g, basis b of |D(u_g b u_g^*) - u_g . D(b) . u_g^*|
double covariance_residual(const CrossedContext& c, const Derivation& big);
double vanishing_residual(const CrossedContext& c, const Derivation& big);  // max_g |D(u_g)|
bool is_covariant(const CrossedContext& c, const Derivation& big, double tol = 1e-8);

// (1 (x) alpha_h) on N0 coordinates
Mat twist_matrix(const CrossedContext& c, int h);
Vec twist_action(const CrossedContext& c, const Vec& m, int h);

// V_g D = u_g^* . D(alpha_g(.)) . u_g with alpha_g = Ad u_g on A x| G.
Derivation vg_apply(const CrossedContext& c, const Derivation& big, int g);
// Throws GeneratingSetNotScaled unless every y satisfies Ad(u_g) y = lambda y.
void require_scaled(const CrossedContext& c, const std::vector<Vec>& y, double tol = 1e-9);

// Y = iota_A(X) together with the group unitaries.
std::vector<Vec> crossed_generators(const CrossedContext& c, const std::vector<Vec>& x);
std::vector<Vec> group_basis(const CrossedContext& c);  // iota_G(u_g)

}  // namespace steinlab
