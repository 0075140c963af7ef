#pragma once

#include <cstdint>
#include <vector>

#include "steinlab/crossed.hpp"
#include "steinlab/derivations.hpp"

namespace steinlab {

// Piece of a right submodule of L^2(N0)^slots living inside the range of `frame` in every
// slot. `span` has slots*r rows (slot-major). Blocks of one subspace must be mutually
// orthogonal; an empty frame means the identity.
struct ModuleBlock {
  Mat frame;   // dim_N0 x r
  Mat gframe;  // gram(N0) * frame; filled on demand when empty
  Mat span;    // (slots*r) x m
};

struct ModuleSubspace {
  AlgebraPtr n0;
  int slots = 0;
  std::vector<ModuleBlock> blocks;
  std::vector<Vec> closure_elems;  // right action is checked against these (algebra generators of N0)

  int columns() const;
  Mat materialize() const;  // (slots*dim_N0) x columns
};

// Whole ambient L^2(N0)^slots.
ModuleSubspace full_ambient(AlgebraPtr n0, int slots, std::vector<Vec> closure_elems);
// Single identity-frame block from explicit vectors.
ModuleSubspace from_vectors(AlgebraPtr n0, int slots, const Mat& vectors, std::vector<Vec> closure_elems);
// Generators {x (x) 1, 1 (x) x^op} of A (x) A^op from generators x of A.
std::vector<Vec> tensor_generators(const FDAlgebra& a, const std::vector<Vec>& x);

struct VnOptions {
  double tol = 1e-8;
  long long qmax = 0;   // rationalization bound; 0 picks a default from the data
  std::uint64_t seed = 1;
  long long exhaustive_budget = 200000000;  // flop estimate above which closure is probed randomly
  RankPolicy policy{};
};

struct VnResult {
  double value = 0.0;
  Rational rational;
  double closure_residual = 0.0;
  bool closure_exhaustive = true;
  int rank = 0;
};

// Trace of the projection onto the subspace: sum over slots of <P Omega, Omega>.
// Throws NotRightClosed when the right action leaves the span.
VnResult vn_dimension(const ModuleSubspace& sub, const VnOptions& opt = {});

// d -> (d(x))_{x in X}. Throws NotGenerating unless X generates A as a unital algebra.
ModuleSubspace phi_x(const DerivationSpace& space, const std::vector<Vec>& x);
// Same map for materialized derivations with values in N.
ModuleSubspace phi_x_materialized(AlgebraPtr a, AlgebraPtr n, const std::vector<Derivation>& ds,
                                  const std::vector<Vec>& x, std::vector<Vec> closure_elems);
// Rank of the evaluation map minus the number of derivations (0 when injective).
int phi_x_defect(const DerivationSpace& space, const std::vector<Vec>& x);

// Re-expresses a subspace of L^2(N_big)^X as one of L^2(N0)^{X x G x G}: coordinate
// (x,g,h) holds (u_g (x) u_h^op)^* p_{g,h} xi_x read in the (e,e) coset.
ModuleSubspace restrict_scalars(const ModuleSubspace& sub, const CrossedContext& c);

// (1 (x) alpha_{h^-1}) applied slotwise, turning the h-twisted module into a standard one.
ModuleSubspace untwist(const ModuleSubspace& sub, const CrossedContext& c, int h);

struct IndependenceReport {
  double dim1 = 0, dim2 = 0, difference = 0;
  bool pass = false;
};
IndependenceReport generating_set_independence(const DerivationSpace& space, const std::vector<Vec>& x1,
                                               const std::vector<Vec>& x2, const VnOptions& opt = {});

}  // namespace steinlab
