#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "steinlab/algebra.hpp"
#include "steinlab/decompose.hpp"

namespace steinlab {

// Coordinates on N = A (x) A^op use index i*dim_A + j for b_i (x) b_j^op. Viewing a vector
// as the dim_A x dim_A row-major matrix Xi, the bimodule action x.xi.y = (x (x) y^op) xi is
// Xi -> L_x Xi R_y^T and right multiplication in N by b_k (x) b_l^op is Xi -> R_k Xi L_l^T.
Vec bimodule_act(const FDAlgebra& a, const Vec& x, const Vec& xi, const Vec& y);
Vec commutator_with(const FDAlgebra& a, const Vec& x, const Vec& xi);  // x.xi - xi.x

// Materialized derivation: column j holds d(b_j) in N coordinates.
struct Derivation {
  Mat matrix;
  Vec operator()(const Vec& x) const { return matrix * x; }
};

// Max over all basis pairs of |d(b_i b_j) - b_i.d(b_j) - d(b_i).b_j|, plus |d(1)|.
double leibniz_residual(const FDAlgebra& a, const Derivation& d);
Derivation inner_derivation(const FDAlgebra& a, const Vec& xi);
// (d.m)(x) = d(x) m with m in N
Derivation right_act(const FDAlgebra& a, const FDAlgebra& n, const Derivation& d, const Vec& m);
// <d1,d2>_X = sum_x <d1(x), d2(x)>
cd inner_x(const Mat& gram_n, const Derivation& d1, const Derivation& d2, const std::vector<Vec>& x);

// Per minimal projection e: orthonormal basis U of A e (columns) and the compressions of
// left multiplication; per e: basis V of e A and compressions of right multiplication.
struct ProjectionFrames {
  AlgebraPtr algebra;
  std::vector<Vec> projections;
  std::vector<Mat> left_ideal;               // U_e
  std::vector<Mat> right_ideal;              // V_e
  std::vector<std::vector<Mat>> left_red;    // [e][k] = U^H L_{b_k} U
  std::vector<std::vector<Mat>> right_red;   // [e][k] = V^H R_{b_k} V
  Mat gram_a;
  int count() const { return static_cast<int>(projections.size()); }
};
using FramesPtr = std::shared_ptr<const ProjectionFrames>;

// Frames from a family of orthogonal projections summing to 1 (minimal projections for the
// fast path, {1} for the unstructured path).
FramesPtr make_frames(AlgebraPtr a, const std::vector<Vec>& projections);
FramesPtr minimal_frames(AlgebraPtr a, std::uint64_t seed = 1);
FramesPtr trivial_frames(AlgebraPtr a);

// Derivations d with values in N (e_l (x) e_m^op). Coefficient column index k*r + s holds
// coordinate s of d(b_k) in the frame kron(U_l, V_m).
struct DerBlock {
  int left = 0, right = 0;
  Mat coeffs;  // (r*dim_A) x m
};

struct DerivationSpace {
  AlgebraPtr algebra;
  FramesPtr frames;
  std::vector<Vec> inner_set;  // X for <.,.>_X
  std::vector<DerBlock> blocks;

  int size() const;
  int block_rank(const DerBlock& b) const;  // r
  Mat frame(const DerBlock& b) const;       // kron(U, V), dim_N x r
  Derivation materialize(int index) const;  // global index over all blocks
  std::vector<Derivation> materialize_all() const;
};

struct SolveOptions {
  bool use_blocks = true;
  std::vector<Vec> inner_set;   // default: full basis
  std::vector<Vec> solve_set;   // Leibniz rows are imposed for x in this set; default: automatic
  std::uint64_t seed = 1;
  RankPolicy policy{};
  FramesPtr frames;             // reuse frames of another space (required by subspace_distance)
};

// Full solution space of the Leibniz system, orthonormal for <.,.>_X. Rows are imposed for a
// unital generating set (all basis pairs follow from these and d(1)=0). Throws RankAmbiguous.
DerivationSpace derivation_space(AlgebraPtr a, const SolveOptions& opt = {});
// Span of x -> [x, xi] over xi in N, same frames and inner set.
DerivationSpace inner_derivations(AlgebraPtr a, const SolveOptions& opt = {});
// Intersection with {d : d(b) = 0 for b in b_basis}. Throws NotSubalgebra.
DerivationSpace relative_derivations(const DerivationSpace& space, const std::vector<Vec>& b_basis,
                                     double tol = 1e-8);
// Orthonormal (GNS) columns spanning the B-central vectors of N.
Mat central_vectors(const FDAlgebra& a, const FDAlgebra& n, const std::vector<Vec>& b_basis);
// Left multiplication by sum_i (1/n_i) sum_jk e_jk (x) e_kj^op on N. Throws UnitsInvalid.
Mat unit_central_projection(const FDAlgebra& a, const FDAlgebra& n, const MatrixUnits& units, double tol = 1e-8);
Vec unit_central_element(const FDAlgebra& a, const MatrixUnits& units);

// Max Leibniz residual of every element over all basis pairs, in reduced coordinates.
double space_leibniz_residual(const DerivationSpace& s);
// Max |<d_i, d_j>_X - delta_ij|.
double space_orthonormality_residual(const DerivationSpace& s);
// Residual of mutual containment; +inf when linear dimensions differ.
double subspace_distance(const DerivationSpace& s1, const DerivationSpace& s2);

// Unital algebra generated by x without using the involution equals A.
bool generates_plain(const FDAlgebra& a, const std::vector<Vec>& x);
// Small Hermitian generating set (two random Hermitian elements, else the basis).
std::vector<Vec> hermitian_generators(const FDAlgebra& a, std::uint64_t seed = 1);
std::vector<Vec> basis_set(const FDAlgebra& a);

}  // namespace steinlab
