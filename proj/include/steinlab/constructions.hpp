#pragma once

#include <string>
#include <utility>
#include <vector>

#include "steinlab/algebra.hpp"

namespace steinlab {

// Finite group on elements 0..order-1 given by its multiplication table.
struct FiniteGroup {
  int order = 0;
  std::vector<std::vector<int>> table;  // table[g][h] = gh
  std::vector<int> inverse;
  int identity = 0;
  std::string label;
  // Optional homomorphism to Z/2 used by the named "flip" action; empty if none.
  std::vector<int> parity;

  int mul(int g, int h) const { return table[g][h]; }
  int inv(int g) const { return inverse[g]; }
  bool is_abelian() const;
};

// Checks the group axioms and fills identity/inverse. Throws InvalidGroup.
FiniteGroup make_group(std::vector<std::vector<int>> table, std::string label);
FiniteGroup cyclic_group(int n);
FiniteGroup product_group(const FiniteGroup& a, const FiniteGroup& b);  // (a,b) -> a*|b|+b
FiniteGroup symmetric3();
FiniteGroup dihedral4();
// "Z/n", "Z/axZ/b", "S_3", "D_4"; throws SpecInvalid for unknown names.
FiniteGroup named_group(const std::string& name);

struct Subgroup {
  FiniteGroup group;          // relabelled on 0..|H|-1
  std::vector<int> elements;  // element k of `group` is elements[k] in the parent
};
// Throws NotSubgroup unless `elements` is closed under the parent's law and inverses.
Subgroup make_subgroup(const FiniteGroup& parent, std::vector<int> elements);

struct GroupAction {
  FiniteGroup group;
  AlgebraPtr algebra;
  std::vector<Mat> maps;  // maps[g] is the matrix of alpha_g on coordinates
  const Mat& of(int g) const { return maps[static_cast<std::size_t>(g)]; }
};

struct ActionReport {
  double identity = 0, homomorphism = 0, multiplicative = 0, star = 0, unit = 0, trace = 0;
  double max() const;
};
ActionReport action_residuals(const GroupAction& act);
// Throws ActionInvalid when any residual exceeds tol or shapes disagree.
void validate_action(const GroupAction& act, double tol = 1e-9);

GroupAction restrict_action(const GroupAction& act, const Subgroup& sub);

// Matrix-unit layout of a multi-matrix algebra: block i occupies n_i^2 consecutive
// coordinates, e^{(i)}_{jk} at offset_i + j*n_i + k.
struct Block {
  int n = 1;
  double alpha = 1.0;
};
int block_offset(const std::vector<Block>& blocks, int i);

FDAlgebra multimatrix(const std::vector<Block>& blocks, double tol = 1e-9);
FDAlgebra group_algebra(const FiniteGroup& g);
FDAlgebra opposite(const FDAlgebra& a);
FDAlgebra tensor(const FDAlgebra& a, const FDAlgebra& b);  // index i*dim_b + j

GroupAction trivial_action(AlgebraPtr a, const FiniteGroup& g);
// perms[g][i] = image block of block i; blocks must have equal sizes along orbits.
GroupAction block_permutation_action(AlgebraPtr a, const std::vector<Block>& blocks, const FiniteGroup& g,
                                     const std::vector<std::vector<int>>& perms);
// Two equal blocks swapped by the elements with parity 1.
GroupAction flip_action(AlgebraPtr a, const std::vector<Block>& blocks, const FiniteGroup& g);
// |G| equal blocks permuted by left translation.
GroupAction regular_block_action(AlgebraPtr a, const std::vector<Block>& blocks, const FiniteGroup& g);
// alpha_k = Ad(u^k) on a cyclic group Z/n (element k <-> k); u must be unitary with u^n central.
GroupAction ad_action(AlgebraPtr a, const FiniteGroup& g, const Vec& u);
// On C[Z/n]: alpha_k(u_j) = w^{kj} u_j, w = exp(2 pi i/n); the group must be Z/n.
GroupAction fourier_action(AlgebraPtr a, const FiniteGroup& g);
// Given explicit matrices; validated.
GroupAction matrix_action(AlgebraPtr a, const FiniteGroup& g, std::vector<Mat> maps, double tol = 1e-9);

struct Character {
  Vec values;  // chi(g)
};
// All characters of an abelian group, trivial character first. Throws NotAbelian.
std::vector<Character> characters(const FiniteGroup& g, std::uint64_t seed = 1);
Mat character_gram(const FiniteGroup& g, const std::vector<Character>& chars);

struct ScaledVector {
  Vec vector;
  int character = 0;  // index into characters(group)
};
// {(1/|G|) sum_g conj(chi(g)) alpha_g(x)} with zero vectors (norm < 1e-10) pruned.
std::vector<ScaledVector> scaled_generating_set(const std::vector<Vec>& x, const GroupAction& act,
                                                std::uint64_t seed = 1);
// max_{y,h} |alpha_h(y) - chi(h) y|
double scaling_residual(const std::vector<ScaledVector>& y, const GroupAction& act, std::uint64_t seed = 1);

// Smallest unital product-closed subspace containing S (and S^* when star_closed).
// Returns GNS-orthonormal columns.
Mat subalgebra_generate(const FDAlgebra& ambient, const std::vector<Vec>& s, bool star_closed = true);
// Dimension of span(cols(a) + cols(b)) minus each, for comparing generated subalgebras.
bool same_subspace(const FDAlgebra& ambient, const Mat& a, const Mat& b, double tol = 1e-8);

// Orbit of S under the action.
std::vector<Vec> orbit(const std::vector<Vec>& s, const GroupAction& act);

}  // namespace steinlab
