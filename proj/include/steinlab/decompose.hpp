#pragma once

#include <cstdint>
#include <vector>

#include "steinlab/algebra.hpp"
#include "steinlab/constructions.hpp"

namespace steinlab {

struct SimpleBlock {
  int n = 1;
  double alpha = 0.0;
  Vec central_projection;            // z_i
  std::vector<Vec> minimal_projections;  // n of them, summing to z_i
};

// Wedderburn splitting of a tracial *-algebra into matrix blocks, sorted by (n, alpha)
// descending. Throws NotSemisimple when a block dimension is not a perfect square.
std::vector<SimpleBlock> wedderburn(const FDAlgebra& a, std::uint64_t seed = 1);

// Orthonormal (Euclidean) basis of the center.
Mat center_basis(const FDAlgebra& a);

std::vector<Block> multimatrix_decompose(const FDAlgebra& a, std::uint64_t seed = 1);

// units[i][j*n_i + k] = e^{(i)}_{jk}
using MatrixUnits = std::vector<std::vector<Vec>>;
MatrixUnits matrix_units(const FDAlgebra& a, std::uint64_t seed = 1);
// Known matrix units of an algebra built by multimatrix(blocks).
MatrixUnits standard_matrix_units(const std::vector<Block>& blocks);
// max residual of e_jk e_lm = delta_kl e_jm, e_jk^* = e_kj, sum e_jj = 1
double matrix_unit_residual(const FDAlgebra& a, const MatrixUnits& units);

}  // namespace steinlab
