#pragma once

#include <string>

#include "steinlab/checks.hpp"

namespace steinlab {

// JSON readers; every failure is a SpecInvalid naming the offending location.
// Complex entries are either numbers or [re, im] pairs.
//
// algebra: {"dim", "mult", "star", "unit", "trace", "label"}
//          | {"multimatrix": {"blocks": [[n, alpha], ...]}}
//          | {"group_algebra": <group>}
// group:   "Z/n" | "Z/axZ/b" | "S_3" | "D_4" | {"order", "table", "label", "parity"?}
// action:  "trivial" | "flip" | "regular" | "fourier" | {"ad": [coords]} | {"matrices": [...]}
//          | {"permutation": [[image block per block] per element]}
ExperimentSpec parse_spec(const std::string& json_text, const std::string& origin = "spec");
ExperimentSpec load_spec(const std::string& path);

struct LoadedAlgebra {
  AlgebraPtr algebra;
  std::optional<std::vector<Block>> blocks;
  std::optional<FiniteGroup> group;
};
LoadedAlgebra parse_algebra(const std::string& json_text, const std::string& origin = "algebra");
LoadedAlgebra load_algebra(const std::string& path);

// Explicit structure-constant form of an algebra (the inverse of the plain reader).
std::string algebra_to_json(const FDAlgebra& a);

std::string read_file(const std::string& path);

}  // namespace steinlab
