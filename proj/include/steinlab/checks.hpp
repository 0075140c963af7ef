#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steinlab/constructions.hpp"

namespace steinlab {

struct ExperimentSpec {
  std::string label;
  AlgebraPtr algebra;
  std::optional<std::vector<Block>> blocks;         // known when given as a multi-matrix
  std::optional<FiniteGroup> algebra_group;         // set when the algebra is C[G]
  std::optional<FiniteGroup> group;
  std::optional<GroupAction> action;
  std::optional<std::vector<int>> subgroup;         // elements of `group`
  std::vector<std::string> checks{"all"};
  std::optional<double> tolerance;                  // unset: environment or default
  std::uint64_t seed = 1;
};

struct CheckInfo {
  std::string id;
  std::string anchor;  // statement the row verifies
  int stage;           // 0 validation, 1 constructions, 2 derivation spaces, 3 dimensions, 4 identities
};
const std::vector<CheckInfo>& check_registry();
// Expands "all" and "identities" and orders by stage; throws SpecInvalid on unknown ids.
std::vector<std::string> resolve_checks(const std::vector<std::string>& requested);

struct CheckRow {
  std::string id;
  std::string anchor;
  std::string status;  // pass, fail, skipped
  double lhs = 0.0, rhs = 0.0, residual = 0.0;
  std::string lhs_exact, rhs_exact;  // nearest small rational, empty when none
  std::string note;
  double elapsed = 0.0;  // seconds
};

struct VerificationReport {
  std::string label;
  double tolerance = 1e-8;
  std::uint64_t seed = 1;
  std::vector<CheckRow> rows;
  bool all_pass() const;  // every executed (non-skipped) row passed
};

// Tolerance precedence: explicit override, spec value, STEINLAB_TOL, 1e-8.
double effective_tolerance(const ExperimentSpec& spec, std::optional<double> override_tol = std::nullopt);

// Runs the requested checks in dependency order. Throws SpecInvalid for inconsistent specs.
VerificationReport run(const ExperimentSpec& spec, std::optional<double> override_tol = std::nullopt,
                       std::optional<std::uint64_t> override_seed = std::nullopt);

// Validates cross-field consistency (action matches group and algebra, subgroup closed).
void check_spec(const ExperimentSpec& spec);

}  // namespace steinlab
