#pragma once

#include <vector>

#include "steinlab/checks.hpp"

namespace steinlab {

// Built-in battery: small algebras paired with the group actions the formulas are checked on.
std::vector<ExperimentSpec> builtin_corpus();

// Runs every corpus entry with the given overrides; entries keep their own order.
std::vector<VerificationReport> run_corpus(std::optional<double> tol = std::nullopt,
                                           std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace steinlab
