#pragma once

#include <optional>
#include <string>

#include "chcprune/constraints/analysis.hpp"

namespace chcprune::testing {

/// Describes the disagreement when brute force contradicts `verdict` for
/// satisfiability of `c`; `unknown` is never contradicted.
std::optional<std::string> contradicts_satisfiable(const Constraint& c, TriState verdict);

/// Same for validity of `forall x exists rest. c`.
std::optional<std::string> contradicts_forall_exists(const std::string& x, const Constraint& c, TriState verdict);

}  // namespace chcprune::testing
