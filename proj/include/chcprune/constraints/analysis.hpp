#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chcprune/core/syntax.hpp"

namespace chcprune {

enum class TriState { holds, fails, unknown };

std::string_view to_string(TriState t);

/// Variables of a constraint, connected when they share a conjunct. Array
/// pseudo-constraints connect all of their variables as well.
class ConstraintGraph {
 public:
  explicit ConstraintGraph(const Constraint& c);

  bool contains(const std::string& v) const { return index_.count(v) != 0; }
  /// Same connected component. Variables absent from the constraint are
  /// connected to nothing.
  bool connected(const std::string& x, const std::string& y) const;
  /// Indices of the conjuncts in the component of `v` (empty if absent).
  std::vector<std::size_t> component_conjuncts(const std::string& v) const;

 private:
  std::size_t find(std::size_t i) const;

  std::map<std::string, std::size_t> index_;
  mutable std::vector<std::size_t> parent_;
  // Component representative of each conjunct (npos for ground conjuncts).
  std::vector<std::size_t> conjunct_root_;
};

/// `x` is constrained to `y` in `c`: both occur in `c`, are distinct, and
/// are linked through a chain of conjuncts.
bool constrained_to(const std::string& x, const std::string& y, const Constraint& c);

/// Integer satisfiability by Fourier-Motzkin under the unit-coefficient
/// guard. `unknown` when the guard rejects every remaining variable, the
/// elimination grows too large, or `c` has array constraints.
TriState is_satisfiable(const Constraint& c);

/// Validity of `forall x exists (vars(c) - {x}). c` over the integers.
TriState forall_exists_valid(const std::string& x, const Constraint& c);

}  // namespace chcprune
