#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chcprune/core/syntax.hpp"

namespace chcprune::testing {

using Assignment = std::map<std::string, long long>;

/// Finite-domain search over small integer boxes, with bounds propagation.
/// Deliberately shares no code with the Fourier-Motzkin machinery.
class BruteForce {
 public:
  /// Throws Error for array constraints.
  explicit BruteForce(const Constraint& c);

  const std::vector<std::string>& variables() const { return vars_; }

  /// A solution with every free variable in [lo, hi] and `fixed` variables at
  /// their values (names not in the constraint are ignored).
  std::optional<Assignment> solve(long long lo, long long hi, const Assignment& fixed = {}) const;

  /// Nodes visited by the last solve call.
  std::size_t nodes() const { return nodes_; }

 private:
  struct Row {
    std::vector<std::pair<std::size_t, long long>> terms;
    long long constant;  // sum + constant >= 0
  };

  bool propagate(std::vector<long long>& lo, std::vector<long long>& hi) const;
  bool search(std::vector<long long>& lo, std::vector<long long>& hi) const;

  std::vector<std::string> vars_;
  std::vector<Row> rows_;
  mutable std::size_t nodes_ = 0;
};

/// A value of `x` in [xlo, xhi] for which no other variable assignment in
/// [lo, hi] satisfies `c`; nullopt if every value has a witness.
std::optional<long long> forall_exists_counterexample(const std::string& x, const Constraint& c, long long xlo,
                                                      long long xhi, long long lo, long long hi);

}  // namespace chcprune::testing
