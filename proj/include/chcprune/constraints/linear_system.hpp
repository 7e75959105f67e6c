#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chcprune/core/syntax.hpp"

namespace chcprune {

/// `sum(coeffs[v] * v) + constant >= 0`
struct Inequality {
  std::map<std::string, Integer> coeffs;
  Integer constant = 0;
  friend bool operator==(const Inequality&, const Inequality&) = default;
};

/// Translates a linear atomic constraint to one (or, for `=`, two)
/// inequalities over the integers.
std::vector<Inequality> to_inequalities(const LinearConstraint& c);

/// A conjunction of integer inequalities with Fourier-Motzkin elimination.
/// Rows are kept gcd-normalized with the constant tightened (floored), which
/// preserves the integer solution set.
class LinearSystem {
 public:
  enum class Step { done, inadmissible, too_large };

  struct Bounds {
    std::optional<Integer> lo;
    std::optional<Integer> hi;
    bool empty = false;
  };

  static constexpr std::size_t kDefaultRowLimit = 4000;

  explicit LinearSystem(std::size_t row_limit = kDefaultRowLimit) : row_limit_(row_limit) {}

  /// Returns nullopt if `c` contains array constraints.
  static std::optional<LinearSystem> from(const Constraint& c, std::size_t row_limit = kDefaultRowLimit);

  void add(Inequality row);

  /// True once a ground row with negative constant has been derived.
  bool infeasible() const { return infeasible_; }
  const std::vector<Inequality>& rows() const { return rows_; }
  std::vector<std::string> variables() const;

  /// One-sided occurrence, or coefficient ±1 in every row that mentions
  /// `var`. Eliminating such a variable yields the exact integer projection.
  bool admissible(const std::string& var) const;

  /// Fourier-Motzkin step. With `integer_guard`, refuses inadmissible
  /// variables; without it the result is the rational projection (an
  /// over-approximation of the integer one).
  Step eliminate(const std::string& var, bool integer_guard);

  /// Eliminates every variable except `keep`, choosing admissible variables
  /// first. Stops early once infeasible.
  Step eliminate_all_but(const std::vector<std::string>& keep, bool integer_guard);

  /// Interval of integer values `var` can take in the rational relaxation,
  /// rounded inward. Nullopt when the elimination exceeds the row limit.
  std::optional<Bounds> bounds(const std::string& var) const;

 private:
  void insert_normalized(Inequality row);

  std::vector<Inequality> rows_;
  std::size_t row_limit_;
  bool infeasible_ = false;
};

/// Floor and ceiling of a / b for b > 0.
Integer floor_div(const Integer& a, const Integer& b);
Integer ceil_div(const Integer& a, const Integer& b);

}  // namespace chcprune
