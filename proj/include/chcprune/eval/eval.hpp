#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chcprune/constraints/analysis.hpp"
#include "chcprune/core/syntax.hpp"

namespace chcprune::eval {

/// Closed integer interval; a missing end is unbounded.
struct Interval {
  std::optional<Integer> lo;
  std::optional<Integer> hi;

  bool contains(const Integer& v) const { return (!lo || *lo <= v) && (!hi || v <= *hi); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Over-approximation of the argument values a predicate can take in any
/// derivation of `unsafe`.
struct Box {
  bool reachable = false;
  std::vector<Interval> slots;
};

std::map<std::string, Box> relevance_boxes(const Program& prog, std::size_t widen_after = 3);

/// A derived atom. Variables (`_0`, `_1`, ...) are universally quantified:
/// `p(_0,3)` stands for p(v,3) for every integer v.
struct Fact {
  std::vector<Term> args;
  bool ground() const;
  friend bool operator==(const Fact&, const Fact&) = default;
};

std::string to_string(const std::string& predicate, const Fact& f);

struct Options {
  /// Keep only facts inside the relevance boxes of `unsafe`.
  bool relevance = false;
  bool stop_at_unsafe = false;
  std::size_t max_facts = 200000;
  std::size_t max_steps = 20000000;
};

struct BoundedModel {
  std::int64_t bound = 0;
  std::map<std::string, std::vector<Fact>> facts;
  /// Some (relevant) solution may lie outside [-bound, bound], or a
  /// constraint could not be decided; absent facts are then inconclusive.
  bool clipped = false;
  bool unsafe_derived = false;

  std::size_t fact_count() const;
  /// Whether the ground atom is covered by a derived fact.
  bool contains(const std::string& predicate, const std::vector<Integer>& args) const;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Least model of `prog` restricted to integers in [-bound, bound]. Throws
/// BudgetExceeded, and Error for array constraints.
BoundedModel bounded_least_model(const Program& prog, std::int64_t bound, const Options& options = {});

/// holds if `unsafe` is derived, fails if it is not and the model is not
/// clipped, unknown otherwise (also when a budget is exhausted).
TriState derives_unsafe(const Program& prog, std::int64_t bound,
                        const Options& options = {true, true, 50000, 500000});

}  // namespace chcprune::eval
