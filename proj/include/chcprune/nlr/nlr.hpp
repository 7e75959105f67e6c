#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chcprune/core/syntax.hpp"

namespace chcprune::nlr {

enum class DefinitionStatus { pending, unfolded };

/// `predicate(head_vars) :- body_atom`
struct Definition {
  std::string predicate;
  std::vector<std::string> head_vars;
  Atom body_atom;
  DefinitionStatus status = DefinitionStatus::pending;

  Atom head() const;
  Clause as_clause() const;
};

/// Definitions introduced so far, at most one per variant class of body atom.
class DefsIndex {
 public:
  /// New predicates are named `newp<first_suffix>`, `newp<first_suffix+1>`, ...
  explicit DefsIndex(std::size_t first_suffix = 1) : next_suffix_(first_suffix) {}

  struct Outcome {
    std::size_t id;
    bool introduced;
    bool widened;
  };

  /// Reuses the definition whose body atom is a variant of `b`, widening its
  /// head by the image of `v` (new variables appended in `b` order), or
  /// introduces a fresh one with head `v`. A widened definition becomes
  /// pending again.
  Outcome introduce_or_merge(const Atom& b, const std::vector<std::string>& v);

  /// Definition whose body atom is a variant of `b`, if any.
  const Definition* find(const Atom& b) const;
  std::optional<std::size_t> find_id(const Atom& b) const;

  Definition& at(std::size_t id) { return defs_.at(id); }
  const Definition& at(std::size_t id) const { return defs_.at(id); }
  const std::vector<Definition>& definitions() const { return defs_; }
  std::size_t size() const { return defs_.size(); }
  std::size_t widenings() const { return widenings_; }

 private:
  std::vector<Definition> defs_;
  std::map<std::string, std::size_t> by_key_;
  std::size_t next_suffix_;
  std::size_t widenings_ = 0;
};

/// Variables of `clause.body[position]` that also occur in the head, the
/// constraint, or another body atom; ordered by first occurrence in the atom.
std::vector<std::string> linkvars(const Clause& clause, std::size_t position);

struct UnfoldOptions {
  bool drop_unsatisfiable = true;
};

/// Resolves the body atom of `d` against every clause of `prog` defining its
/// predicate. Clauses whose constraint is decided unsatisfiable are dropped
/// (unless disabled). The caller owns the status change of `d`.
std::vector<Clause> unfold(const Definition& d, const Program& prog, const UnfoldOptions& options = {},
                           std::size_t* dropped = nullptr);

struct FoldResult {
  Clause clause;
  /// Definitions introduced or widened while folding.
  std::vector<std::size_t> newly_pending;
};

/// Replaces every body atom over a predicate of `foldable` by the head of its
/// (possibly new or widened) definition.
FoldResult fold_all(const Clause& c, DefsIndex& defs, const std::set<std::string>& foldable);

struct Options {
  bool drop_unsatisfiable = true;
  std::size_t iteration_cap = 100000;
};

struct Report {
  std::size_t definitions = 0;
  std::size_t widenings = 0;
  /// Number of unfolding steps performed.
  std::size_t iterations = 0;
  /// Distinct variant classes of folded body atoms.
  std::size_t variant_classes = 0;
  std::size_t max_arity = 0;
  std::size_t dropped_clauses = 0;
  std::size_t arity_before = 0;
  std::size_t arity_after = 0;
  /// Largest number of unfoldings of one definition.
  std::size_t max_unfoldings_per_definition = 0;
  std::vector<std::string> warnings;

  /// variant_classes * (max_arity + 1)
  std::size_t iteration_bound() const { return variant_classes * (max_arity + 1); }
};

struct Result {
  Program program;
  Report report;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Non-linking variable removal driven from the `unsafe` clauses.
Result transform(const Program& prog, const Options& options = {});

}  // namespace chcprune::nlr
