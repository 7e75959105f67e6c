#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chcprune/core/syntax.hpp"

namespace chcprune::cfar {

/// (predicate, position) with 1-based position.
using Position = std::pair<std::string, std::size_t>;
using Erasure = std::set<Position>;

enum class Condition { not_variable, forall_exists, head_constrained, body_constrained };

/// `i-not-variable`, `i-forall-exists`, `ii-head-constrained`, `iii-body-constrained`
std::string_view to_string(Condition c);

struct Violation {
  Position pair;
  std::size_t clause_index;
  Condition condition;
};

/// Every argument position of every predicate in `prog`.
Erasure full_erasure(const Program& prog);

struct NamingOptions {
  /// Keep the original symbol for erased predicates instead of `p__k1_k2`.
  bool keep_names = false;
};

/// Erased predicates and the symbols they get in the erased program.
class ErasedNames {
 public:
  ErasedNames(const Program& prog, const Erasure& e, const NamingOptions& options = {});
  const std::string& operator()(const std::string& predicate) const;
  const std::map<std::string, std::string>& renamed() const { return names_; }

 private:
  std::map<std::string, std::string> names_;
};

/// Drops the arguments at erased positions; renames via `names` when given.
Atom erase_atom(const Atom& a, const Erasure& e, const ErasedNames* names = nullptr);
Clause erase_clause(const Clause& c, const Erasure& e, const ErasedNames* names = nullptr);
Program erase_program(const Program& prog, const Erasure& e, const NamingOptions& options = {});

/// First failing condition for erasing `pair` in clause `c` (whose head must
/// be over `pair.first`), given the current erasure `e`.
std::optional<Condition> check_clause(const Position& pair, const Erasure& e, const Clause& c);

/// Scans the clauses defining `pair.first` in program order.
std::optional<Violation> check_pair(const Position& pair, const Erasure& e, const Program& prog);

struct Options {
  NamingOptions naming;
};

struct Report {
  std::size_t pairs_total = 0;
  std::size_t pairs_kept = 0;
  std::size_t pairs_removed = 0;
  std::size_t passes = 0;
  std::map<Condition, std::size_t> removed_by_condition;
  std::size_t arity_before = 0;
  std::size_t arity_after = 0;
  /// Removals in order.
  std::vector<Violation> violations;
  std::map<std::string, std::string> renamed;
};

struct Result {
  Program program;
  Erasure erasure;
  Report report;
};

/// Greatest safe erasure contained in the full erasure, and the erased program.
Result transform(const Program& prog, const Options& options = {});

/// One `p/arity k` line per pair, sorted.
std::string serialize(const Erasure& e, const std::map<std::string, std::size_t>& arities);
/// Inverse of serialize. Throws Error on malformed lines.
Erasure parse_erasure(std::string_view text);

}  // namespace chcprune::cfar
