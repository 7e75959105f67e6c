#pragma once

#include <map>
#include <optional>
#include <string>

#include "chcprune/core/syntax.hpp"

namespace chcprune {

/// Text form of a clause with variables named by first occurrence (head,
/// body atoms, then constraints) and each conjunct in a normal form.
/// Conjuncts are sorted, so conjunct order does not matter.
std::string canonical_clause(const Clause& c);

/// Finds a predicate bijection (fixing `unsafe`) under which both programs
/// have the same multiset of canonical clauses. Returns the mapping from
/// predicates of `a` to predicates of `b`.
std::optional<std::map<std::string, std::string>> find_isomorphism(const Program& a, const Program& b);

inline bool isomorphic(const Program& a, const Program& b) { return find_isomorphism(a, b).has_value(); }

}  // namespace chcprune
