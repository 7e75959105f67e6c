#include "erasure_validator.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "brute_force.hpp"

namespace chcprune::testing {

namespace {

// Variables reachable from `x` through shared conjuncts, excluding `x`.
std::set<std::string> reachable(const std::string& x, const Constraint& c) {
  std::vector<std::vector<std::string>> conj;
  for (const auto& k : c) conj.push_back(vars_of(k));
  std::set<std::string> seen{x};
  std::deque<std::string> todo{x};
  std::vector<bool> used(conj.size(), false);
  while (!todo.empty()) {
    std::string v = todo.front();
    todo.pop_front();
    for (std::size_t i = 0; i < conj.size(); ++i) {
      if (used[i] || std::find(conj[i].begin(), conj[i].end(), v) == conj[i].end()) continue;
      used[i] = true;
      for (const auto& w : conj[i])
        if (seen.insert(w).second) todo.push_back(w);
    }
  }
  seen.erase(x);
  return seen;
}

bool refuted(const std::string& x, const Constraint& c) {
  for (const auto& k : c)
    if (std::holds_alternative<ArrayConstraint>(k)) return true;
  auto cex = forall_exists_counterexample(x, c, -12, 12, -48, 48);
  if (!cex) return false;
  // Confirm with a wider witness range before reporting.
  BruteForce bf(c);
  return !bf.solve(-400, 400, {{x, *cex}});
}

}  // namespace

std::vector<ErasureProblem> check_erasure(const Program& prog, const cfar::Erasure& e) {
  std::vector<ErasureProblem> out;
  std::map<std::string, std::size_t> ar;
  for (const auto& c : prog.clauses) {
    ar[c.head.predicate] = c.head.arity();
    for (const auto& b : c.body) ar[b.predicate] = b.arity();
  }
  for (const auto& pair : e) {
    const auto& [p, k] = pair;
    auto it = ar.find(p);
    if (it == ar.end() || k < 1 || k > it->second) {
      out.push_back({pair, 0, "pair does not name an argument position"});
      continue;
    }
    for (std::size_t ci = 0; ci < prog.clauses.size(); ++ci) {
      const Clause& c = prog.clauses[ci];
      if (c.head.predicate != p) continue;
      auto fail = [&](std::string why) { out.push_back({pair, ci, std::move(why)}); };
      const Term& arg = c.head.args[k - 1];
      if (!arg.is_var()) {
        fail("argument is not a variable");
        continue;
      }
      const std::string x = arg.name();
      bool repeated = false;
      for (std::size_t j = 0; j < c.head.arity(); ++j)
        if (j != k - 1 && c.head.args[j] == arg) repeated = true;
      if (repeated) {
        fail("variable repeated in the head");
        continue;
      }
      auto linked = reachable(x, c.constraint);
      bool bad = false;
      for (std::size_t j = 0; j < c.head.arity() && !bad; ++j) {
        const Term& t = c.head.args[j];
        if (j != k - 1 && t.is_var() && linked.count(t.name())) bad = true;
      }
      if (bad) {
        fail("linked to another head variable");
        continue;
      }
      for (const auto& b : c.body) {
        for (std::size_t j = 0; j < b.arity() && !bad; ++j) {
          if (e.count({b.predicate, j + 1})) continue;
          const Term& t = b.args[j];
          if (t.is_var() && (t.name() == x || linked.count(t.name()))) bad = true;
        }
      }
      if (bad) {
        fail("linked to a surviving body argument");
        continue;
      }
      if (refuted(x, c.constraint)) fail("some value of the variable admits no solution");
    }
  }
  return out;
}

}  // namespace chcprune::testing
