#include "chcprune/constraints/analysis.hpp"

#include <limits>
#include <numeric>

#include "chcprune/constraints/linear_system.hpp"

namespace chcprune {

std::string_view to_string(TriState t) {
  switch (t) {
    case TriState::holds: return "holds";
    case TriState::fails: return "fails";
    case TriState::unknown: return "unknown";
  }
  return "?";
}

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

ConstraintGraph::ConstraintGraph(const Constraint& c) {
  for (const auto& k : c) {
    auto vs = vars_of(k);
    std::size_t first = npos;
    for (const auto& v : vs) {
      auto [it, fresh] = index_.emplace(v, parent_.size());
      if (fresh) parent_.push_back(it->second);
      if (first == npos) {
        first = it->second;
      } else {
        std::size_t a = find(first), b = find(it->second);
        if (a != b) parent_[b] = a;
      }
    }
    conjunct_root_.push_back(first);
  }
}

std::size_t ConstraintGraph::find(std::size_t i) const {
  while (parent_[i] != i) {
    parent_[i] = parent_[parent_[i]];
    i = parent_[i];
  }
  return i;
}

bool ConstraintGraph::connected(const std::string& x, const std::string& y) const {
  auto a = index_.find(x), b = index_.find(y);
  if (a == index_.end() || b == index_.end()) return false;
  return find(a->second) == find(b->second);
}

std::vector<std::size_t> ConstraintGraph::component_conjuncts(const std::string& v) const {
  std::vector<std::size_t> out;
  auto it = index_.find(v);
  if (it == index_.end()) return out;
  std::size_t root = find(it->second);
  for (std::size_t i = 0; i < conjunct_root_.size(); ++i)
    if (conjunct_root_[i] != npos && find(conjunct_root_[i]) == root) out.push_back(i);
  return out;
}

bool constrained_to(const std::string& x, const std::string& y, const Constraint& c) {
  if (x == y) return false;
  return ConstraintGraph(c).connected(x, y);
}

TriState is_satisfiable(const Constraint& c) {
  auto sys = LinearSystem::from(c);
  if (!sys) return TriState::unknown;
  switch (sys->eliminate_all_but({}, true)) {
    case LinearSystem::Step::done: return sys->infeasible() ? TriState::fails : TriState::holds;
    case LinearSystem::Step::inadmissible:
    case LinearSystem::Step::too_large: return TriState::unknown;
  }
  return TriState::unknown;
}

namespace {

// forall x exists rest. c_x, where every conjunct of c_x is in x's component.
TriState component_valid(const std::string& x, const Constraint& cx) {
  if (has_array_constraints(cx)) return TriState::unknown;
  auto sys = LinearSystem::from(cx);
  switch (sys->eliminate_all_but({x}, true)) {
    case LinearSystem::Step::done: break;
    case LinearSystem::Step::inadmissible:
    case LinearSystem::Step::too_large: return TriState::unknown;
  }
  if (sys->infeasible()) return TriState::fails;
  // The residual is the exact projection onto x; any remaining row bounds x.
  return sys->rows().empty() ? TriState::holds : TriState::fails;
}

}  // namespace

TriState forall_exists_valid(const std::string& x, const Constraint& c) {
  ConstraintGraph g(c);
  Constraint cx, rest;
  auto comp = g.component_conjuncts(x);
  std::vector<bool> in_comp(c.size(), false);
  for (auto i : comp) in_comp[i] = true;
  for (std::size_t i = 0; i < c.size(); ++i) (in_comp[i] ? cx : rest).push_back(c[i]);

  TriState r = is_satisfiable(rest);
  TriState k = cx.empty() ? TriState::holds : component_valid(x, cx);
  if (r == TriState::fails || k == TriState::fails) return TriState::fails;
  if (r == TriState::holds && k == TriState::holds) return TriState::holds;
  return TriState::unknown;
}

}  // namespace chcprune
