#include "chcprune/constraints/linear_system.hpp"

#include <algorithm>
#include <set>

namespace chcprune {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;  // truncates toward zero
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

Integer ceil_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && (a > 0)) ++q;
  return q;
}

std::vector<Inequality> to_inequalities(const LinearConstraint& c) {
  LinearExpr e = c.lhs;
  e -= c.rhs;
  auto row = [](const LinearExpr& x) {
    Inequality r;
    for (const auto& m : x.terms()) r.coeffs[m.var] = m.coeff;
    r.constant = x.constant_term();
    return r;
  };
  LinearExpr neg = e;
  neg.scale(-1);
  switch (c.rel) {
    case Relation::eq: return {row(e), row(neg)};
    case Relation::ge: return {row(e)};
    case Relation::gt: e.add_constant(-1); return {row(e)};
    case Relation::le: return {row(neg)};
    case Relation::lt: neg.add_constant(-1); return {row(neg)};
  }
  return {};
}

std::optional<LinearSystem> LinearSystem::from(const Constraint& c, std::size_t row_limit) {
  LinearSystem s(row_limit);
  for (const auto& k : c) {
    const auto* lin = std::get_if<LinearConstraint>(&k);
    if (!lin) return std::nullopt;
    for (auto& r : to_inequalities(*lin)) s.add(std::move(r));
  }
  return s;
}

void LinearSystem::add(Inequality row) { insert_normalized(std::move(row)); }

void LinearSystem::insert_normalized(Inequality row) {
  if (infeasible_) return;
  for (auto it = row.coeffs.begin(); it != row.coeffs.end();)
    it = it->second == 0 ? row.coeffs.erase(it) : std::next(it);
  if (row.coeffs.empty()) {
    if (row.constant < 0) {
      infeasible_ = true;
      rows_.clear();
    }
    return;
  }
  Integer g = 0;
  for (const auto& [_, c] : row.coeffs) g = gcd(g, Integer(abs(c)));
  if (g > 1) {
    for (auto& [_, c] : row.coeffs) c /= g;
    row.constant = floor_div(row.constant, g);
  }
  // Keep only the tightest of parallel rows.
  for (auto& r : rows_) {
    if (r.coeffs == row.coeffs) {
      if (row.constant < r.constant) r.constant = row.constant;
      return;
    }
  }
  rows_.push_back(std::move(row));
}

std::vector<std::string> LinearSystem::variables() const {
  std::set<std::string> vs;
  for (const auto& r : rows_)
    for (const auto& [v, _] : r.coeffs) vs.insert(v);
  return {vs.begin(), vs.end()};
}

bool LinearSystem::admissible(const std::string& var) const {
  bool pos = false, neg = false, unit = true;
  for (const auto& r : rows_) {
    auto it = r.coeffs.find(var);
    if (it == r.coeffs.end()) continue;
    (it->second > 0 ? pos : neg) = true;
    if (abs(it->second) != 1) unit = false;
  }
  return !(pos && neg) || unit;
}

LinearSystem::Step LinearSystem::eliminate(const std::string& var, bool integer_guard) {
  if (infeasible_) return Step::done;
  if (integer_guard && !admissible(var)) return Step::inadmissible;
  std::vector<Inequality> pos, neg, rest;
  for (auto& r : rows_) {
    auto it = r.coeffs.find(var);
    if (it == r.coeffs.end())
      rest.push_back(std::move(r));
    else
      (it->second > 0 ? pos : neg).push_back(std::move(r));
  }
  if (rest.size() + pos.size() * neg.size() > row_limit_) {
    // Restore; the caller decides what to do with an oversized step.
    rows_ = std::move(rest);
    rows_.insert(rows_.end(), pos.begin(), pos.end());
    rows_.insert(rows_.end(), neg.begin(), neg.end());
    return Step::too_large;
  }
  rows_ = std::move(rest);
  for (const auto& p : pos) {
    const Integer a = p.coeffs.at(var);
    for (const auto& n : neg) {
      const Integer b = -n.coeffs.at(var);
      Inequality combined;
      for (const auto& [v, c] : p.coeffs)
        if (v != var) combined.coeffs[v] += b * c;
      for (const auto& [v, c] : n.coeffs)
        if (v != var) combined.coeffs[v] += a * c;
      combined.constant = b * p.constant + a * n.constant;
      insert_normalized(std::move(combined));
      if (infeasible_) return Step::done;
    }
  }
  return Step::done;
}

LinearSystem::Step LinearSystem::eliminate_all_but(const std::vector<std::string>& keep, bool integer_guard) {
  for (;;) {
    if (infeasible_) return Step::done;
    std::vector<std::string> candidates;
    for (const auto& v : variables())
      if (std::find(keep.begin(), keep.end(), v) == keep.end()) candidates.push_back(v);
    if (candidates.empty()) return Step::done;
    // Cheapest admissible variable first (fewest generated rows).
    std::optional<std::string> best;
    std::size_t best_cost = 0;
    for (const auto& v : candidates) {
      if (integer_guard && !admissible(v)) continue;
      std::size_t p = 0, n = 0;
      for (const auto& r : rows_) {
        auto it = r.coeffs.find(v);
        if (it != r.coeffs.end()) ++(it->second > 0 ? p : n);
      }
      if (!best || p * n < best_cost) {
        best = v;
        best_cost = p * n;
      }
    }
    if (!best) return Step::inadmissible;
    Step s = eliminate(*best, integer_guard);
    if (s != Step::done) return s;
  }
}

std::optional<LinearSystem::Bounds> LinearSystem::bounds(const std::string& var) const {
  LinearSystem copy = *this;
  if (copy.eliminate_all_but({var}, false) != Step::done) return std::nullopt;
  Bounds b;
  if (copy.infeasible()) {
    b.empty = true;
    return b;
  }
  for (const auto& r : copy.rows()) {
    auto it = r.coeffs.find(var);
    if (it == r.coeffs.end()) continue;
    const Integer& a = it->second;
    if (a > 0) {
      Integer lo = ceil_div(-r.constant, a);
      if (!b.lo || lo > *b.lo) b.lo = lo;
    } else {
      Integer hi = floor_div(r.constant, -a);
      if (!b.hi || hi < *b.hi) b.hi = hi;
    }
  }
  if (b.lo && b.hi && *b.lo > *b.hi) b.empty = true;
  return b;
}

}  // namespace chcprune
