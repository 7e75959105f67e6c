#include "chcprune/core/syntax.hpp"

#include <algorithm>

namespace chcprune {

LinearExpr LinearExpr::constant(Integer value) {
  LinearExpr e;
  e.constant_ = std::move(value);
  return e;
}

LinearExpr LinearExpr::variable(std::string name, Integer coeff) {
  LinearExpr e;
  e.add(name, coeff);
  return e;
}

void LinearExpr::add(const std::string& var, const Integer& coeff) {
  auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Monomial& m) { return m.var == var; });
  if (it == terms_.end()) {
    if (coeff != 0) terms_.push_back({coeff, var});
    return;
  }
  it->coeff += coeff;
  if (it->coeff == 0) terms_.erase(it);
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  for (const auto& m : other.terms_) add(m.var, m.coeff);
  constant_ += other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  for (const auto& m : other.terms_) add(m.var, -m.coeff);
  constant_ -= other.constant_;
  return *this;
}

LinearExpr& LinearExpr::scale(const Integer& factor) {
  if (factor == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& m : terms_) m.coeff *= factor;
  constant_ *= factor;
  return *this;
}

Integer LinearExpr::coeff(const std::string& var) const {
  for (const auto& m : terms_)
    if (m.var == var) return m.coeff;
  return 0;
}

bool operator==(const LinearExpr& a, const LinearExpr& b) {
  if (a.constant_ != b.constant_ || a.terms_.size() != b.terms_.size()) return false;
  for (const auto& m : a.terms_)
    if (b.coeff(m.var) != m.coeff) return false;
  return true;
}

void collect_vars(const Term& t, VarList& out) {
  if (t.is_var()) out.add(t.name());
}

void collect_vars(const Atom& a, VarList& out) {
  for (const auto& t : a.args) collect_vars(t, out);
}

void collect_vars(const LinearExpr& e, VarList& out) {
  for (const auto& m : e.terms()) out.add(m.var);
}

void collect_vars(const AtomicConstraint& c, VarList& out) {
  if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
    collect_vars(lin->lhs, out);
    collect_vars(lin->rhs, out);
  } else {
    for (const auto& t : std::get<ArrayConstraint>(c).args) collect_vars(t, out);
  }
}

void collect_vars(const Constraint& c, VarList& out) {
  for (const auto& a : c) collect_vars(a, out);
}

void collect_vars(const Clause& c, VarList& out) {
  collect_vars(c.head, out);
  collect_vars(c.constraint, out);
  for (const auto& b : c.body) collect_vars(b, out);
}

bool is_array(const AtomicConstraint& c) { return std::holds_alternative<ArrayConstraint>(c); }

bool has_array_constraints(const Constraint& c) {
  return std::any_of(c.begin(), c.end(), [](const AtomicConstraint& a) { return is_array(a); });
}

Term substitute(const Substitution& s, const Term& t) {
  if (!t.is_var()) return t;
  auto it = s.find(t.name());
  return it == s.end() ? t : it->second;
}

Atom substitute(const Substitution& s, const Atom& a) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(substitute(s, t));
  return out;
}

LinearExpr substitute(const Substitution& s, const LinearExpr& e) {
  LinearExpr out = LinearExpr::constant(e.constant_term());
  for (const auto& m : e.terms()) {
    Term t = substitute(s, Term::var(m.var));
    if (t.is_var())
      out.add(t.name(), m.coeff);
    else
      out.add_constant(m.coeff * t.value());
  }
  return out;
}

AtomicConstraint substitute(const Substitution& s, const AtomicConstraint& c) {
  if (const auto* lin = std::get_if<LinearConstraint>(&c))
    return LinearConstraint{substitute(s, lin->lhs), lin->rel, substitute(s, lin->rhs)};
  const auto& arr = std::get<ArrayConstraint>(c);
  ArrayConstraint out{arr.op, {}};
  for (const auto& t : arr.args) out.args.push_back(substitute(s, t));
  return out;
}

Constraint substitute(const Substitution& s, const Constraint& c) {
  Constraint out;
  out.reserve(c.size());
  for (const auto& a : c) out.push_back(substitute(s, a));
  return out;
}

Clause substitute(const Substitution& s, const Clause& c) {
  Clause out{substitute(s, c.head), substitute(s, c.constraint), {}};
  out.body.reserve(c.body.size());
  for (const auto& b : c.body) out.body.push_back(substitute(s, b));
  return out;
}

std::vector<std::string> predicates(const Program& p) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto note = [&](const Atom& a) {
    if (seen.insert(a.predicate).second) out.push_back(a.predicate);
  };
  for (const auto& c : p.clauses) {
    note(c.head);
    for (const auto& b : c.body) note(b);
  }
  return out;
}

std::map<std::string, std::size_t> arities(const Program& p) {
  std::map<std::string, std::size_t> out;
  auto note = [&](const Atom& a) {
    auto [it, fresh] = out.emplace(a.predicate, a.arity());
    if (!fresh && it->second != a.arity())
      throw ValidationError("predicate '" + a.predicate + "' used with arities " + std::to_string(it->second) +
                            " and " + std::to_string(a.arity()));
  };
  for (const auto& c : p.clauses) {
    note(c.head);
    for (const auto& b : c.body) note(b);
  }
  return out;
}

void validate(const Program& p) {
  auto ar = arities(p);
  if (auto it = ar.find(std::string(kQuery)); it != ar.end() && it->second != 0)
    throw ValidationError("query predicate 'unsafe' must be nullary");
  for (std::size_t i = 0; i < p.clauses.size(); ++i)
    for (const auto& b : p.clauses[i].body)
      if (b.predicate == kQuery)
        throw ValidationError("clause " + std::to_string(i + 1) + ": 'unsafe' may only occur in clause heads");
}

std::size_t total_arity(const Program& p) {
  std::size_t n = 0;
  for (const auto& [_, a] : arities(p)) n += a;
  return n;
}

}  // namespace chcprune
