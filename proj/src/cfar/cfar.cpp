#include "chcprune/cfar/cfar.hpp"

#include <algorithm>
#include <sstream>

#include "chcprune/constraints/analysis.hpp"

namespace chcprune::cfar {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::not_variable: return "i-not-variable";
    case Condition::forall_exists: return "i-forall-exists";
    case Condition::head_constrained: return "ii-head-constrained";
    case Condition::body_constrained: return "iii-body-constrained";
  }
  return "?";
}

Erasure full_erasure(const Program& prog) {
  Erasure e;
  for (const auto& [p, n] : arities(prog))
    for (std::size_t k = 1; k <= n; ++k) e.emplace(p, k);
  return e;
}

ErasedNames::ErasedNames(const Program& prog, const Erasure& e, const NamingOptions& options) {
  std::map<std::string, std::vector<std::size_t>> erased;
  for (const auto& [p, k] : e) erased[p].push_back(k);
  auto preds = predicates(prog);
  std::set<std::string> used(preds.begin(), preds.end());
  for (const auto& p : preds) {
    auto it = erased.find(p);
    if (it == erased.end()) continue;
    if (options.keep_names) {
      names_.emplace(p, p);
      continue;
    }
    std::string name = p + "_";
    for (auto k : it->second) name += "_" + std::to_string(k);
    while (used.count(name)) name += "_";
    used.insert(name);
    names_.emplace(p, name);
  }
}

const std::string& ErasedNames::operator()(const std::string& predicate) const {
  auto it = names_.find(predicate);
  return it == names_.end() ? predicate : it->second;
}

Atom erase_atom(const Atom& a, const Erasure& e, const ErasedNames* names) {
  Atom out{names ? (*names)(a.predicate) : a.predicate, {}};
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!e.count({a.predicate, i + 1})) out.args.push_back(a.args[i]);
  return out;
}

Clause erase_clause(const Clause& c, const Erasure& e, const ErasedNames* names) {
  Clause out{erase_atom(c.head, e, names), c.constraint, {}};
  for (const auto& b : c.body) out.body.push_back(erase_atom(b, e, names));
  return out;
}

Program erase_program(const Program& prog, const Erasure& e, const NamingOptions& options) {
  ErasedNames names(prog, e, options);
  Program out;
  for (const auto& c : prog.clauses) out.clauses.push_back(erase_clause(c, e, &names));
  return out;
}

std::optional<Condition> check_clause(const Position& pair, const Erasure& e, const Clause& c) {
  const auto& [p, k] = pair;
  if (c.head.predicate != p || k == 0 || k > c.head.arity()) throw Error("check_clause: clause does not define " + p);
  const Term& arg = c.head.args[k - 1];
  if (!arg.is_var()) return Condition::not_variable;
  const std::string& x = arg.name();
  if (forall_exists_valid(x, c.constraint) != TriState::holds) return Condition::forall_exists;

  ConstraintGraph g(c.constraint);
  for (std::size_t j = 0; j < c.head.arity(); ++j) {
    const Term& t = c.head.args[j];
    if (j == k - 1 || !t.is_var()) continue;
    if (t.name() == x || g.connected(x, t.name())) return Condition::head_constrained;
  }
  for (const auto& b : c.body) {
    for (std::size_t j = 0; j < b.arity(); ++j) {
      const Term& t = b.args[j];
      if (!t.is_var() || e.count({b.predicate, j + 1})) continue;
      if (t.name() == x || g.connected(x, t.name())) return Condition::body_constrained;
    }
  }
  return std::nullopt;
}

std::optional<Violation> check_pair(const Position& pair, const Erasure& e, const Program& prog) {
  for (std::size_t i = 0; i < prog.clauses.size(); ++i) {
    if (prog.clauses[i].head.predicate != pair.first) continue;
    if (auto cond = check_clause(pair, e, prog.clauses[i])) return Violation{pair, i, *cond};
  }
  return std::nullopt;
}

Result transform(const Program& prog, const Options& options) {
  validate(prog);
  Result r;
  Erasure e = full_erasure(prog);
  r.report.pairs_total = e.size();
  r.report.arity_before = total_arity(prog);

  auto ar = arities(prog);
  std::vector<Position> order;
  for (const auto& p : predicates(prog))
    for (std::size_t k = 1; k <= ar.at(p); ++k) order.emplace_back(p, k);

  // Each removal can only expose more violations, so passes repeat until a
  // pass removes nothing.
  for (bool changed = true; changed;) {
    changed = false;
    ++r.report.passes;
    for (const auto& pair : order) {
      if (!e.count(pair)) continue;
      if (auto v = check_pair(pair, e, prog)) {
        e.erase(pair);
        r.report.violations.push_back(*v);
        ++r.report.removed_by_condition[v->condition];
        changed = true;
      }
    }
  }

  ErasedNames names(prog, e, options.naming);
  for (const auto& c : prog.clauses) r.program.clauses.push_back(erase_clause(c, e, &names));
  r.report.pairs_kept = e.size();
  r.report.pairs_removed = r.report.pairs_total - e.size();
  r.report.arity_after = total_arity(r.program);
  for (const auto& [from, to] : names.renamed())
    if (from != to) r.report.renamed.emplace(from, to);
  r.erasure = std::move(e);
  return r;
}

std::string serialize(const Erasure& e, const std::map<std::string, std::size_t>& arities) {
  std::string out;
  for (const auto& [p, k] : e) {
    auto it = arities.find(p);
    if (it == arities.end()) throw Error("serialize: unknown predicate " + p);
    out += p + "/" + std::to_string(it->second) + " " + std::to_string(k) + "\n";
  }
  return out;
}

Erasure parse_erasure(std::string_view text) {
  Erasure e;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string sig;
    long long k = 0;
    auto slash = std::string::npos;
    if (ls >> sig >> k) slash = sig.rfind('/');
    std::string rest;
    if (slash == std::string::npos || slash == 0 || (ls >> rest))
      throw Error("erasure line " + std::to_string(lineno) + ": expected 'p/arity k'");
    long long n = 0;
    try {
      std::size_t used = 0;
      n = std::stoll(sig.substr(slash + 1), &used);
      if (used != sig.size() - slash - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("erasure line " + std::to_string(lineno) + ": bad arity");
    }
    if (k < 1 || k > n) throw Error("erasure line " + std::to_string(lineno) + ": position out of range");
    e.emplace(sig.substr(0, slash), static_cast<std::size_t>(k));
  }
  return e;
}

}  // namespace chcprune::cfar
