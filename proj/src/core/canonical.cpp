#include "chcprune/core/canonical.hpp"

#include <algorithm>
#include <set>

#include "chcprune/core/io.hpp"

namespace chcprune {

namespace {

std::string conjunct_form(const AtomicConstraint& k, const std::map<std::string, std::size_t>& index) {
  auto name = [&](const std::string& v) { return "V" + std::to_string(index.at(v)); };
  if (const auto* arr = std::get_if<ArrayConstraint>(&k)) {
    std::string out = arr->op == ArrayOp::read ? "read(" : "write(";
    for (std::size_t i = 0; i < arr->args.size(); ++i) {
      if (i) out += ",";
      out += arr->args[i].is_var() ? name(arr->args[i].name()) : arr->args[i].value().str();
    }
    return out + ")";
  }
  const auto& lin = std::get<LinearConstraint>(k);
  // Bring to `e >= 0` or `e = 0` over the integers.
  LinearExpr e = lin.lhs;
  e -= lin.rhs;
  std::string rel = "ge";
  switch (lin.rel) {
    case Relation::eq: rel = "eq"; break;
    case Relation::ge: break;
    case Relation::gt: e.add_constant(-1); break;
    case Relation::le: e.scale(-1); break;
    case Relation::lt:
      e.scale(-1);
      e.add_constant(-1);
      break;
  }
  std::vector<std::pair<std::size_t, Integer>> mons;
  for (const auto& m : e.terms()) mons.emplace_back(index.at(m.var), m.coeff);
  std::sort(mons.begin(), mons.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  Integer k0 = e.constant_term();
  if (rel == "eq" && !mons.empty() && mons.front().second < 0) {
    for (auto& m : mons) m.second = -m.second;
    k0 = -k0;
  }
  std::string out = rel + ":";
  for (const auto& [v, c] : mons) out += c.str() + "*V" + std::to_string(v) + "+";
  return out + k0.str();
}

std::string term_form(const Term& t, const std::map<std::string, std::size_t>& index) {
  return t.is_var() ? "V" + std::to_string(index.at(t.name())) : t.value().str();
}

std::string atom_form(const Atom& a, const std::map<std::string, std::size_t>& index) {
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (i) out += ",";
    out += term_form(a.args[i], index);
  }
  return out + ")";
}

}  // namespace

std::string canonical_clause(const Clause& c) {
  VarList order;
  collect_vars(c.head, order);
  for (const auto& b : c.body) collect_vars(b, order);
  collect_vars(c.constraint, order);
  std::map<std::string, std::size_t> index;
  for (const auto& v : order.items()) index.emplace(v, index.size());

  std::vector<std::string> conj;
  for (const auto& k : c.constraint) conj.push_back(conjunct_form(k, index));
  std::sort(conj.begin(), conj.end());

  std::string out = atom_form(c.head, index) + " :- ";
  for (const auto& s : conj) out += s + " & ";
  out += "|";
  for (const auto& b : c.body) out += " " + atom_form(b, index);
  return out;
}

namespace {

std::vector<std::string> clause_multiset(const Program& p, const std::map<std::string, std::string>& rename) {
  std::vector<std::string> out;
  for (auto c : p.clauses) {
    c.head.predicate = rename.at(c.head.predicate);
    for (auto& b : c.body) b.predicate = rename.at(b.predicate);
    out.push_back(canonical_clause(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Signature {
  std::size_t arity;
  std::size_t defining;
  std::size_t uses;
  bool operator==(const Signature&) const = default;
};

std::map<std::string, Signature> signatures(const Program& p) {
  std::map<std::string, Signature> out;
  for (const auto& [pred, n] : arities(p)) out[pred] = {n, 0, 0};
  for (const auto& c : p.clauses) {
    ++out[c.head.predicate].defining;
    for (const auto& b : c.body) ++out[b.predicate].uses;
  }
  return out;
}

}  // namespace

std::optional<std::map<std::string, std::string>> find_isomorphism(const Program& a, const Program& b) {
  if (a.clauses.size() != b.clauses.size()) return std::nullopt;
  auto sa = signatures(a);
  auto sb = signatures(b);
  if (sa.size() != sb.size()) return std::nullopt;
  if (sa.count(std::string(kQuery)) != sb.count(std::string(kQuery))) return std::nullopt;

  auto target = clause_multiset(b, [&] {
    std::map<std::string, std::string> id;
    for (const auto& [p, _] : sb) id[p] = p;
    return id;
  }());

  std::vector<std::string> from;
  for (const auto& [p, _] : sa) from.push_back(p);
  std::map<std::string, std::string> mapping;
  std::set<std::string> used;
  std::optional<std::map<std::string, std::string>> found;

  auto search = [&](auto&& self, std::size_t i) -> void {
    if (found) return;
    if (i == from.size()) {
      if (clause_multiset(a, mapping) == target) found = mapping;
      return;
    }
    const std::string& p = from[i];
    for (const auto& [q, sig] : sb) {
      if (used.count(q) || !(sig == sa.at(p))) continue;
      if ((p == kQuery) != (q == kQuery)) continue;
      mapping[p] = q;
      used.insert(q);
      self(self, i + 1);
      used.erase(q);
      mapping.erase(p);
      if (found) return;
    }
  };
  search(search, 0);
  return found;
}

}  // namespace chcprune
