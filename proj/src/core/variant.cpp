#include "chcprune/core/variant.hpp"

namespace chcprune {

bool Renaming::bind(const std::string& from, const std::string& to) {
  auto f = forward_.find(from);
  if (f != forward_.end()) return f->second == to;
  if (backward_.count(to)) return false;
  forward_.emplace(from, to);
  backward_.emplace(to, from);
  return true;
}

std::optional<std::string> Renaming::lookup(const std::string& from) const {
  auto it = forward_.find(from);
  if (it == forward_.end()) return std::nullopt;
  return it->second;
}

std::string Renaming::operator()(const std::string& v) const {
  auto it = forward_.find(v);
  return it == forward_.end() ? v : it->second;
}

Renaming Renaming::inverse() const {
  Renaming r;
  r.forward_ = backward_;
  r.backward_ = forward_;
  return r;
}

Substitution Renaming::as_substitution() const {
  Substitution s;
  for (const auto& [from, to] : forward_) s.emplace(from, Term::var(to));
  return s;
}

Term Renaming::apply(const Term& t) const { return t.is_var() ? Term::var((*this)(t.name())) : t; }

Atom Renaming::apply(const Atom& a) const { return substitute(as_substitution(), a); }

Clause Renaming::apply(const Clause& c) const { return substitute(as_substitution(), c); }

std::optional<Renaming> variant_of(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.arity() != b.arity()) return std::nullopt;
  Renaming theta;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const Term& x = a.args[i];
    const Term& y = b.args[i];
    if (x.is_var() != y.is_var()) return std::nullopt;
    if (x.is_var()) {
      if (!theta.bind(x.name(), y.name())) return std::nullopt;
    } else if (x.value() != y.value()) {
      return std::nullopt;
    }
  }
  return theta;
}

std::string variant_key(const Atom& a) {
  std::map<std::string, std::size_t> index;
  std::string key = a.predicate + "(";
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (i) key += ',';
    const Term& t = a.args[i];
    if (t.is_var()) {
      auto [it, _] = index.emplace(t.name(), index.size());
      key += '#' + std::to_string(it->second);
    } else {
      key += t.value().str();
    }
  }
  return key + ")";
}

}  // namespace chcprune
