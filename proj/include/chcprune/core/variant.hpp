#pragma once

#include <map>
#include <optional>
#include <string>

#include "chcprune/core/syntax.hpp"

namespace chcprune {

/// Injective map between variable names. Variables outside the domain are
/// mapped to themselves.
class Renaming {
 public:
  /// Adds `from -> to`. Returns false if this would break functionality or
  /// injectivity.
  bool bind(const std::string& from, const std::string& to);

  std::optional<std::string> lookup(const std::string& from) const;
  std::string operator()(const std::string& v) const;

  Renaming inverse() const;
  Substitution as_substitution() const;

  Term apply(const Term& t) const;
  Atom apply(const Atom& a) const;
  Clause apply(const Clause& c) const;

  const std::map<std::string, std::string>& pairs() const { return forward_; }
  bool empty() const { return forward_.empty(); }

  friend bool operator==(const Renaming& a, const Renaming& b) { return a.forward_ == b.forward_; }

 private:
  std::map<std::string, std::string> forward_;
  std::map<std::string, std::string> backward_;
};

/// Returns θ with aθ = b when a and b are variants of each other.
std::optional<Renaming> variant_of(const Atom& a, const Atom& b);

/// A key shared by exactly the atoms of one variant class, e.g. `p(#0,3,#0)`.
std::string variant_key(const Atom& a);

}  // namespace chcprune
