#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace chcprune {

/// Arbitrary precision integer used for every constant and coefficient.
using Integer = boost::multiprecision::cpp_int;

/// Name of the distinguished nullary query predicate.
inline constexpr std::string_view kQuery = "unsafe";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A broken internal invariant rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A predicate or constraint argument: a variable or an integer constant.
class Term {
 public:
  static Term var(std::string name) { return Term(Rep(std::in_place_index<0>, std::move(name))); }
  static Term integer(Integer value) { return Term(Rep(std::in_place_index<1>, std::move(value))); }

  bool is_var() const { return rep_.index() == 0; }
  bool is_int() const { return rep_.index() == 1; }
  const std::string& name() const { return std::get<0>(rep_); }
  const Integer& value() const { return std::get<1>(rep_); }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  using Rep = std::variant<std::string, Integer>;
  explicit Term(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

struct Monomial {
  Integer coeff;
  std::string var;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Integer-coefficient sum of variables plus a constant. Terms keep their
/// first-occurrence order; a variable appears at most once and never with a
/// zero coefficient.
class LinearExpr {
 public:
  LinearExpr() = default;
  static LinearExpr constant(Integer value);
  static LinearExpr variable(std::string name, Integer coeff = 1);

  void add(const std::string& var, const Integer& coeff);
  void add_constant(const Integer& value) { constant_ += value; }
  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& scale(const Integer& factor);

  const std::vector<Monomial>& terms() const { return terms_; }
  const Integer& constant_term() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }
  Integer coeff(const std::string& var) const;

  /// Order-insensitive comparison.
  friend bool operator==(const LinearExpr& a, const LinearExpr& b);

 private:
  std::vector<Monomial> terms_;
  Integer constant_ = 0;
};

enum class Relation { eq, lt, le, gt, ge };

struct LinearConstraint {
  LinearExpr lhs;
  Relation rel = Relation::eq;
  LinearExpr rhs;
  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

enum class ArrayOp { read, write };

/// `read(A,I,V)` or `write(A,I,V,B)`. Participates in variable analysis only.
struct ArrayConstraint {
  ArrayOp op = ArrayOp::read;
  std::vector<Term> args;
  friend bool operator==(const ArrayConstraint&, const ArrayConstraint&) = default;
};

using AtomicConstraint = std::variant<LinearConstraint, ArrayConstraint>;

/// Conjunction of atomic constraints; empty means true.
using Constraint = std::vector<AtomicConstraint>;

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// `head :- constraint, body_1, ..., body_n`
struct Clause {
  Atom head;
  Constraint constraint;
  std::vector<Atom> body;

  bool is_query() const { return head.predicate == kQuery; }
  friend bool operator==(const Clause&, const Clause&) = default;
};

struct Program {
  std::vector<Clause> clauses;
  friend bool operator==(const Program&, const Program&) = default;
};

/// Ordered set of variable names (first-occurrence order).
class VarList {
 public:
  void add(const std::string& v) {
    if (seen_.insert(v).second) order_.push_back(v);
  }
  bool contains(const std::string& v) const { return seen_.count(v) != 0; }
  const std::vector<std::string>& items() const { return order_; }
  std::size_t size() const { return order_.size(); }

 private:
  std::vector<std::string> order_;
  std::unordered_set<std::string> seen_;
};

void collect_vars(const Term& t, VarList& out);
void collect_vars(const Atom& a, VarList& out);
void collect_vars(const LinearExpr& e, VarList& out);
void collect_vars(const AtomicConstraint& c, VarList& out);
void collect_vars(const Constraint& c, VarList& out);
void collect_vars(const Clause& c, VarList& out);

template <typename T>
std::vector<std::string> vars_of(const T& x) {
  VarList out;
  collect_vars(x, out);
  return out.items();
}

bool is_array(const AtomicConstraint& c);
bool has_array_constraints(const Constraint& c);

/// Variable-to-term substitution; unmapped variables are left unchanged.
using Substitution = std::map<std::string, Term>;

Term substitute(const Substitution& s, const Term& t);
Atom substitute(const Substitution& s, const Atom& a);
LinearExpr substitute(const Substitution& s, const LinearExpr& e);
AtomicConstraint substitute(const Substitution& s, const AtomicConstraint& c);
Constraint substitute(const Substitution& s, const Constraint& c);
Clause substitute(const Substitution& s, const Clause& c);

/// Predicate symbols in first-occurrence order (heads and bodies).
std::vector<std::string> predicates(const Program& p);

/// Arity of every predicate symbol. Throws ValidationError on a clash.
std::map<std::string, std::size_t> arities(const Program& p);

/// Checks arity consistency and the query restrictions (`unsafe` is nullary
/// and head-only). Throws ValidationError.
void validate(const Program& p);

/// Sum of the arities of all predicate symbols.
std::size_t total_arity(const Program& p);

}  // namespace chcprune
