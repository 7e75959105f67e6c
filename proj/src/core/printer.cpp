#include <set>
#include <sstream>

#include "chcprune/core/io.hpp"

namespace chcprune {

UnsupportedError::UnsupportedError(const std::string& message, std::size_t clause_index)
    : Error("clause " + std::to_string(clause_index + 1) + ": " + message), clause_index_(clause_index) {}

std::string to_string(const Term& t) { return t.is_var() ? t.name() : t.value().str(); }

std::string to_string(const LinearExpr& e) {
  std::string out;
  for (const auto& m : e.terms()) {
    Integer mag = abs(m.coeff);
    if (m.coeff < 0)
      out += "-";
    else if (!out.empty())
      out += "+";
    if (mag != 1) out += mag.str() + "*";
    out += m.var;
  }
  const Integer& k = e.constant_term();
  if (out.empty()) return k.str();
  if (k > 0) out += "+" + k.str();
  if (k < 0) out += k.str();
  return out;
}

namespace {

const char* op(Relation r) {
  switch (r) {
    case Relation::eq: return "=";
    case Relation::lt: return "<";
    case Relation::le: return "=<";
    case Relation::gt: return ">";
    case Relation::ge: return ">=";
  }
  return "?";
}

std::string join_args(const std::vector<Term>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += to_string(args[i]);
  }
  return out;
}

}  // namespace

std::string to_string(const AtomicConstraint& c) {
  if (const auto* lin = std::get_if<LinearConstraint>(&c))
    return to_string(lin->lhs) + op(lin->rel) + to_string(lin->rhs);
  const auto& arr = std::get<ArrayConstraint>(c);
  return std::string(arr.op == ArrayOp::read ? "read(" : "write(") + join_args(arr.args) + ")";
}

std::string to_string(const Atom& a) {
  if (a.args.empty()) return a.predicate;
  return a.predicate + "(" + join_args(a.args) + ")";
}

std::string to_string(const Clause& c) {
  std::string out = to_string(c.head);
  std::vector<std::string> goals;
  for (const auto& k : c.constraint) goals.push_back(to_string(k));
  for (const auto& b : c.body) goals.push_back(to_string(b));
  for (std::size_t i = 0; i < goals.size(); ++i) out += (i == 0 ? " :- " : ", ") + goals[i];
  return out + ".";
}

std::string emit_clp(const Program& p) {
  std::string out;
  for (const auto& c : p.clauses) out += to_string(c) + "\n";
  return out;
}

namespace {

const std::set<std::string>& smt_reserved() {
  static const std::set<std::string> words{"and",    "or",     "not",    "true",  "false",      "let",
                                           "forall", "exists", "ite",    "distinct", "par",    "as",
                                           "select", "store",  "assert", "declare-fun", "xor", "Int",
                                           "Bool",   "Array",  "match",  "define-fun",  "=>"};
  return words;
}

std::string symbol(const std::string& name) { return smt_reserved().count(name) ? "|" + name + "|" : name; }

std::string smt_int(const Integer& v) { return v < 0 ? "(- " + Integer(-v).str() + ")" : v.str(); }

std::string smt_term(const Term& t) { return t.is_var() ? symbol(t.name()) : smt_int(t.value()); }

std::string smt_expr(const LinearExpr& e) {
  std::vector<std::string> parts;
  for (const auto& m : e.terms()) {
    if (m.coeff == 1)
      parts.push_back(symbol(m.var));
    else if (m.coeff == -1)
      parts.push_back("(- " + symbol(m.var) + ")");
    else
      parts.push_back("(* " + smt_int(m.coeff) + " " + symbol(m.var) + ")");
  }
  if (e.constant_term() != 0 || parts.empty()) parts.push_back(smt_int(e.constant_term()));
  if (parts.size() == 1) return parts[0];
  std::string out = "(+";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

const char* smt_op(Relation r) {
  switch (r) {
    case Relation::eq: return "=";
    case Relation::lt: return "<";
    case Relation::le: return "<=";
    case Relation::gt: return ">";
    case Relation::ge: return ">=";
  }
  return "?";
}

std::string smt_atom(const Atom& a) {
  if (a.args.empty()) return symbol(a.predicate);
  std::string out = "(" + symbol(a.predicate);
  for (const auto& t : a.args) out += " " + smt_term(t);
  return out + ")";
}

// Array-sorted argument positions and variables. Positions are keyed by
// (predicate, index); variables by (clause index, name).
struct ArraySorts {
  std::set<std::pair<std::string, std::size_t>> positions;
  std::set<std::pair<std::size_t, std::string>> vars;
};

ArraySorts infer_array_sorts(const Program& p) {
  ArraySorts s;
  for (std::size_t ci = 0; ci < p.clauses.size(); ++ci)
    for (const auto& k : p.clauses[ci].constraint)
      if (const auto* arr = std::get_if<ArrayConstraint>(&k)) {
        auto mark = [&](std::size_t i) {
          if (arr->args[i].is_var()) s.vars.emplace(ci, arr->args[i].name());
          else throw UnsupportedError("array argument must be a variable", ci);
        };
        mark(0);
        if (arr->op == ArrayOp::write) mark(3);
      }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
      const Clause& c = p.clauses[ci];
      auto visit = [&](const Atom& a) {
        for (std::size_t i = 0; i < a.arity(); ++i) {
          const Term& t = a.args[i];
          bool pos_arr = s.positions.count({a.predicate, i}) != 0;
          bool var_arr = t.is_var() && s.vars.count({ci, t.name()}) != 0;
          if (pos_arr && !t.is_var()) throw UnsupportedError("integer constant at array-sorted argument", ci);
          if (pos_arr && !var_arr) changed |= s.vars.emplace(ci, t.name()).second;
          if (var_arr && !pos_arr) changed |= s.positions.emplace(a.predicate, i).second;
        }
      };
      visit(c.head);
      for (const auto& b : c.body) visit(b);
    }
  }
  for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
    for (const auto& k : p.clauses[ci].constraint) {
      VarList vs;
      if (!is_array(k)) {
        collect_vars(k, vs);
      } else {
        const auto& arr = std::get<ArrayConstraint>(k);
        collect_vars(arr.args[1], vs);
        collect_vars(arr.args[2], vs);
      }
      for (const auto& v : vs.items())
        if (s.vars.count({ci, v})) throw UnsupportedError("array variable " + v + " used as an integer", ci);
    }
  }
  return s;
}

}  // namespace

std::string emit_smtlib_horn(const Program& p, const SmtOptions& options) {
  ArraySorts sorts;
  for (std::size_t ci = 0; ci < p.clauses.size(); ++ci)
    if (!options.arrays && has_array_constraints(p.clauses[ci].constraint))
      throw UnsupportedError("array constraints require array emission", ci);
  if (options.arrays) sorts = infer_array_sorts(p);

  std::ostringstream out;
  out << "(set-logic HORN)\n";
  auto ar = arities(p);
  for (const auto& pred : predicates(p)) {
    if (pred == kQuery) continue;
    out << "(declare-fun " << symbol(pred) << " (";
    for (std::size_t i = 0; i < ar.at(pred); ++i) {
      if (i) out << " ";
      out << (sorts.positions.count({pred, i}) ? "(Array Int Int)" : "Int");
    }
    out << ") Bool)\n";
  }
  for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
    const Clause& c = p.clauses[ci];
    std::vector<std::string> goals;
    for (const auto& k : c.constraint) {
      if (const auto* lin = std::get_if<LinearConstraint>(&k)) {
        goals.push_back(std::string("(") + smt_op(lin->rel) + " " + smt_expr(lin->lhs) + " " + smt_expr(lin->rhs) + ")");
      } else {
        const auto& a = std::get<ArrayConstraint>(k);
        if (a.op == ArrayOp::read)
          goals.push_back("(= " + smt_term(a.args[2]) + " (select " + smt_term(a.args[0]) + " " + smt_term(a.args[1]) + "))");
        else
          goals.push_back("(= " + smt_term(a.args[3]) + " (store " + smt_term(a.args[0]) + " " + smt_term(a.args[1]) +
                          " " + smt_term(a.args[2]) + "))");
      }
    }
    for (const auto& b : c.body) goals.push_back(smt_atom(b));
    std::string body;
    if (goals.empty()) {
      body = "true";
    } else if (goals.size() == 1) {
      body = goals[0];
    } else {
      body = "(and";
      for (const auto& g : goals) body += " " + g;
      body += ")";
    }
    std::string head = c.is_query() ? "false" : smt_atom(c.head);
    std::string formula = goals.empty() ? head : "(=> " + body + " " + head + ")";
    auto vs = vars_of(c);
    if (!vs.empty()) {
      std::string binders;
      for (const auto& v : vs) {
        if (!binders.empty()) binders += " ";
        binders += "(" + symbol(v) + (sorts.vars.count({ci, v}) ? " (Array Int Int))" : " Int)");
      }
      formula = "(forall (" + binders + ") " + formula + ")";
    }
    out << "(assert " << formula << ")\n";
  }
  out << "(check-sat)\n";
  return out.str();
}

}  // namespace chcprune
