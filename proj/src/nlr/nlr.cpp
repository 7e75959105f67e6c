#include "chcprune/nlr/nlr.hpp"

#include <algorithm>
#include <cctype>

#include "chcprune/constraints/analysis.hpp"
#include "chcprune/core/variant.hpp"

namespace chcprune::nlr {

Atom Definition::head() const {
  Atom a{predicate, {}};
  for (const auto& v : head_vars) a.args.push_back(Term::var(v));
  return a;
}

Clause Definition::as_clause() const { return Clause{head(), {}, {body_atom}}; }

DefsIndex::Outcome DefsIndex::introduce_or_merge(const Atom& b, const std::vector<std::string>& v) {
  std::string key = variant_key(b);
  if (auto it = by_key_.find(key); it != by_key_.end()) {
    Definition& d = defs_[it->second];
    auto theta = variant_of(b, d.body_atom);
    if (!theta) throw InternalError("variant key collision on " + key);
    bool widened = false;
    for (const auto& x : v) {
      std::string y = (*theta)(x);
      if (std::find(d.head_vars.begin(), d.head_vars.end(), y) == d.head_vars.end()) {
        d.head_vars.push_back(y);
        widened = true;
      }
    }
    if (widened) {
      d.status = DefinitionStatus::pending;
      ++widenings_;
    }
    return {it->second, false, widened};
  }
  Definition d;
  d.predicate = "newp" + std::to_string(next_suffix_++);
  d.body_atom = b;
  for (const auto& x : v)
    if (std::find(d.head_vars.begin(), d.head_vars.end(), x) == d.head_vars.end()) d.head_vars.push_back(x);
  defs_.push_back(std::move(d));
  by_key_.emplace(std::move(key), defs_.size() - 1);
  return {defs_.size() - 1, true, false};
}

std::optional<std::size_t> DefsIndex::find_id(const Atom& b) const {
  auto it = by_key_.find(variant_key(b));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

const Definition* DefsIndex::find(const Atom& b) const {
  auto id = find_id(b);
  return id ? &defs_[*id] : nullptr;
}

std::vector<std::string> linkvars(const Clause& clause, std::size_t position) {
  VarList others;
  collect_vars(clause.head, others);
  collect_vars(clause.constraint, others);
  for (std::size_t j = 0; j < clause.body.size(); ++j)
    if (j != position) collect_vars(clause.body[j], others);
  std::vector<std::string> out;
  for (const auto& v : vars_of(clause.body.at(position)))
    if (others.contains(v)) out.push_back(v);
  return out;
}

namespace {

class Unifier {
 public:
  // `order` ranks the definition's variables; they win as representatives.
  explicit Unifier(const std::vector<std::string>& order) {
    for (std::size_t i = 0; i < order.size(); ++i) rank_.emplace(order[i], i);
  }

  bool unify(const Term& x, const Term& y) {
    Term a = resolve(x), b = resolve(y);
    if (a == b) return true;
    if (a.is_int() && b.is_int()) return false;
    if (a.is_int()) std::swap(a, b);
    if (b.is_int()) {
      bind_.insert_or_assign(a.name(), b);
      return true;
    }
    // Both variables: bind the lower-ranked one to the other.
    if (rank(b.name()) < rank(a.name())) std::swap(a, b);
    bind_.insert_or_assign(b.name(), a);
    return true;
  }

  Substitution solution() const {
    Substitution s;
    for (const auto& [v, _] : bind_) s.insert_or_assign(v, resolve(Term::var(v)));
    return s;
  }

 private:
  std::size_t rank(const std::string& v) const {
    auto it = rank_.find(v);
    return it == rank_.end() ? rank_.size() : it->second;
  }

  Term resolve(Term t) const {
    while (t.is_var()) {
      auto it = bind_.find(t.name());
      if (it == bind_.end()) break;
      t = it->second;
    }
    return t;
  }

  std::map<std::string, std::size_t> rank_;
  std::map<std::string, Term> bind_;
};

// Renames the variables of `k` that collide with `taken`.
Clause rename_apart(const Clause& k, const VarList& taken) {
  VarList used = taken;
  auto kvars = vars_of(k);
  for (const auto& v : kvars) used.add(v);
  Substitution s;
  for (const auto& v : kvars) {
    if (!taken.contains(v)) continue;
    std::string fresh;
    for (std::size_t n = 1;; ++n) {
      fresh = v + "_" + std::to_string(n);
      if (!used.contains(fresh)) break;
    }
    used.add(fresh);
    s.emplace(v, Term::var(fresh));
  }
  return s.empty() ? k : substitute(s, k);
}

}  // namespace

std::vector<Clause> unfold(const Definition& d, const Program& prog, const UnfoldOptions& options,
                           std::size_t* dropped) {
  std::vector<Clause> out;
  VarList dvars;
  collect_vars(d.body_atom, dvars);
  for (const auto& k : prog.clauses) {
    if (k.head.predicate != d.body_atom.predicate || k.head.arity() != d.body_atom.arity()) continue;
    Clause r = rename_apart(k, dvars);
    Unifier u(dvars.items());
    bool ok = true;
    for (std::size_t i = 0; ok && i < r.head.arity(); ++i) ok = u.unify(d.body_atom.args[i], r.head.args[i]);
    if (!ok) continue;
    Substitution mu = u.solution();
    Clause c{substitute(mu, d.head()), substitute(mu, r.constraint), {}};
    for (const auto& b : r.body) c.body.push_back(substitute(mu, b));
    if (options.drop_unsatisfiable && is_satisfiable(c.constraint) == TriState::fails) {
      if (dropped) ++*dropped;
      continue;
    }
    out.push_back(std::move(c));
  }
  return out;
}

FoldResult fold_all(const Clause& c, DefsIndex& defs, const std::set<std::string>& foldable) {
  FoldResult r;
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    if (!foldable.count(c.body[i].predicate)) continue;
    auto o = defs.introduce_or_merge(c.body[i], linkvars(c, i));
    if ((o.introduced || o.widened) &&
        std::find(r.newly_pending.begin(), r.newly_pending.end(), o.id) == r.newly_pending.end())
      r.newly_pending.push_back(o.id);
  }
  r.clause.head = c.head;
  r.clause.constraint = c.constraint;
  for (const auto& b : c.body) {
    if (!foldable.count(b.predicate)) {
      r.clause.body.push_back(b);
      continue;
    }
    const Definition* d = defs.find(b);
    auto theta = variant_of(d->body_atom, b);
    r.clause.body.push_back(theta->apply(d->head()));
  }
  return r;
}

namespace {

std::size_t first_free_suffix(const Program& prog) {
  std::size_t best = 0;
  for (const auto& p : predicates(prog)) {
    if (p.size() <= 4 || p.compare(0, 4, "newp") != 0) continue;
    auto digits = p.substr(4);
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char ch) { return std::isdigit(ch); })) continue;
    if (digits.size() > 18) throw ValidationError("predicate name " + p + " is too long to continue numbering");
    best = std::max<std::size_t>(best, std::stoull(digits));
  }
  return best + 1;
}

}  // namespace

Result transform(const Program& prog, const Options& options) {
  validate(prog);
  Result result;
  Report& rep = result.report;
  rep.arity_before = total_arity(prog);

  std::set<std::string> foldable, defined;
  for (const auto& p : predicates(prog))
    if (p != kQuery) foldable.insert(p);
  for (const auto& c : prog.clauses) defined.insert(c.head.predicate);

  DefsIndex defs(first_free_suffix(prog));
  std::vector<const Clause*> queries;
  for (const auto& c : prog.clauses)
    if (c.is_query()) queries.push_back(&c);

  for (const Clause* q : queries) fold_all(*q, defs, foldable);

  UnfoldOptions uo{options.drop_unsatisfiable};
  std::vector<std::vector<Clause>> sources;
  std::vector<std::size_t> unfoldings;
  for (;;) {
    std::size_t next = defs.size();
    for (std::size_t i = 0; i < defs.size(); ++i) {
      if (defs.at(i).status == DefinitionStatus::pending) {
        next = i;
        break;
      }
    }
    if (next == defs.size()) break;
    if (++rep.iterations > options.iteration_cap)
      throw BudgetExceeded("NLR exceeded " + std::to_string(options.iteration_cap) + " unfolding steps");
    sources.resize(defs.size());
    unfoldings.resize(defs.size());
    Definition snapshot = defs.at(next);
    defs.at(next).status = DefinitionStatus::unfolded;
    ++unfoldings[next];
    if (unfoldings[next] == 1 && !defined.count(snapshot.body_atom.predicate))
      rep.warnings.push_back("predicate " + snapshot.body_atom.predicate + " has no clauses");
    sources[next] = unfold(snapshot, prog, uo, &rep.dropped_clauses);
    for (const auto& s : sources[next]) fold_all(s, defs, foldable);
  }

  sources.resize(defs.size());
  unfoldings.resize(defs.size());

  // Every source is re-folded against the final definitions, so heads that
  // were widened after a clause was first folded are picked up.
  std::size_t frozen = defs.size();
  auto emit = [&](const Clause& c) {
    auto f = fold_all(c, defs, foldable);
    if (!f.newly_pending.empty() || defs.size() != frozen) throw InternalError("NLR definitions changed in final fold");
    result.program.clauses.push_back(std::move(f.clause));
  };
  for (const Clause* q : queries) emit(*q);
  for (std::size_t i = 0; i < defs.size(); ++i)
    for (const auto& s : sources[i]) emit(s);

  rep.definitions = defs.size();
  rep.widenings = defs.widenings();
  rep.variant_classes = defs.size();
  for (const auto& [_, a] : arities(prog)) rep.max_arity = std::max(rep.max_arity, a);
  for (auto n : unfoldings) rep.max_unfoldings_per_definition = std::max(rep.max_unfoldings_per_definition, n);
  rep.arity_after = total_arity(result.program);
  return result;
}

}  // namespace chcprune::nlr
