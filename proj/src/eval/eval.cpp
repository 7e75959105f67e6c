#include "chcprune/eval/eval.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "chcprune/constraints/linear_system.hpp"
#include "chcprune/core/io.hpp"

namespace chcprune::eval {

namespace {

Interval hull(const Interval& a, const Interval& b) {
  Interval r;
  if (a.lo && b.lo) r.lo = std::min(*a.lo, *b.lo);
  if (a.hi && b.hi) r.hi = std::max(*a.hi, *b.hi);
  return r;
}

void add_interval_rows(LinearSystem& sys, const std::string& v, const Interval& iv) {
  if (iv.lo) sys.add(Inequality{{{v, 1}}, -*iv.lo});
  if (iv.hi) sys.add(Inequality{{{v, -1}}, *iv.hi});
}

// Box rows for the head's variable arguments; false if a constant argument
// lies outside its slot.
bool constrain_head(LinearSystem& sys, const Atom& head, const Box& box, const std::vector<std::string>* only) {
  for (std::size_t i = 0; i < head.arity(); ++i) {
    const Term& t = head.args[i];
    const Interval& iv = box.slots[i];
    if (t.is_int()) {
      if (!iv.contains(t.value())) return false;
    } else if (!only || std::find(only->begin(), only->end(), t.name()) != only->end()) {
      add_interval_rows(sys, t.name(), iv);
    }
  }
  return true;
}

}  // namespace

std::map<std::string, Box> relevance_boxes(const Program& prog, std::size_t widen_after) {
  std::map<std::string, Box> boxes;
  std::map<std::string, std::vector<std::size_t>> grown;
  for (const auto& [p, n] : arities(prog)) {
    boxes[p].slots.assign(n, Interval{});
    grown[p].assign(2 * n, 0);
  }
  boxes[std::string(kQuery)].reachable = true;

  auto widen = [&](const std::string& p, std::size_t s, const Interval& in) {
    Box& b = boxes[p];
    if (!b.reachable) return;
    Interval cur = b.slots[s];
    Interval next = hull(cur, in);
    if (next == cur) return;
    auto& g = grown[p];
    if (next.lo != cur.lo && ++g[2 * s] > widen_after) next.lo.reset();
    if (next.hi != cur.hi && ++g[2 * s + 1] > widen_after) next.hi.reset();
    b.slots[s] = next;
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : prog.clauses) {
      const Box& hb = boxes[c.head.predicate];
      if (!hb.reachable) continue;
      auto sys = LinearSystem::from(c.constraint);
      bool arrays = !sys;
      if (arrays) sys.emplace();
      if (!constrain_head(*sys, c.head, hb, nullptr) || sys->infeasible()) continue;
      std::vector<std::pair<std::string, Interval>> vars;
      bool feasible = true;
      for (const auto& v : vars_of(c)) {
        Interval iv;
        if (!arrays) {
          auto b = sys->bounds(v);
          if (b && b->empty) {
            feasible = false;
            break;
          }
          if (b) iv = Interval{b->lo, b->hi};
        }
        vars.emplace_back(v, iv);
      }
      if (!feasible) continue;
      auto lookup = [&](const std::string& v) {
        for (const auto& [n, iv] : vars)
          if (n == v) return iv;
        return Interval{};
      };
      for (const auto& b : c.body) {
        Box& bb = boxes[b.predicate];
        std::vector<Interval> in;
        for (const auto& t : b.args) in.push_back(t.is_int() ? Interval{t.value(), t.value()} : lookup(t.name()));
        if (!bb.reachable) {
          bb.reachable = true;
          bb.slots = in;
          changed = true;
          continue;
        }
        for (std::size_t s = 0; s < in.size(); ++s) {
          Interval before = bb.slots[s];
          widen(b.predicate, s, in[s]);
          if (!(bb.slots[s] == before)) changed = true;
        }
      }
    }
  }
  return boxes;
}

bool Fact::ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_int(); });
}

std::string to_string(const std::string& predicate, const Fact& f) { return chcprune::to_string(Atom{predicate, f.args}); }

std::size_t BoundedModel::fact_count() const {
  std::size_t n = 0;
  for (const auto& [_, fs] : facts) n += fs.size();
  return n;
}

namespace {

bool covers(const Fact& general, const std::vector<Term>& specific) {
  std::map<std::string, Term> m;
  for (std::size_t i = 0; i < general.args.size(); ++i) {
    const Term& g = general.args[i];
    if (g.is_int()) {
      if (!(g == specific[i])) return false;
      continue;
    }
    auto [it, fresh] = m.emplace(g.name(), specific[i]);
    if (!fresh && !(it->second == specific[i])) return false;
  }
  return true;
}

}  // namespace

bool BoundedModel::contains(const std::string& predicate, const std::vector<Integer>& args) const {
  auto it = facts.find(predicate);
  if (it == facts.end()) return false;
  std::vector<Term> t;
  for (const auto& a : args) t.push_back(Term::integer(a));
  for (const auto& f : it->second)
    if (f.args.size() == t.size() && covers(f, t)) return true;
  return false;
}

namespace {

class Bindings {
 public:
  Term resolve(Term t) const {
    while (t.is_var()) {
      auto it = map_.find(t.name());
      if (it == map_.end()) break;
      t = it->second;
    }
    return t;
  }

  bool unify(const Term& x, const Term& y) {
    Term a = resolve(x), b = resolve(y);
    if (a == b) return true;
    if (a.is_int() && b.is_int()) return false;
    if (a.is_int()) std::swap(a, b);
    map_.insert_or_assign(a.name(), b);
    return true;
  }

  Substitution substitution() const {
    Substitution s;
    for (const auto& [v, _] : map_) s.insert_or_assign(v, resolve(Term::var(v)));
    return s;
  }

 private:
  std::map<std::string, Term> map_;
};

class Evaluator {
 public:
  Evaluator(const Program& prog, std::int64_t bound, const Options& options)
      : prog_(prog), options_(options), lo_(-bound), hi_(bound) {
    model_.bound = bound;
    for (std::size_t i = 0; i < prog.clauses.size(); ++i)
      if (has_array_constraints(prog.clauses[i].constraint))
        throw Error("clause " + std::to_string(i + 1) + ": array constraints are not supported by the evaluator");
    if (options.relevance) {
      boxes_ = relevance_boxes(prog);
    } else {
      for (const auto& [p, n] : arities(prog)) boxes_[p] = Box{true, std::vector<Interval>(n)};
    }
  }

  BoundedModel run() {
    for (const auto& c : prog_.clauses) plans_.push_back(plan(c));
    std::map<std::string, std::size_t> lo, hi;
    for (bool first = true;; first = false) {
      bool any_delta = first;
      for (const auto& [p, fs] : model_.facts) {
        lo[p] = hi[p];
        hi[p] = fs.size();
        if (hi[p] > lo[p]) any_delta = true;
      }
      if (!any_delta) break;
      for (auto& pl : plans_) {
        const Clause& c = *pl.clause;
        if (!boxes_[c.head.predicate].reachable) continue;
        if (c.body.empty()) {
          if (first) fire(pl, Bindings{});
        } else {
          for (std::size_t i = 0; i < c.body.size(); ++i) join(pl, 0, i, lo, hi, Bindings{});
        }
        if (done()) return model_;
      }
    }
    return model_;
  }

 private:
  struct Plan {
    const Clause* clause;
    // Per body atom: its variables that also occur outside it.
    std::vector<std::vector<std::string>> shared;
    // Variables of the head and the constraint.
    std::vector<std::string> visible;
    std::unordered_set<std::string> fired;
  };

  struct Index {
    std::vector<std::map<std::string, std::vector<std::size_t>>> by_value;
    std::vector<std::vector<std::size_t>> pattern_at;
  };

  static Plan plan(const Clause& c) {
    Plan pl{&c, {}, {}, {}};
    VarList visible;
    collect_vars(c.head, visible);
    collect_vars(c.constraint, visible);
    pl.visible = visible.items();
    for (std::size_t j = 0; j < c.body.size(); ++j) {
      VarList outside = visible;
      for (std::size_t k = 0; k < c.body.size(); ++k)
        if (k != j) collect_vars(c.body[k], outside);
      std::vector<std::string> shared;
      for (const auto& v : vars_of(c.body[j]))
        if (outside.contains(v)) shared.push_back(v);
      pl.shared.push_back(std::move(shared));
    }
    return pl;
  }

  static std::string key_of(const Bindings& b, const std::vector<std::string>& vars) {
    std::string key;
    for (const auto& v : vars) key += chcprune::to_string(b.resolve(Term::var(v))) + ",";
    return key;
  }

  bool done() const { return options_.stop_at_unsafe && model_.unsafe_derived; }

  void step() {
    if (++steps_ > options_.max_steps)
      throw BudgetExceeded("evaluation exceeded " + std::to_string(options_.max_steps) + " steps");
  }

  // Body atoms before `delta` read old facts, `delta` reads the last round's
  // new facts, later atoms read everything known at the start of the round.
  void join(Plan& pl, std::size_t j, std::size_t delta, const std::map<std::string, std::size_t>& lo,
            const std::map<std::string, std::size_t>& hi, const Bindings& b) {
    if (done()) return;
    const Clause& c = *pl.clause;
    if (j == c.body.size()) {
      fire(pl, b);
      return;
    }
    const Atom& a = c.body[j];
    auto fit = model_.facts.find(a.predicate);
    if (fit == model_.facts.end()) return;
    auto l = lo.find(a.predicate), h = hi.find(a.predicate);
    std::size_t from = 0, to = h == hi.end() ? 0 : h->second;
    if (j < delta) to = l == lo.end() ? 0 : l->second;
    if (j == delta) from = l == lo.end() ? 0 : l->second;
    if (from >= to) return;

    std::unordered_set<std::string> seen;
    const std::string tag = "#" + std::to_string(j) + "#";
    auto visit = [&](std::size_t f) {
      step();
      const Fact& fact = fit->second[f];
      Bindings next = b;
      for (std::size_t i = 0; i < a.arity(); ++i) {
        const Term& ft = fact.args[i];
        if (!next.unify(a.args[i], ft.is_var() ? Term::var(tag + ft.name()) : ft)) return;
      }
      if (!seen.insert(key_of(next, pl.shared[j])).second) return;
      join(pl, j + 1, delta, lo, hi, next);
    };

    std::optional<std::size_t> probe;
    std::string value;
    for (std::size_t i = 0; i < a.arity() && !probe; ++i) {
      Term t = b.resolve(a.args[i]);
      if (t.is_int()) {
        probe = i;
        value = t.value().str();
      }
    }
    if (!probe) {
      for (std::size_t f = from; f < to && !done(); ++f) visit(f);
      return;
    }
    const Index& idx = index_[a.predicate];
    auto range = [&](const std::vector<std::size_t>& v) {
      for (auto it = std::lower_bound(v.begin(), v.end(), from); it != v.end() && *it < to && !done(); ++it) visit(*it);
    };
    if (auto it = idx.by_value[*probe].find(value); it != idx.by_value[*probe].end()) range(it->second);
    range(idx.pattern_at[*probe]);
  }

  void fire(Plan& pl, const Bindings& b) {
    step();
    if (!pl.fired.insert(key_of(b, pl.visible)).second) return;
    const Clause& c = *pl.clause;
    Substitution s = b.substitution();
    Constraint r = substitute(s, c.constraint);
    Atom head = substitute(s, c.head);
    const Box& box = boxes_.at(c.head.predicate);

    VarList rvars;
    collect_vars(r, rvars);
    std::vector<std::string> enumerated;
    for (const auto& t : head.args)
      if (t.is_var() && rvars.contains(t.name()) &&
          std::find(enumerated.begin(), enumerated.end(), t.name()) == enumerated.end())
        enumerated.push_back(t.name());

    auto sys = LinearSystem::from(r);
    if (!constrain_head(*sys, head, box, &enumerated) || sys->infeasible()) return;
    LinearSystem projected = *sys;
    if (projected.eliminate_all_but(enumerated, true) == LinearSystem::Step::done) {
      if (!projected.infeasible()) enumerate(head, box, projected, enumerated, 0);
      return;
    }
    enumerate(head, box, *sys, enumerated, 0);
  }

  void enumerate(const Atom& head, const Box& box, const LinearSystem& sys, const std::vector<std::string>& vars,
                 std::size_t i) {
    if (done()) return;
    step();
    if (i == vars.size()) {
      if (auto ok = holds_at_fixed(sys)) {
        if (*ok) emit(head, box);
        return;
      }
      LinearSystem copy = sys;
      switch (copy.eliminate_all_but({}, true)) {
        case LinearSystem::Step::done:
          if (!copy.infeasible()) emit(head, box);
          return;
        default: model_.clipped = true; return;
      }
    }
    const std::string& v = vars[i];
    auto b = sys.bounds(v);
    Integer from = lo_, to = hi_;
    if (!b) {
      model_.clipped = true;
    } else {
      if (b->empty) return;
      if (!b->lo || *b->lo < lo_ || !b->hi || *b->hi > hi_) model_.clipped = true;
      if (b->lo) from = std::max(from, *b->lo);
      if (b->hi) to = std::min(to, *b->hi);
    }
    for (Integer x = from; x <= to; ++x) {
      LinearSystem next = sys;
      next.add(Inequality{{{v, 1}}, -x});
      next.add(Inequality{{{v, -1}}, x});
      if (next.infeasible()) continue;
      Substitution s{{v, Term::integer(x)}};
      Atom h = substitute(s, head);
      fixed_[v] = x;
      enumerate(h, box, next, vars, i + 1);
      fixed_.erase(v);
      if (done()) return;
    }
  }

  // Decides the system directly when all its variables are enumerated.
  std::optional<bool> holds_at_fixed(const LinearSystem& sys) const {
    for (const auto& r : sys.rows()) {
      Integer sum = r.constant;
      for (const auto& [v, a] : r.coeffs) {
        auto it = fixed_.find(v);
        if (it == fixed_.end()) return std::nullopt;
        sum += a * it->second;
      }
      if (sum < 0) return false;
    }
    return true;
  }

  void emit(const Atom& head, const Box& box) {
    Fact f;
    std::map<std::string, std::string> rename;
    for (std::size_t i = 0; i < head.arity(); ++i) {
      const Term& t = head.args[i];
      if (t.is_int()) {
        if (!box.slots[i].contains(t.value())) return;
        if (t.value() < lo_ || t.value() > hi_) {
          model_.clipped = true;
          return;
        }
        f.args.push_back(t);
      } else {
        auto [it, _] = rename.emplace(t.name(), "_" + std::to_string(rename.size()));
        f.args.push_back(Term::var(it->second));
      }
    }
    add(head.predicate, std::move(f));
  }

  // Pattern facts grouped by shape: which positions are constants and which
  // positions share a variable. A fact is covered by a pattern of some shape
  // iff its projection onto the shape's constant positions is recorded.
  struct Shape {
    std::vector<std::size_t> constants;
    std::vector<std::vector<std::size_t>> groups;
    std::unordered_set<std::string> keys;
  };

  static std::string shape_of(const Fact& f) {
    std::string s;
    for (const auto& t : f.args) s += t.is_int() ? std::string("#,") : t.name() + ",";
    return s;
  }

  static std::optional<std::string> project(const Shape& sh, const Fact& f) {
    std::string key;
    for (auto i : sh.constants) {
      if (!f.args[i].is_int()) return std::nullopt;
      key += f.args[i].value().str() + ",";
    }
    for (const auto& g : sh.groups)
      for (std::size_t k = 1; k < g.size(); ++k)
        if (!(f.args[g[k]] == f.args[g[0]])) return std::nullopt;
    return key;
  }

  void add(const std::string& p, Fact f) {
    auto& keys = keys_[p];
    std::string key = to_string(p, f);
    if (keys.count(key)) return;
    auto& shapes = shapes_[p];
    for (const auto& [_, sh] : shapes) {
      auto k = project(sh, f);
      if (k && sh.keys.count(*k)) return;
    }
    keys.insert(std::move(key));
    if (!f.ground()) {
      auto [it, fresh] = shapes.try_emplace(shape_of(f));
      Shape& sh = it->second;
      if (fresh) {
        std::map<std::string, std::size_t> group;
        for (std::size_t i = 0; i < f.args.size(); ++i) {
          if (f.args[i].is_int()) {
            sh.constants.push_back(i);
            continue;
          }
          auto [g, added] = group.emplace(f.args[i].name(), sh.groups.size());
          if (added) sh.groups.emplace_back();
          sh.groups[g->second].push_back(i);
        }
      }
      sh.keys.insert(*project(sh, f));
    }
    auto& list = model_.facts[p];
    Index& idx = index_[p];
    if (idx.by_value.size() != f.args.size()) {
      idx.by_value.resize(f.args.size());
      idx.pattern_at.resize(f.args.size());
    }
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      if (f.args[i].is_int())
        idx.by_value[i][f.args[i].value().str()].push_back(list.size());
      else
        idx.pattern_at[i].push_back(list.size());
    }
    list.push_back(std::move(f));
    ++fact_count_;
    if (p == kQuery) model_.unsafe_derived = true;
    if (fact_count_ > options_.max_facts)
      throw BudgetExceeded("evaluation exceeded " + std::to_string(options_.max_facts) + " facts");
  }

  const Program& prog_;
  Options options_;
  Integer lo_, hi_;
  std::map<std::string, Box> boxes_;
  BoundedModel model_;
  std::map<std::string, std::unordered_set<std::string>> keys_;
  std::map<std::string, std::map<std::string, Shape>> shapes_;
  std::size_t fact_count_ = 0;
  std::vector<Plan> plans_;
  std::map<std::string, Integer> fixed_;
  std::map<std::string, Index> index_;
  std::size_t steps_ = 0;
};

}  // namespace

BoundedModel bounded_least_model(const Program& prog, std::int64_t bound, const Options& options) {
  if (bound < 0) throw Error("bound must be non-negative");
  validate(prog);
  return Evaluator(prog, bound, options).run();
}

TriState derives_unsafe(const Program& prog, std::int64_t bound, const Options& options) {
  BoundedModel m;
  try {
    m = bounded_least_model(prog, bound, options);
  } catch (const BudgetExceeded&) {
    return TriState::unknown;
  }
  if (m.unsafe_derived) return TriState::holds;
  return m.clipped ? TriState::unknown : TriState::fails;
}

}  // namespace chcprune::eval
