#include <gtest/gtest.h>

#include "chcprune/core/canonical.hpp"
#include "chcprune/core/io.hpp"
#include "chcprune/nlr/nlr.hpp"

using namespace chcprune;
using namespace chcprune::nlr;

namespace {

Program corpus(const std::string& name) { return parse_file(std::string(CHCPRUNE_CORPUS_DIR) + "/" + name); }

Atom atom(const std::string& text) { return parse_program(text + ".").clauses.at(0).head; }

Clause clause(const std::string& text) { return parse_program(text).clauses.at(0); }

std::vector<std::string> names(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST(Linkvars, Examples) {
  auto p1 = corpus("p1.clp");
  EXPECT_EQ(linkvars(p1.clauses[0], 0), names({"X1", "Y2"}));
  EXPECT_EQ(linkvars(p1.clauses[1], 0), names({"X1", "Y1", "Z1", "X2", "Z2"}));
  EXPECT_EQ(linkvars(clause("q(X) :- p(X)."), 0), names({"X"}));
  EXPECT_EQ(linkvars(clause("q :- p(X,Y), r(Y,Z)."), 0), names({"Y"}));
}

TEST(Defs, IntroduceFresh) {
  DefsIndex defs(3);
  auto o = defs.introduce_or_merge(atom("newp1(X1,Y1,X2,Y2)"), names({"X1", "Y2"}));
  EXPECT_TRUE(o.introduced);
  EXPECT_FALSE(o.widened);
  const auto& d = defs.at(o.id);
  EXPECT_EQ(d.predicate, "newp3");
  EXPECT_EQ(d.head_vars, names({"X1", "Y2"}));
  EXPECT_EQ(to_string(d.as_clause()), "newp3(X1,Y2) :- newp1(X1,Y1,X2,Y2).");
}

TEST(Defs, MergeWidens) {
  DefsIndex defs;
  auto first = defs.introduce_or_merge(atom("p(A,B,C)"), names({"A", "C"}));
  defs.at(first.id).status = DefinitionStatus::unfolded;
  auto o = defs.introduce_or_merge(atom("p(X,Y,Z)"), names({"Y"}));
  EXPECT_EQ(o.id, first.id);
  EXPECT_FALSE(o.introduced);
  EXPECT_TRUE(o.widened);
  EXPECT_EQ(defs.at(o.id).head_vars, names({"A", "C", "B"}));
  EXPECT_EQ(defs.at(o.id).status, DefinitionStatus::pending);
  EXPECT_EQ(defs.widenings(), 1u);

  auto again = defs.introduce_or_merge(atom("p(U,V,W)"), names({"U", "W"}));
  EXPECT_FALSE(again.widened);
  EXPECT_FALSE(again.introduced);
  EXPECT_EQ(defs.size(), 1u);
}

TEST(Defs, DistinctClassesGetDistinctDefinitions) {
  DefsIndex defs;
  auto a = defs.introduce_or_merge(atom("p(X,Y)"), names({"X"}));
  auto b = defs.introduce_or_merge(atom("p(X,X)"), names({"X"}));
  auto c = defs.introduce_or_merge(atom("p(X,3)"), names({"X"}));
  EXPECT_NE(a.id, b.id);
  EXPECT_NE(b.id, c.id);
  EXPECT_EQ(defs.size(), 3u);
}

TEST(Unfold, QueryDefinitionAgainstP1) {
  auto p1 = corpus("p1.clp");
  Definition d{"newp3", names({"X1", "Y2"}), atom("newp1(X1,Y1,X2,Y2)")};
  auto out = unfold(d, p1);
  ASSERT_EQ(out.size(), 1u);
  const auto& c = out[0];
  EXPECT_EQ(to_string(c.head), "newp3(X1,Y2)");
  ASSERT_EQ(c.body.size(), 1u);
  EXPECT_EQ(c.body[0].predicate, "newp2");
  const auto& args = c.body[0].args;
  EXPECT_EQ(args[0], Term::var("X1"));
  EXPECT_EQ(args[1], Term::var("Y1"));
  EXPECT_EQ(args[3], Term::var("X2"));
  EXPECT_EQ(args[5], Term::var("Y2"));
  // Z1 is linked to X1 by the constraint; the fifth argument is fresh.
  EXPECT_EQ(c.constraint.size(), 1u);
  EXPECT_EQ(args[2], Term::var("Z1"));
  EXPECT_TRUE(args[4].is_var());
  for (auto v : {"X1", "Y1", "Z1", "X2", "Y2"}) EXPECT_NE(args[4].name(), v);
}

TEST(Unfold, BaseClauseIdentifiesArguments) {
  auto p1 = corpus("p1.clp");
  Definition d{"newp4", names({"X1", "Z1", "Z2"}), atom("newp2(X1,Y1,Z1,X2,Y2,Z2)")};
  auto out = unfold(d, p1);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(to_string(out[1]), "newp4(X1,Z1,Z1) :- Z1>=10.");
}

TEST(Unfold, NoClausesOrClash) {
  auto p = parse_program("unsafe :- q(X).\np(1).");
  Definition d{"newp1", names({}), atom("q(X)")};
  EXPECT_TRUE(unfold(d, p).empty());
  Definition e{"newp2", names({}), atom("p(2)")};
  EXPECT_TRUE(unfold(e, p).empty());
}

TEST(Unfold, DropsUnsatisfiable) {
  auto p = parse_program("p(X) :- X>=5.\np(X) :- X=<0.");
  Definition d{"newp1", names({}), atom("p(7)")};
  std::size_t dropped = 0;
  EXPECT_EQ(unfold(d, p, {}, &dropped).size(), 1u);
  EXPECT_EQ(dropped, 1u);
  EXPECT_EQ(unfold(d, p, UnfoldOptions{false}).size(), 2u);
}

TEST(Fold, QueryClause) {
  auto p1 = corpus("p1.clp");
  DefsIndex defs(3);
  std::set<std::string> foldable{"newp1", "newp2"};
  auto r = fold_all(p1.clauses[0], defs, foldable);
  EXPECT_EQ(to_string(r.clause), "unsafe :- X1>=0, Y2=<0, newp3(X1,Y2).");
  EXPECT_EQ(r.newly_pending.size(), 1u);
}

TEST(Fold, VariantOccurrenceUsesExistingHead) {
  DefsIndex defs(4);
  std::set<std::string> foldable{"newp2"};
  defs.introduce_or_merge(atom("newp2(X1,Y1,Z1,X2,Y2,Z2)"), names({"X1", "Z1", "Z2"}));
  defs.at(0).status = DefinitionStatus::unfolded;
  auto r = fold_all(clause("newp4(X1,Z1,Z2) :- Z1=<9, Z3=Z1+1, newp2(X1,Y1,Z3,X2,Y2,Z2)."), defs, foldable);
  EXPECT_EQ(to_string(r.clause.body[0]), "newp4(X1,Z3,Z2)");
  EXPECT_TRUE(r.newly_pending.empty());
}

TEST(Fold, EmptyBodyUnchanged) {
  DefsIndex defs;
  auto c = clause("p(X) :- X>=0.");
  EXPECT_EQ(fold_all(c, defs, {"p"}).clause, c);
  EXPECT_EQ(defs.size(), 0u);
}

TEST(Transform, P1ToP2) {
  auto r = transform(corpus("p1.clp"));
  EXPECT_TRUE(isomorphic(r.program, corpus("p2.clp"))) << emit_clp(r.program);
  auto ar = arities(r.program);
  EXPECT_EQ(ar.at("newp3"), 2u);
  EXPECT_EQ(ar.at("newp4"), 3u);
  EXPECT_EQ(r.report.arity_before, 10u);
  EXPECT_EQ(r.report.arity_after, 5u);
  EXPECT_EQ(r.report.definitions, 2u);
  EXPECT_LE(r.report.iterations, r.report.iteration_bound());
}

TEST(Transform, GroundQueryUnchanged) {
  auto p = parse_program("unsafe :- 1=<0.");
  EXPECT_EQ(transform(p).program, p);
}

TEST(Transform, AllLinkingIsIdentityUpToNames) {
  auto p = parse_program(
      "unsafe :- X>=1, p(X,Y), Y=<0.\n"
      "p(X,Y) :- X=Y+1.\n"
      "p(X,Y) :- Z=X-1, W=Y+1, p(Z,W).\n");
  auto r = transform(p);
  EXPECT_TRUE(isomorphic(r.program, p)) << emit_clp(r.program);
}

TEST(Transform, WideningReachesEarlierFolds) {
  // The first occurrence of p(_,_) needs only its first argument; a later
  // variant occurrence links both, widening the shared definition.
  auto p = parse_program(
      "unsafe :- X>=1, p(X,Y).\n"
      "p(A,B) :- A=B, q(A,B).\n"
      "p(A,B) :- C=A-1, p(C,D), B=D+1.\n"
      "q(A,B).\n");
  auto r = transform(p);
  EXPECT_GE(r.report.widenings, 1u);
  for (const auto& c : r.program.clauses)
    for (const auto& b : c.body) EXPECT_EQ(b.arity(), arities(r.program).at(b.predicate));
  EXPECT_NO_THROW(validate(r.program));
}

TEST(Transform, NamesAvoidExistingPredicates) {
  auto p = parse_program("unsafe :- newp7(X,Y), Y>=0.\nnewp7(X,Y) :- Y=X.\n");
  auto r = transform(p);
  auto preds = predicates(r.program);
  EXPECT_NE(std::find(preds.begin(), preds.end(), "newp8"), preds.end());
}

TEST(Transform, IterationCap) {
  Options o;
  o.iteration_cap = 1;
  EXPECT_THROW(transform(corpus("p1.clp"), o), BudgetExceeded);
}
