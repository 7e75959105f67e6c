#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "brute_force.hpp"
#include "chcprune/cfar/cfar.hpp"
#include "chcprune/core/canonical.hpp"
#include "chcprune/core/io.hpp"
#include "chcprune/eval/eval.hpp"
#include "chcprune/nlr/nlr.hpp"
#include "erasure_validator.hpp"
#include "generators.hpp"
#include "oracle_checks.hpp"

using namespace chcprune;
using chcprune::testing::random_constraint;
using chcprune::testing::random_program;

TEST(Property, PrintParseRoundTrip) {
  std::mt19937 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto p = random_program(rng);
    EXPECT_EQ(parse_program(emit_clp(p)), p) << emit_clp(p);
  }
}

TEST(Property, BruteForceSanity) {
  chcprune::testing::BruteForce bf(parse_program("h :- X+Y=7, X-Y=1.").clauses[0].constraint);
  auto s = bf.solve(-10, 10);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->at("X"), 4);
  EXPECT_EQ(s->at("Y"), 3);
  chcprune::testing::BruteForce none(parse_program("h :- 2*X=1.").clauses[0].constraint);
  EXPECT_FALSE(none.solve(-10, 10));
}

TEST(Property, ConstraintOracleAgreesWithBruteForce) {
  std::mt19937 rng(2);
  for (int coeff : {1, 3}) {
    chcprune::testing::ConstraintShape shape;
    shape.max_coeff = coeff;
    for (int i = 0; i < 150; ++i) {
      auto c = random_constraint(rng, shape);
      std::string text = "h :- ";
      for (std::size_t k = 0; k < c.size(); ++k) text += (k ? ", " : "") + to_string(c[k]);
      if (auto bad = chcprune::testing::contradicts_satisfiable(c, is_satisfiable(c))) ADD_FAILURE() << text << ": " << *bad;
      if (auto bad = chcprune::testing::contradicts_forall_exists("A", c, forall_exists_valid("A", c)))
        ADD_FAILURE() << text << ": " << *bad;
    }
  }
}

TEST(Property, ConstrainedToIsSymmetricAndTransitive) {
  std::mt19937 rng(3);
  const std::vector<std::string> vs{"A", "B", "C", "D", "E"};
  for (int i = 0; i < 100; ++i) {
    auto c = random_constraint(rng);
    for (const auto& x : vs)
      for (const auto& y : vs) {
        EXPECT_EQ(constrained_to(x, y, c), constrained_to(y, x, c));
        for (const auto& z : vs)
          if (x != z && constrained_to(x, y, c) && constrained_to(y, z, c)) {
            EXPECT_TRUE(constrained_to(x, z, c));
          }
      }
  }
}

TEST(Property, TransformationsPreserveUnsafe) {
  std::mt19937 rng(4);
  int decided = 0;
  for (int i = 0; i < 60; ++i) {
    auto p = random_program(rng);
    auto before = eval::derives_unsafe(p, 32);
    auto n = nlr::transform(p);
    auto c = cfar::transform(p);
    auto after_nlr = eval::derives_unsafe(n.program, 32);
    auto after_cfar = eval::derives_unsafe(c.program, 32);
    if (before == TriState::unknown) continue;
    if (after_nlr != TriState::unknown) {
      ++decided;
      EXPECT_EQ(before, after_nlr) << emit_clp(p) << "---\n" << emit_clp(n.program);
    }
    if (after_cfar != TriState::unknown) {
      EXPECT_EQ(before, after_cfar) << emit_clp(p) << "---\n" << emit_clp(c.program);
    }
  }
  EXPECT_GT(decided, 10);
}

TEST(Property, ErasuresValidateAndAreOrderIndependent) {
  std::mt19937 rng(5);
  for (int i = 0; i < 80; ++i) {
    auto p = random_program(rng);
    auto r = cfar::transform(p);
    for (const auto& bad : chcprune::testing::check_erasure(p, r.erasure))
      ADD_FAILURE() << bad.pair.first << "/" << bad.pair.second << " clause " << bad.clause_index << ": " << bad.reason
                    << "\n"
                    << emit_clp(p);
    EXPECT_LE(r.report.pairs_removed, cfar::full_erasure(p).size());
    auto q = p;
    std::shuffle(q.clauses.begin(), q.clauses.end(), rng);
    EXPECT_EQ(cfar::transform(q).erasure, r.erasure);
  }
}

TEST(Property, NlrBudgetAndValidity) {
  std::mt19937 rng(6);
  for (int i = 0; i < 80; ++i) {
    auto p = random_program(rng);
    auto r = nlr::transform(p);
    EXPECT_LE(r.report.iterations, r.report.iteration_bound());
    EXPECT_NO_THROW(validate(r.program));
    EXPECT_EQ(parse_program(emit_clp(r.program)), r.program);
  }
}
