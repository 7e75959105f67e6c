#pragma once

#include <random>

#include "chcprune/core/syntax.hpp"

namespace chcprune::testing {

struct ProgramShape {
  int max_predicates = 6;
  int max_arity = 5;
  int max_clauses_per_predicate = 3;
  int max_body_atoms = 2;
  int max_conjuncts = 3;
  int constant_range = 8;
};

/// Random program with unit coefficients and at least one `unsafe` clause.
Program random_program(std::mt19937& rng, const ProgramShape& shape = {});

struct ConstraintShape {
  int max_vars = 5;
  int max_conjuncts = 4;
  int max_terms = 3;
  int constant_range = 8;
  /// Largest absolute coefficient; 1 gives the unit-coefficient fragment.
  int max_coeff = 1;
};

/// Random conjunction over variables named A, B, C, ...
Constraint random_constraint(std::mt19937& rng, const ConstraintShape& shape = {});

}  // namespace chcprune::testing
