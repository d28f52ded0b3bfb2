#pragma once

// Seeded random knowledge bases over a small monadic vocabulary, used to
// cross-check the counting paths against each other and the naive oracle.

#include <random>
#include <string>
#include <vector>

#include "tally/ast.hpp"
#include "tally/kb.hpp"
#include "tally/numbers.hpp"

namespace gen {

inline const std::vector<std::string>& pred_pool() {
  static const std::vector<std::string> pool = {"A", "B", "C"};
  return pool;
}

inline const std::vector<std::string>& const_pool() {
  static const std::vector<std::string> pool = {"a", "b"};
  return pool;
}

inline const std::vector<tally::Rational>& bound_pool() {
  static const std::vector<tally::Rational> pool = {
      {0, 1}, {1, 4}, {1, 3}, {1, 2}, {3, 5}, {2, 3}, {3, 4}, {1, 1}};
  return pool;
}

inline int pick(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline tally::FormulaPtr random_literal(std::mt19937& rng, const tally::Term& t,
                                        int preds) {
  tally::FormulaPtr atom =
      tally::Formula::atom(pred_pool()[static_cast<size_t>(pick(rng, 0, preds - 1))], {t});
  return pick(rng, 0, 1) ? tally::Formula::negation(atom) : atom;
}

inline tally::FormulaPtr random_open(std::mt19937& rng, const std::string& var,
                                     int preds, int depth) {
  tally::Term v = tally::Term::variable(var);
  if (depth == 0) return random_literal(rng, v, preds);
  switch (pick(rng, 0, 3)) {
    case 0: return random_literal(rng, v, preds);
    case 1:
      return tally::Formula::conjunction(random_open(rng, var, preds, depth - 1),
                                         random_open(rng, var, preds, depth - 1));
    case 2:
      return tally::Formula::disjunction(random_open(rng, var, preds, depth - 1),
                                         random_open(rng, var, preds, depth - 1));
    default:
      return tally::Formula::implication(random_open(rng, var, preds, depth - 1),
                                         random_open(rng, var, preds, depth - 1));
  }
}

inline tally::FormulaPtr random_ground(std::mt19937& rng, int preds, int consts,
                                       int depth) {
  tally::Term c =
      tally::Term::constant(const_pool()[static_cast<size_t>(pick(rng, 0, consts - 1))]);
  if (depth == 0 || pick(rng, 0, 1) == 0) return random_literal(rng, c, preds);
  return tally::Formula::conjunction(random_ground(rng, preds, consts, depth - 1),
                                     random_ground(rng, preds, consts, depth - 1));
}

inline tally::FormulaPtr random_sentence(std::mt19937& rng, int preds, int consts) {
  switch (pick(rng, 0, 4)) {
    case 0:
      return random_ground(rng, preds, consts, 1);
    case 1: {
      tally::FormulaPtr body = random_open(rng, "x", preds, 1);
      return pick(rng, 0, 1) ? tally::Formula::forall("x", body)
                             : tally::Formula::exists("x", body);
    }
    case 2: {
      // A sentence mixing a quantifier with a ground literal.
      tally::FormulaPtr body = tally::Formula::disjunction(
          random_open(rng, "x", preds, 0), random_ground(rng, preds, consts, 0));
      return tally::Formula::forall("x", body);
    }
    case 3: {
      size_t i = static_cast<size_t>(pick(rng, 0, 7));
      size_t j = static_cast<size_t>(pick(rng, 0, 7));
      if (bound_pool()[i] > bound_pool()[j]) std::swap(i, j);
      return tally::Formula::stat(random_open(rng, "x", preds, 1),
                                  random_open(rng, "x", preds, 1),
                                  tally::Bound::literal(bound_pool()[i]),
                                  tally::Bound::literal(bound_pool()[j]));
    }
    default: {
      tally::FormulaPtr left = random_ground(rng, preds, consts, 0);
      tally::FormulaPtr right = random_ground(rng, preds, consts, 0);
      return tally::Formula::implication(left, right);
    }
  }
}

inline tally::KnowledgeBase random_monadic_kb(std::mt19937& rng) {
  int preds = pick(rng, 1, 3);
  int consts = pick(rng, 1, 2);
  int count = pick(rng, 1, 4);
  tally::KnowledgeBase kb;
  for (int i = 0; i < count; ++i) {
    kb.add(random_sentence(rng, preds, consts));
  }
  return kb;
}

inline tally::FormulaPtr random_query(std::mt19937& rng) {
  int preds = pick(rng, 1, 3);
  int consts = pick(rng, 1, 2);
  if (pick(rng, 0, 3) == 0) {
    return tally::Formula::exists("x", random_open(rng, "x", preds, 1));
  }
  return random_ground(rng, preds, consts, 1);
}

}  // namespace gen
