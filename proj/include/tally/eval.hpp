#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tally/ast.hpp"
#include "tally/detail/compiled_eval.hpp"
#include "tally/errors.hpp"
#include "tally/model.hpp"

namespace tally {

// Truth of a closed sentence in one finite model.
inline bool holds(const FiniteModel& m, const Formula& sentence) {
  if (!is_closed(sentence)) {
    throw InvalidArgument("holds requires a closed sentence");
  }
  detail::CompiledSentence cs = detail::compile_sentence(sentence, m.signature());
  std::vector<uint32_t> slots(cs.slot_count, 0);
  return detail::eval(*cs.root, m, slots.data());
}

inline bool holds(const FiniteModel& m, const FormulaPtr& sentence) {
  return holds(m, *sentence);
}

// All assignments of domain elements to variable_order satisfying an open,
// statistics-free formula. variable_order fixes the tuple layout and must
// name exactly the formula's free variables.
inline SatSet satisfaction_set(const FiniteModel& m, const Formula& formula,
                               const std::vector<std::string>& variable_order) {
  if (contains_stat(formula)) {
    throw Unsupported("satisfaction sets are defined for statistics-free formulas");
  }
  detail::CompiledSentence cs =
      detail::compile_open(formula, m.signature(), variable_order);
  SatSet out;
  out.variable_order = variable_order;

  const uint32_t n = m.domain_size();
  const size_t dims = variable_order.size();
  std::vector<uint32_t> slots(cs.slot_count, 0);
  std::vector<uint32_t> cursor(dims, 0);
  while (true) {
    for (size_t i = 0; i < dims; ++i) slots[i] = cursor[i];
    if (detail::eval(*cs.root, m, slots.data())) out.tuples.insert(cursor);
    size_t i = 0;
    for (; i < dims; ++i) {
      if (++cursor[i] < n) break;
      cursor[i] = 0;
    }
    if (i == dims) break;
  }
  return out;
}

inline SatSet satisfaction_set(const FiniteModel& m, const FormulaPtr& formula,
                               const std::vector<std::string>& variable_order) {
  return satisfaction_set(m, *formula, variable_order);
}

// Exact proportion of reference tuples that are also target tuples, with the
// same component discipline as a statistical atom: open, quantifier-free,
// statistics-free components. nullopt means the reference is empty. When the
// components' free-variable sets differ the numerator is 0 by convention.
inline std::optional<Rational> stat_ratio(const FiniteModel& m,
                                          const FormulaPtr& target,
                                          const FormulaPtr& reference) {
  for (const FormulaPtr& c : {target, reference}) {
    if (contains_stat(*c)) throw Unsupported("statistical atoms cannot nest");
    if (contains_quantifier(*c)) {
      throw InvalidArgument("proportion components must be quantifier-free");
    }
    if (free_object_vars(*c).empty()) {
      throw InvalidArgument("proportion components must be open formulas");
    }
  }
  FormulaPtr probe = Formula::stat(target, reference, Bound::literal(Rational(0)),
                                   Bound::literal(Rational(1)));
  detail::CompiledSentence cs = detail::compile_sentence(*probe, m.signature());
  std::vector<uint32_t> slots(cs.slot_count, 0);
  detail::StatCounts c = detail::stat_counts(*cs.root, m, slots.data());
  if (c.den == 0) return std::nullopt;
  return Rational(BigInt(c.num), BigInt(c.den));
}

}  // namespace tally
