#pragma once

// Naive reference implementations for the tests. Everything here interprets
// the AST directly over explicit set-based models, sharing no evaluation,
// encoding, or counting machinery with the engine under test.

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tally/ast.hpp"
#include "tally/numbers.hpp"

namespace oracle {

struct Symbols {
  std::map<std::string, int> predicates;
  std::set<std::string> constants;

  void scan_term(const tally::Term& t) {
    if (t.kind == tally::TermKind::Constant) constants.insert(t.name);
    if (t.kind == tally::TermKind::Function) {
      throw std::runtime_error("oracle does not interpret function terms");
    }
  }
  void scan(const tally::Formula& f) {
    using tally::FormulaKind;
    switch (f.kind) {
      case FormulaKind::Atom:
        predicates[f.pred] = static_cast<int>(f.terms.size());
        for (const tally::Term& t : f.terms) scan_term(t);
        return;
      case FormulaKind::Not:
      case FormulaKind::Forall:
      case FormulaKind::Exists:
        scan(*f.lhs);
        return;
      default:
        scan(*f.lhs);
        scan(*f.rhs);
        return;
    }
  }
};

struct Model {
  uint32_t n = 1;
  std::map<std::string, uint32_t> constant;
  std::map<std::string, std::set<std::vector<uint32_t>>> relation;
};

using Env = std::map<std::string, uint32_t>;

inline void free_vars(const tally::Formula& f, std::set<std::string>& bound,
                      std::set<std::string>& out) {
  using tally::FormulaKind;
  switch (f.kind) {
    case FormulaKind::Atom:
      for (const tally::Term& t : f.terms) {
        if (t.kind == tally::TermKind::Variable && !bound.count(t.name)) {
          out.insert(t.name);
        }
      }
      return;
    case FormulaKind::Not:
      free_vars(*f.lhs, bound, out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      bool fresh = bound.insert(f.var).second;
      free_vars(*f.lhs, bound, out);
      if (fresh) bound.erase(f.var);
      return;
    }
    case FormulaKind::Stat:
      return;  // a statistical atom binds all object variables it contains
    default:
      free_vars(*f.lhs, bound, out);
      free_vars(*f.rhs, bound, out);
      return;
  }
}

inline std::set<std::string> free_vars(const tally::Formula& f) {
  std::set<std::string> bound, out;
  free_vars(f, bound, out);
  return out;
}

inline uint32_t term_value(const Model& m, const tally::Term& t, const Env& env) {
  if (t.kind == tally::TermKind::Variable) return env.at(t.name);
  return m.constant.at(t.name);
}

inline bool eval(const Model& m, const tally::Formula& f, Env& env);

inline bool eval_stat(const Model& m, const tally::Formula& f) {
  std::set<std::string> rv = free_vars(*f.rhs);
  std::set<std::string> tv = free_vars(*f.lhs);
  const bool same_vars = rv == tv;

  std::vector<std::string> vars(rv.begin(), rv.end());
  uint64_t den = 0, num = 0;
  std::vector<uint32_t> assign(vars.size(), 0);
  while (true) {
    Env env;
    for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = assign[i];
    if (eval(m, *f.rhs, env)) {
      ++den;
      if (same_vars && eval(m, *f.lhs, env)) ++num;
    }
    size_t i = 0;
    for (; i < assign.size(); ++i) {
      if (++assign[i] < m.n) break;
      assign[i] = 0;
    }
    if (i == assign.size()) break;
  }

  if (den == 0) return f.lo.value == 0;
  tally::Rational ratio(num, den);
  return f.lo.value <= ratio && ratio <= f.hi.value;
}

inline bool eval(const Model& m, const tally::Formula& f, Env& env) {
  using tally::FormulaKind;
  switch (f.kind) {
    case FormulaKind::Atom: {
      std::vector<uint32_t> tuple;
      for (const tally::Term& t : f.terms) tuple.push_back(term_value(m, t, env));
      return m.relation.at(f.pred).count(tuple) > 0;
    }
    case FormulaKind::Not:
      return !eval(m, *f.lhs, env);
    case FormulaKind::And:
      return eval(m, *f.lhs, env) && eval(m, *f.rhs, env);
    case FormulaKind::Or:
      return eval(m, *f.lhs, env) || eval(m, *f.rhs, env);
    case FormulaKind::Implies:
      return !eval(m, *f.lhs, env) || eval(m, *f.rhs, env);
    case FormulaKind::Iff:
      return eval(m, *f.lhs, env) == eval(m, *f.rhs, env);
    case FormulaKind::Forall: {
      for (uint32_t v = 0; v < m.n; ++v) {
        auto saved = env.find(f.var) != env.end()
                         ? std::optional<uint32_t>(env[f.var])
                         : std::nullopt;
        env[f.var] = v;
        bool ok = eval(m, *f.lhs, env);
        if (saved) env[f.var] = *saved; else env.erase(f.var);
        if (!ok) return false;
      }
      return true;
    }
    case FormulaKind::Exists: {
      for (uint32_t v = 0; v < m.n; ++v) {
        auto saved = env.find(f.var) != env.end()
                         ? std::optional<uint32_t>(env[f.var])
                         : std::nullopt;
        env[f.var] = v;
        bool ok = eval(m, *f.lhs, env);
        if (saved) env[f.var] = *saved; else env.erase(f.var);
        if (ok) return true;
      }
      return false;
    }
    case FormulaKind::Stat:
      return eval_stat(m, f);
  }
  return false;
}

inline bool eval_closed(const Model& m, const tally::FormulaPtr& f) {
  Env env;
  return eval(m, *f, env);
}

inline std::vector<std::vector<uint32_t>> all_tuples(uint32_t n, int arity) {
  std::vector<std::vector<uint32_t>> out;
  std::vector<uint32_t> t(static_cast<size_t>(arity), 0);
  while (true) {
    out.push_back(t);
    size_t i = 0;
    for (; i < t.size(); ++i) {
      if (++t[i] < n) break;
      t[i] = 0;
    }
    if (i == t.size()) break;
  }
  return out;
}

// Visits every interpretation of the symbols at domain size n: each constant
// takes every element, each predicate takes every subset of tuples.
template <typename Visit>
inline void for_all_models(const Symbols& sym, uint32_t n, Visit&& visit) {
  std::vector<std::string> consts(sym.constants.begin(), sym.constants.end());
  std::vector<std::pair<std::string, int>> preds(sym.predicates.begin(),
                                                 sym.predicates.end());
  Model m;
  m.n = n;
  for (const auto& [name, arity] : preds) m.relation[name] = {};

  auto fill_preds = [&](auto&& self, size_t p) -> void {
    if (p == preds.size()) {
      visit(static_cast<const Model&>(m));
      return;
    }
    const auto& [name, arity] = preds[p];
    std::vector<std::vector<uint32_t>> tuples = all_tuples(n, arity);
    if (tuples.size() > 20) {
      throw std::runtime_error("oracle model space too large");
    }
    for (uint64_t mask = 0; mask < (uint64_t{1} << tuples.size()); ++mask) {
      std::set<std::vector<uint32_t>> rel;
      for (size_t i = 0; i < tuples.size(); ++i) {
        if (mask & (uint64_t{1} << i)) rel.insert(tuples[i]);
      }
      m.relation[name] = std::move(rel);
      self(self, p + 1);
    }
  };
  auto fill_consts = [&](auto&& self, size_t c) -> void {
    if (c == consts.size()) {
      fill_preds(fill_preds, 0);
      return;
    }
    for (uint32_t v = 0; v < n; ++v) {
      m.constant[consts[c]] = v;
      self(self, c + 1);
    }
  };
  fill_consts(fill_consts, 0);
}

struct Counts {
  uint64_t models = 0;
  uint64_t premises = 0;
  uint64_t premises_and_query = 0;
};

inline Counts count(const std::vector<tally::FormulaPtr>& premises,
                    const tally::FormulaPtr& query, uint32_t n) {
  Symbols sym;
  for (const tally::FormulaPtr& s : premises) sym.scan(*s);
  if (query) sym.scan(*query);

  Counts c;
  for_all_models(sym, n, [&](const Model& m) {
    ++c.models;
    for (const tally::FormulaPtr& s : premises) {
      if (!eval_closed(m, s)) return;
    }
    ++c.premises;
    if (!query || eval_closed(m, query)) ++c.premises_and_query;
  });
  return c;
}

// For each subset of the sentences (as a bitmask), whether some model at some
// size in [min_n, max_n] satisfies all of its members. The symbol space is
// the whole sentence list's, so results are comparable across subsets.
inline std::vector<bool> subset_satisfiability(
    const std::vector<tally::FormulaPtr>& sentences, uint32_t min_n, uint32_t max_n) {
  const size_t k = sentences.size();
  if (k > 16) throw std::runtime_error("oracle subset table too large");
  Symbols sym;
  for (const tally::FormulaPtr& s : sentences) sym.scan(*s);

  std::set<uint64_t> truth_masks;
  for (uint32_t n = min_n; n <= max_n; ++n) {
    for_all_models(sym, n, [&](const Model& m) {
      uint64_t t = 0;
      for (size_t i = 0; i < k; ++i) {
        if (eval_closed(m, sentences[i])) t |= uint64_t{1} << i;
      }
      truth_masks.insert(t);
    });
  }

  std::vector<bool> sat(uint64_t{1} << k, false);
  for (uint64_t mask = 0; mask < sat.size(); ++mask) {
    for (uint64_t t : truth_masks) {
      if ((mask & ~t) == 0) {
        sat[mask] = true;
        break;
      }
    }
  }
  return sat;
}

// The maximal satisfiable subsets per the table above, largest first and by
// ascending mask within a cardinality (the engine's documented order).
inline std::vector<uint64_t> mcs_masks(const std::vector<tally::FormulaPtr>& sentences,
                                       uint32_t min_n, uint32_t max_n) {
  std::vector<bool> sat = subset_satisfiability(sentences, min_n, max_n);
  const size_t k = sentences.size();
  std::vector<uint64_t> out;
  for (size_t size = k + 1; size-- > 0;) {
    for (uint64_t mask = 0; mask < sat.size(); ++mask) {
      if (static_cast<size_t>(std::popcount(mask)) != size || !sat[mask]) continue;
      bool maximal = true;
      for (size_t b = 0; b < k && maximal; ++b) {
        if (!(mask & (uint64_t{1} << b)) && sat[mask | (uint64_t{1} << b)]) {
          maximal = false;
        }
      }
      if (maximal) out.push_back(mask);
    }
  }
  return out;
}

}  // namespace oracle
