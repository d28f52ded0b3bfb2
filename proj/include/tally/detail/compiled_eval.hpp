#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tally/ast.hpp"
#include "tally/errors.hpp"
#include "tally/kb.hpp"
#include "tally/model.hpp"

namespace tally::detail {

struct ArgRef {
  bool is_var = false;
  uint32_t index = 0;  // slot id for variables, constant id otherwise
};

// Formula lowered against a signature: names resolved to ids, variables to
// dense slots. One instance is reused across every model of a run.
struct CompiledNode {
  FormulaKind kind = FormulaKind::Atom;

  int pred = -1;
  std::vector<ArgRef> args;

  std::unique_ptr<CompiledNode> a;  // Not/quantifier body, Stat target
  std::unique_ptr<CompiledNode> b;  // binary rhs, Stat reference

  uint32_t slot = 0;  // quantifier binding

  // Stat: slots iterated by the proportion loop. When the two components have
  // identical free-variable sets these cover the joint variables; otherwise
  // they cover the reference's variables and the target is left uncompiled
  // (the numerator is 0 by the mismatch rule).
  std::vector<uint32_t> loop_slots;
  bool bounds_literal = true;
  Rational lo;
  Rational hi;
};

struct CompiledSentence {
  std::unique_ptr<CompiledNode> root;
  uint32_t slot_count = 0;
};

class Compiler {
 public:
  explicit Compiler(const Signature& sig) : sig_(sig) {}

  std::unique_ptr<CompiledNode> compile(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::Atom: {
        auto node = std::make_unique<CompiledNode>();
        node->kind = FormulaKind::Atom;
        node->pred = sig_.predicate_id(f.pred);
        if (node->pred < 0) {
          throw InvalidArgument("predicate '" + f.pred + "' not in signature");
        }
        for (const Term& t : f.terms) {
          node->args.push_back(resolve(t));
        }
        return node;
      }
      case FormulaKind::Not: {
        auto node = std::make_unique<CompiledNode>();
        node->kind = FormulaKind::Not;
        node->a = compile(*f.lhs);
        return node;
      }
      case FormulaKind::And:
      case FormulaKind::Or:
      case FormulaKind::Implies:
      case FormulaKind::Iff: {
        auto node = std::make_unique<CompiledNode>();
        node->kind = f.kind;
        node->a = compile(*f.lhs);
        node->b = compile(*f.rhs);
        return node;
      }
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        auto node = std::make_unique<CompiledNode>();
        node->kind = f.kind;
        node->slot = new_slot();
        env_.push_back({f.var, node->slot});
        node->a = compile(*f.lhs);
        env_.pop_back();
        return node;
      }
      case FormulaKind::Stat: {
        auto node = std::make_unique<CompiledNode>();
        node->kind = FormulaKind::Stat;
        if (f.lo.is_variable() || f.hi.is_variable()) {
          node->bounds_literal = false;
        } else {
          node->lo = f.lo.value;
          node->hi = f.hi.value;
        }
        std::set<std::string> tv = free_object_vars(*f.lhs);
        std::set<std::string> rv = free_object_vars(*f.rhs);
        size_t base = env_.size();
        for (const std::string& v : rv) {
          uint32_t s = new_slot();
          node->loop_slots.push_back(s);
          env_.push_back({v, s});
        }
        node->b = compile(*f.rhs);
        if (tv == rv) node->a = compile(*f.lhs);
        env_.resize(base);
        return node;
      }
    }
    throw InvalidArgument("unreachable formula kind");
  }

  uint32_t bind(const std::string& var) {
    uint32_t s = new_slot();
    env_.push_back({var, s});
    return s;
  }

  uint32_t slot_count() const { return next_slot_; }

 private:
  ArgRef resolve(const Term& t) {
    if (t.kind == TermKind::Function) {
      throw Unsupported("function symbols are not supported by the evaluator");
    }
    if (t.kind == TermKind::Variable) {
      for (size_t i = env_.size(); i-- > 0;) {
        if (env_[i].first == t.name) return ArgRef{true, env_[i].second};
      }
      throw InvalidArgument("object variable '" + t.name + "' is unbound");
    }
    int id = sig_.constant_id(t.name);
    if (id < 0) throw InvalidArgument("constant '" + t.name + "' not in signature");
    return ArgRef{false, static_cast<uint32_t>(id)};
  }

  uint32_t new_slot() { return next_slot_++; }

  const Signature& sig_;
  std::vector<std::pair<std::string, uint32_t>> env_;
  uint32_t next_slot_ = 0;
};

inline CompiledSentence compile_sentence(const Formula& f, const Signature& sig) {
  if (contains_function_term(f)) {
    throw Unsupported("function symbols are not supported by the evaluator");
  }
  Compiler c(sig);
  CompiledSentence out;
  out.root = c.compile(f);
  out.slot_count = c.slot_count();
  return out;
}

// Pre-binds the given variables to slots 0..k-1 so callers can sweep
// assignments for an open formula.
inline CompiledSentence compile_open(const Formula& f, const Signature& sig,
                                     const std::vector<std::string>& variable_order) {
  if (contains_function_term(f)) {
    throw Unsupported("function symbols are not supported by the evaluator");
  }
  std::set<std::string> given(variable_order.begin(), variable_order.end());
  if (given.size() != variable_order.size()) {
    throw InvalidArgument("variable_order mismatch: repeated variable");
  }
  if (given != free_object_vars(f)) {
    throw InvalidArgument(
        "variable_order mismatch: must list exactly the free variables");
  }
  Compiler c(sig);
  for (const std::string& v : variable_order) c.bind(v);
  CompiledSentence out;
  out.root = c.compile(f);
  out.slot_count = c.slot_count();
  return out;
}

inline bool eval(const CompiledNode& node, const FiniteModel& m, uint32_t* slots);

struct StatCounts {
  uint64_t num = 0;
  uint64_t den = 0;
};

inline StatCounts stat_counts(const CompiledNode& node, const FiniteModel& m,
                              uint32_t* slots) {
  StatCounts out;
  const uint32_t n = m.domain_size();
  const size_t dims = node.loop_slots.size();
  std::vector<uint32_t> cursor(dims, 0);
  while (true) {
    for (size_t i = 0; i < dims; ++i) slots[node.loop_slots[i]] = cursor[i];
    if (eval(*node.b, m, slots)) {
      ++out.den;
      if (node.a && eval(*node.a, m, slots)) ++out.num;
    }
    size_t i = 0;
    for (; i < dims; ++i) {
      if (++cursor[i] < n) break;
      cursor[i] = 0;
    }
    if (i == dims) break;
  }
  return out;
}

inline bool eval(const CompiledNode& node, const FiniteModel& m, uint32_t* slots) {
  switch (node.kind) {
    case FormulaKind::Atom: {
      size_t r = 0;
      for (size_t i = node.args.size(); i-- > 0;) {
        const ArgRef& a = node.args[i];
        uint32_t v = a.is_var ? slots[a.index] : m.constant(a.index);
        r = r * m.domain_size() + v;
      }
      return m.contains(node.pred, r);
    }
    case FormulaKind::Not:
      return !eval(*node.a, m, slots);
    case FormulaKind::And:
      return eval(*node.a, m, slots) && eval(*node.b, m, slots);
    case FormulaKind::Or:
      return eval(*node.a, m, slots) || eval(*node.b, m, slots);
    case FormulaKind::Implies:
      return !eval(*node.a, m, slots) || eval(*node.b, m, slots);
    case FormulaKind::Iff:
      return eval(*node.a, m, slots) == eval(*node.b, m, slots);
    case FormulaKind::Forall:
      for (uint32_t v = 0; v < m.domain_size(); ++v) {
        slots[node.slot] = v;
        if (!eval(*node.a, m, slots)) return false;
      }
      return true;
    case FormulaKind::Exists:
      for (uint32_t v = 0; v < m.domain_size(); ++v) {
        slots[node.slot] = v;
        if (eval(*node.a, m, slots)) return true;
      }
      return false;
    case FormulaKind::Stat: {
      if (!node.bounds_literal) {
        throw Unsupported("field-variable bounds cannot be evaluated");
      }
      StatCounts c = stat_counts(node, m, slots);
      if (c.den == 0) return node.lo == 0;
      BigInt num(c.num), den(c.den);
      return numerator(node.lo) * den <= num * denominator(node.lo) &&
             num * denominator(node.hi) <= numerator(node.hi) * den;
    }
  }
  return false;
}

}  // namespace tally::detail
