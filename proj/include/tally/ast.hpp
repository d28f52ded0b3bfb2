#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tally/numbers.hpp"

namespace tally {

// Terms of the object sort. Identifiers starting with u..z followed only by
// digits are object variables; every other lowercase-initial identifier is a
// constant. Function applications are representable so inputs that use them
// can be diagnosed, but the counting engine rejects them.
enum class TermKind { Variable, Constant, Function };

struct Term {
  TermKind kind = TermKind::Constant;
  std::string name;
  std::vector<Term> args;

  static Term variable(std::string n) {
    return Term{TermKind::Variable, std::move(n), {}};
  }
  static Term constant(std::string n) {
    return Term{TermKind::Constant, std::move(n), {}};
  }
  static Term function(std::string n, std::vector<Term> a) {
    return Term{TermKind::Function, std::move(n), std::move(a)};
  }
};

inline bool operator==(const Term& a, const Term& b) {
  return a.kind == b.kind && a.name == b.name && a.args == b.args;
}
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

inline bool is_variable_name(std::string_view name) {
  if (name.empty()) return false;
  if (name[0] < 'u' || name[0] > 'z') return false;
  for (size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  }
  return true;
}

// A bound in a statistical atom: normally an exact rational literal, but the
// field sort also admits variables (kept representable for completeness;
// knowledge bases require literal bounds).
struct Bound {
  Rational value;
  std::string field_var;

  bool is_variable() const { return !field_var.empty(); }

  static Bound literal(Rational v) { return Bound{std::move(v), {}}; }
  static Bound variable(std::string name) { return Bound{Rational(0), std::move(name)}; }
};

inline bool operator==(const Bound& a, const Bound& b) {
  if (a.is_variable() != b.is_variable()) return false;
  return a.is_variable() ? a.field_var == b.field_var : a.value == b.value;
}

enum class FormulaKind {
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Forall,
  Exists,
  Stat,
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula tree. Statistical atoms %(target, reference, lo, hi) bind
// every object variable occurring in their two components; the components
// themselves must be quantifier-free and statistics-free.
class Formula {
 public:
  FormulaKind kind;

  // Atom
  std::string pred;
  std::vector<Term> terms;

  // Not: child in lhs. Binary connectives: lhs, rhs.
  // Forall/Exists: bound variable in var, body in lhs.
  // Stat: target in lhs, reference in rhs, bounds in lo/hi.
  FormulaPtr lhs;
  FormulaPtr rhs;
  std::string var;
  Bound lo;
  Bound hi;

  static FormulaPtr atom(std::string pred, std::vector<Term> terms = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Atom;
    f->pred = std::move(pred);
    f->terms = std::move(terms);
    return f;
  }
  static FormulaPtr negation(FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Not;
    f->lhs = std::move(child);
    return f;
  }
  static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b) {
    return binary(FormulaKind::And, std::move(a), std::move(b));
  }
  static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b) {
    return binary(FormulaKind::Or, std::move(a), std::move(b));
  }
  static FormulaPtr implication(FormulaPtr a, FormulaPtr b) {
    return binary(FormulaKind::Implies, std::move(a), std::move(b));
  }
  static FormulaPtr biconditional(FormulaPtr a, FormulaPtr b) {
    return binary(FormulaKind::Iff, std::move(a), std::move(b));
  }
  static FormulaPtr forall(std::string var, FormulaPtr body) {
    return quantifier(FormulaKind::Forall, std::move(var), std::move(body));
  }
  static FormulaPtr exists(std::string var, FormulaPtr body) {
    return quantifier(FormulaKind::Exists, std::move(var), std::move(body));
  }
  static FormulaPtr stat(FormulaPtr target, FormulaPtr reference, Bound lo, Bound hi) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Stat;
    f->lhs = std::move(target);
    f->rhs = std::move(reference);
    f->lo = std::move(lo);
    f->hi = std::move(hi);
    return f;
  }

 private:
  static FormulaPtr binary(FormulaKind k, FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
  }
  static FormulaPtr quantifier(FormulaKind k, std::string var, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = std::move(var);
    f->lhs = std::move(body);
    return f;
  }
};

inline bool equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::Atom:
      return a.pred == b.pred && a.terms == b.terms;
    case FormulaKind::Not:
      return equal(*a.lhs, *b.lhs);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return a.var == b.var && equal(*a.lhs, *b.lhs);
    case FormulaKind::Stat:
      return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs) && a.lo == b.lo &&
             a.hi == b.hi;
  }
  return false;
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return equal(*a, *b);
}

namespace detail {

inline void term_variables(const Term& t, std::set<std::string>& out) {
  if (t.kind == TermKind::Variable) out.insert(t.name);
  for (const Term& a : t.args) term_variables(a, out);
}

}  // namespace detail

// Free object variables. Quantifiers bind their variable; a statistical atom
// binds every object variable of both its components.
inline std::set<std::string> free_object_vars(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Atom: {
      std::set<std::string> out;
      for (const Term& t : f.terms) detail::term_variables(t, out);
      return out;
    }
    case FormulaKind::Not:
      return free_object_vars(*f.lhs);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff: {
      std::set<std::string> out = free_object_vars(*f.lhs);
      std::set<std::string> r = free_object_vars(*f.rhs);
      out.insert(r.begin(), r.end());
      return out;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::set<std::string> out = free_object_vars(*f.lhs);
      out.erase(f.var);
      return out;
    }
    case FormulaKind::Stat:
      return {};
  }
  return {};
}

inline bool is_closed(const Formula& f) { return free_object_vars(f).empty(); }

inline bool contains_stat(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Stat:
      return true;
    case FormulaKind::Atom:
      return false;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return contains_stat(*f.lhs);
    default:
      return contains_stat(*f.lhs) || contains_stat(*f.rhs);
  }
}

inline bool contains_quantifier(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return true;
    case FormulaKind::Atom:
      return false;
    case FormulaKind::Not:
      return contains_quantifier(*f.lhs);
    case FormulaKind::Stat:
      return contains_quantifier(*f.lhs) || contains_quantifier(*f.rhs);
    default:
      return contains_quantifier(*f.lhs) || contains_quantifier(*f.rhs);
  }
}

namespace detail {

inline bool term_has_function(const Term& t) {
  if (t.kind == TermKind::Function) return true;
  for (const Term& a : t.args) {
    if (term_has_function(a)) return true;
  }
  return false;
}

inline bool term_has_constant(const Term& t) {
  if (t.kind == TermKind::Constant) return true;
  for (const Term& a : t.args) {
    if (term_has_constant(a)) return true;
  }
  return false;
}

}  // namespace detail

inline bool contains_function_term(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Atom:
      for (const Term& t : f.terms) {
        if (detail::term_has_function(t)) return true;
      }
      return false;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return contains_function_term(*f.lhs);
    default:
      return contains_function_term(*f.lhs) || contains_function_term(*f.rhs);
  }
}

inline bool contains_constant(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Atom:
      for (const Term& t : f.terms) {
        if (detail::term_has_constant(t)) return true;
      }
      return false;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return contains_constant(*f.lhs);
    default:
      return contains_constant(*f.lhs) || contains_constant(*f.rhs);
  }
}

namespace detail {

inline Term substitute_term(const Term& t, const std::string& var, const Term& value) {
  if (t.kind == TermKind::Variable) return t.name == var ? value : t;
  if (t.kind == TermKind::Function) {
    std::vector<Term> args;
    args.reserve(t.args.size());
    for (const Term& a : t.args) args.push_back(substitute_term(a, var, value));
    return Term::function(t.name, std::move(args));
  }
  return t;
}

}  // namespace detail

// Capture is impossible for constant substituends, which is the only use the
// engine has (instantiating a reference formula at a named individual).
inline FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& value) {
  switch (f->kind) {
    case FormulaKind::Atom: {
      std::vector<Term> terms;
      terms.reserve(f->terms.size());
      for (const Term& t : f->terms) {
        terms.push_back(detail::substitute_term(t, var, value));
      }
      return Formula::atom(f->pred, std::move(terms));
    }
    case FormulaKind::Not:
      return Formula::negation(substitute(f->lhs, var, value));
    case FormulaKind::And:
      return Formula::conjunction(substitute(f->lhs, var, value),
                                  substitute(f->rhs, var, value));
    case FormulaKind::Or:
      return Formula::disjunction(substitute(f->lhs, var, value),
                                  substitute(f->rhs, var, value));
    case FormulaKind::Implies:
      return Formula::implication(substitute(f->lhs, var, value),
                                  substitute(f->rhs, var, value));
    case FormulaKind::Iff:
      return Formula::biconditional(substitute(f->lhs, var, value),
                                    substitute(f->rhs, var, value));
    case FormulaKind::Forall:
      if (f->var == var) return f;
      return Formula::forall(f->var, substitute(f->lhs, var, value));
    case FormulaKind::Exists:
      if (f->var == var) return f;
      return Formula::exists(f->var, substitute(f->lhs, var, value));
    case FormulaKind::Stat:
      return f;
  }
  return f;
}

namespace detail {

inline std::string term_text(const Term& t) {
  if (t.kind != TermKind::Function) return t.name;
  std::string out = t.name;
  out += '(';
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    out += term_text(t.args[i]);
  }
  out += ')';
  return out;
}

inline std::string bound_text(const Bound& b) {
  return b.is_variable() ? b.field_var : to_text(b.value);
}

// Precedence levels, loosest first: Iff 0, Implies 1, Or 2, And 3, unary 4.
inline int level_of(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Iff:
      return 0;
    case FormulaKind::Implies:
      return 1;
    case FormulaKind::Or:
      return 2;
    case FormulaKind::And:
      return 3;
    default:
      return 4;
  }
}

inline std::string print(const Formula& f);

inline std::string child_at(const Formula& f, int min_level) {
  std::string body = print(f);
  if (level_of(f) < min_level) return "(" + body + ")";
  return body;
}

inline std::string print(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Atom: {
      if (f.terms.empty()) return f.pred;
      std::string out = f.pred;
      out += '(';
      for (size_t i = 0; i < f.terms.size(); ++i) {
        if (i) out += ", ";
        out += term_text(f.terms[i]);
      }
      out += ')';
      return out;
    }
    case FormulaKind::Not:
      return "~" + child_at(*f.lhs, 4);
    case FormulaKind::And:
      return child_at(*f.lhs, 3) + " & " + child_at(*f.rhs, 4);
    case FormulaKind::Or:
      return child_at(*f.lhs, 2) + " | " + child_at(*f.rhs, 3);
    case FormulaKind::Implies:
      return child_at(*f.lhs, 2) + " -> " + child_at(*f.rhs, 1);
    case FormulaKind::Iff:
      return child_at(*f.lhs, 1) + " <-> " + child_at(*f.rhs, 0);
    case FormulaKind::Forall:
      return "forall " + f.var + " " + child_at(*f.lhs, 4);
    case FormulaKind::Exists:
      return "exists " + f.var + " " + child_at(*f.lhs, 4);
    case FormulaKind::Stat:
      return "%(" + print(*f.lhs) + ", " + print(*f.rhs) + ", " +
             bound_text(f.lo) + ", " + bound_text(f.hi) + ")";
  }
  return {};
}

}  // namespace detail

// Canonical text. Parsing the result reproduces the tree exactly; binary
// connectives re-parenthesize only where the grammar requires it.
inline std::string to_text(const Formula& f) { return detail::print(f); }
inline std::string to_text(const FormulaPtr& f) { return to_text(*f); }
inline std::string to_text(const Term& t) { return detail::term_text(t); }

}  // namespace tally
