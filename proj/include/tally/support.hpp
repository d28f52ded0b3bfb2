#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tally/census.hpp"
#include "tally/detail/monadic.hpp"
#include "tally/errors.hpp"
#include "tally/kb.hpp"
#include "tally/model_space.hpp"
#include "tally/numbers.hpp"

namespace tally {

struct Interval {
  Rational lower;
  Rational upper;
};

inline bool operator==(const Interval& a, const Interval& b) {
  return a.lower == b.lower && a.upper == b.upper;
}
inline bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

inline std::string to_text(const Interval& i) {
  return "[" + to_text(i.lower) + ", " + to_text(i.upper) + "]";
}

struct SizeRange {
  uint32_t min_size = 2;
  uint32_t max_size = 6;
};

enum class SupportStatus { Defined, Conflicted, Vacuous };
enum class SupportPath { Enumeration, Resolver, Mcs };
enum class SupportMode { Auto, Enumerate, Resolve };

struct SubsetVerdict {
  std::vector<size_t> sentence_ids;
  Interval interval;
};

// The answer to "to what degree does the knowledge base support this query".
// Defined carries the interval; Conflicted carries the envelope of the
// disagreeing consistent-subset intervals (diagnostics only, it licenses
// nothing); Vacuous means no size in range had any premise model.
struct SupportVerdict {
  SupportStatus status = SupportStatus::Vacuous;
  std::optional<Interval> interval;
  SupportPath path = SupportPath::Enumeration;
  SizeRange range;
  // Enumeration path: per-size fraction, nullopt when that size has no
  // premise models.
  std::map<uint32_t, std::optional<Rational>> per_size;
  // Subsets path: interval per maximal consistent subset.
  std::vector<SubsetVerdict> breakdown;
};

struct SupportOptions {
  SizeRange range;
  SupportMode mode = SupportMode::Auto;
  CountOptions count;
};

namespace detail {

inline bool satisfiable_by_enumeration(const KnowledgeBase& kb, uint32_t n,
                                       const CountOptions& opts) {
  auto sig = std::make_shared<const Signature>(extract_signature(kb));
  ModelSpace space(sig, n);
  if (space.total() > opts.guard) {
    throw GuardExceeded(to_text(space.total()), opts.guard);
  }
  uint64_t total = space.total().convert_to<uint64_t>();
  std::vector<CompiledSentence> compiled;
  uint32_t slot_count = 1;
  for (const FormulaPtr& s : kb.sentences) {
    compiled.push_back(compile_sentence(*s, *sig));
    slot_count = std::max(slot_count, compiled.back().slot_count);
  }
  FiniteModel m = space.make_model();
  space.decode(0, m);
  std::vector<uint32_t> slots(slot_count, 0);
  for (uint64_t i = 0; i < total; ++i) {
    bool all = true;
    for (const CompiledSentence& s : compiled) {
      if (!eval(*s.root, m, slots.data())) {
        all = false;
        break;
      }
    }
    if (all) return true;
    space.advance(m);
  }
  return false;
}

}  // namespace detail

// Does the knowledge base have a model at this exact domain size?
inline bool satisfiable_at(const KnowledgeBase& kb, uint32_t n,
                           const CountOptions& opts = {}) {
  if (monadic_eligible(kb)) {
    auto sig = std::make_shared<const Signature>(extract_signature(kb));
    detail::MonadicCounter counter(kb, nullptr, sig);
    return counter.satisfiable(n, opts.guard);
  }
  return detail::satisfiable_by_enumeration(kb, n, opts);
}

// Consistency relative to the size range: a model at some size in range.
inline bool satisfiable_in_range(const KnowledgeBase& kb, const SizeRange& range,
                                 const CountOptions& opts = {}) {
  for (uint32_t n = range.min_size; n <= range.max_size; ++n) {
    if (satisfiable_at(kb, n, opts)) return true;
  }
  return false;
}

// Per-size support fractions and their envelope. The fraction at size n is
// (models of premises and query) / (models of premises); sizes with no
// premise models are recorded but excluded from the envelope.
inline SupportVerdict support_by_enumeration(const KnowledgeBase& kb,
                                             const FormulaPtr& query,
                                             const SizeRange& range,
                                             const CountOptions& opts = {}) {
  if (range.min_size < 1 || range.min_size > range.max_size) {
    throw InvalidArgument("invalid size range");
  }
  SupportVerdict v;
  v.path = SupportPath::Enumeration;
  v.range = range;

  std::optional<Interval> envelope;
  for (uint32_t n = range.min_size; n <= range.max_size; ++n) {
    CensusResult census = count_models(kb, query, n, opts);
    if (census.satisfying_premises == 0) {
      v.per_size[n] = std::nullopt;
      continue;
    }
    Rational fraction(census.satisfying_premises_and_query,
                      census.satisfying_premises);
    v.per_size[n] = fraction;
    if (!envelope) {
      envelope = Interval{fraction, fraction};
    } else {
      envelope->lower = std::min(envelope->lower, fraction);
      envelope->upper = std::max(envelope->upper, fraction);
    }
  }
  if (envelope) {
    v.status = SupportStatus::Defined;
    v.interval = envelope;
  } else {
    v.status = SupportStatus::Vacuous;
  }
  return v;
}

// The premise pattern of direct inference: a statistical sentence
// %(target(v), reference(v), lo, hi) together with the ground instance
// reference(c), matched against a ground-atom query target(c).
struct InferenceStructure {
  FormulaPtr target;
  FormulaPtr reference;
  std::string instance;
  Interval interval;
  size_t stat_id = 0;      // sentence index of the statistical premise
  size_t instance_id = 0;  // sentence index of the instance premise
};

struct InclusionFact {
  std::string sub;
  std::string super;
  size_t sentence_id = 0;
};

struct DetectedStructures {
  std::vector<InferenceStructure> structures;
  std::vector<InclusionFact> inclusions;
};

namespace detail {

// %(P(v), rho, lo, hi) where the target is a single-variable atom of the
// query's predicate and the reference is open in exactly that variable.
inline bool stat_matches_query(const Formula& stat, const std::string& query_pred,
                               std::string& var_out) {
  if (stat.kind != FormulaKind::Stat) return false;
  if (stat.lo.is_variable() || stat.hi.is_variable()) return false;
  const Formula& target = *stat.lhs;
  if (target.kind != FormulaKind::Atom || target.pred != query_pred) return false;
  if (target.terms.size() != 1 || target.terms[0].kind != TermKind::Variable) {
    return false;
  }
  const std::string& v = target.terms[0].name;
  std::set<std::string> rv = free_object_vars(*stat.rhs);
  if (rv != std::set<std::string>{v}) return false;
  var_out = v;
  return true;
}

}  // namespace detail

// Finds every direct-inference structure whose target predicate and instance
// constant match the query, plus the inclusion facts among the structures'
// atomic reference predicates. Non-ground-atom queries yield nothing.
inline DetectedStructures detect_inference_structures(const KnowledgeBase& kb,
                                                      const FormulaPtr& query) {
  DetectedStructures out;
  if (!query || query->kind != FormulaKind::Atom) return out;
  if (query->terms.size() != 1 || query->terms[0].kind != TermKind::Constant) {
    return out;
  }
  const std::string& pred = query->pred;
  const std::string& instance = query->terms[0].name;

  for (size_t i = 0; i < kb.size(); ++i) {
    const Formula& s = *kb.sentences[i];
    std::string var;
    if (!detail::stat_matches_query(s, pred, var)) continue;
    FormulaPtr instantiated =
        substitute(s.rhs, var, Term::constant(instance));
    for (size_t j = 0; j < kb.size(); ++j) {
      if (j == i) continue;
      if (!equal(*kb.sentences[j], *instantiated)) continue;
      InferenceStructure st;
      st.target = s.lhs;
      st.reference = s.rhs;
      st.instance = instance;
      st.interval = Interval{s.lo.value, s.hi.value};
      st.stat_id = i;
      st.instance_id = j;
      out.structures.push_back(std::move(st));
      break;
    }
  }

  // Reference predicates eligible for inclusion facts: single-variable atoms.
  std::set<std::string> ref_preds;
  for (const InferenceStructure& st : out.structures) {
    const Formula& r = *st.reference;
    if (r.kind == FormulaKind::Atom && r.terms.size() == 1 &&
        r.terms[0].kind == TermKind::Variable) {
      ref_preds.insert(r.pred);
    }
  }
  if (ref_preds.empty()) return out;

  for (size_t i = 0; i < kb.size(); ++i) {
    const Formula& s = *kb.sentences[i];
    if (s.kind != FormulaKind::Forall) continue;
    const Formula& body = *s.lhs;
    if (body.kind != FormulaKind::Implies) continue;
    const Formula& sub = *body.lhs;
    const Formula& super = *body.rhs;
    auto is_var_atom = [&](const Formula& f) {
      return f.kind == FormulaKind::Atom && f.terms.size() == 1 &&
             f.terms[0].kind == TermKind::Variable && f.terms[0].name == s.var;
    };
    if (!is_var_atom(sub) || !is_var_atom(super)) continue;
    if (!ref_preds.count(sub.pred) || !ref_preds.count(super.pred)) continue;
    out.inclusions.push_back(InclusionFact{sub.pred, super.pred, i});
  }
  return out;
}

namespace detail {

// SHIFTED: the intervals strictly slide past each other in one direction.
// Anything not shifted is nested (one contains the other, possibly equal).
inline bool shifted(const Interval& a, const Interval& b) {
  return (a.lower < b.lower && a.upper < b.upper) ||
         (a.lower > b.lower && a.upper > b.upper);
}

inline bool contains(const Interval& outer, const Interval& inner) {
  return outer.lower <= inner.lower && inner.upper <= outer.upper;
}

struct ResolverItem {
  std::string reference_text;
  std::string target_text;
  std::string ref_pred;  // empty unless the reference is a one-variable atom
  Interval interval;
};

}  // namespace detail

// Combines competing direct-inference structures into one interval:
// a shifted pair with a known strict inclusion between the references keeps
// the included reference's interval (specificity); a nested pair keeps the
// tighter interval (strength); whatever remains is pairwise shifted without
// inclusion and collapses to [min lower, max upper] (conflict). Structures
// are canonicalized first, so the result is independent of input order.
inline Interval resolve(const std::vector<InferenceStructure>& structures,
                        const std::vector<InclusionFact>& inclusions) {
  if (structures.empty()) {
    throw InvalidArgument("resolve requires at least one structure");
  }

  std::vector<detail::ResolverItem> items;
  for (const InferenceStructure& st : structures) {
    detail::ResolverItem item;
    item.reference_text = to_text(st.reference);
    item.target_text = to_text(st.target);
    const Formula& r = *st.reference;
    if (r.kind == FormulaKind::Atom && r.terms.size() == 1 &&
        r.terms[0].kind == TermKind::Variable) {
      item.ref_pred = r.pred;
    }
    item.interval = st.interval;
    items.push_back(std::move(item));
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.reference_text != b.reference_text) {
      return a.reference_text < b.reference_text;
    }
    if (a.target_text != b.target_text) return a.target_text < b.target_text;
    if (a.interval.lower != b.interval.lower) {
      return a.interval.lower < b.interval.lower;
    }
    return a.interval.upper < b.interval.upper;
  });
  items.erase(std::unique(items.begin(), items.end(),
                          [](const auto& a, const auto& b) {
                            return a.reference_text == b.reference_text &&
                                   a.target_text == b.target_text &&
                                   a.interval == b.interval;
                          }),
              items.end());

  // Strict inclusion between reference predicates, transitively closed.
  std::set<std::pair<std::string, std::string>> reach;
  for (const InclusionFact& f : inclusions) reach.emplace(f.sub, f.super);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& a : std::set<std::pair<std::string, std::string>>(reach)) {
      for (const auto& b : std::set<std::pair<std::string, std::string>>(reach)) {
        if (a.second == b.first && !reach.count({a.first, b.second})) {
          reach.emplace(a.first, b.second);
          changed = true;
        }
      }
    }
  }
  auto strictly_included = [&](const std::string& p, const std::string& q) {
    if (p.empty() || q.empty() || p == q) return false;
    return reach.count({p, q}) > 0 && reach.count({q, p}) == 0;
  };

  // Specificity: drop the broader reference of shifted pairs.
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < items.size() && !changed; ++i) {
      for (size_t j = 0; j < items.size() && !changed; ++j) {
        if (i == j) continue;
        if (!detail::shifted(items[i].interval, items[j].interval)) continue;
        if (strictly_included(items[i].ref_pred, items[j].ref_pred)) {
          items.erase(items.begin() + static_cast<long>(j));
          changed = true;
        }
      }
    }
  }

  // Strength: drop the container of nested pairs (duplicates drop too).
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < items.size() && !changed; ++i) {
      for (size_t j = 0; j < items.size() && !changed; ++j) {
        if (i == j) continue;
        if (detail::shifted(items[i].interval, items[j].interval)) continue;
        if (detail::contains(items[j].interval, items[i].interval)) {
          items.erase(items.begin() + static_cast<long>(j));
          changed = true;
        }
      }
    }
  }

  // Conflict: the survivors are pairwise shifted without usable inclusions.
  Interval out = items.front().interval;
  for (const detail::ResolverItem& item : items) {
    out.lower = std::min(out.lower, item.interval.lower);
    out.upper = std::max(out.upper, item.interval.upper);
  }
  return out;
}

// Every subset of sentence indices that is satisfiable at some size in range
// and maximal with that property. Returns the full index set when the whole
// knowledge base is satisfiable. Deterministic order: larger subsets first,
// then by subset mask value.
inline std::vector<std::vector<size_t>> maximal_consistent_subsets(
    const KnowledgeBase& kb, const SizeRange& range, const CountOptions& opts = {}) {
  const size_t n_sent = kb.size();
  if (n_sent > 22) {
    throw Unsupported("consistent-subset search supports at most 22 sentences");
  }

  auto sig = std::make_shared<const Signature>(extract_signature(kb));
  detail::MonadicSubsetSat cache(kb, sig);

  auto subset_of_mask = [&](uint64_t mask) {
    std::vector<size_t> ids;
    for (size_t i = 0; i < n_sent; ++i) {
      if (mask & (uint64_t{1} << i)) ids.push_back(i);
    }
    return ids;
  };

  auto sat = [&](uint64_t mask) {
    if (mask == 0) return true;
    if (cache.eligible()) {
      for (uint32_t n = range.min_size; n <= range.max_size; ++n) {
        if (cache.satisfiable(mask, n, opts.guard)) return true;
      }
      return false;
    }
    return satisfiable_in_range(kb.subset(subset_of_mask(mask)), range, opts);
  };

  const uint64_t full = n_sent == 0 ? 0 : ((uint64_t{1} << n_sent) - 1);
  if (sat(full)) return {subset_of_mask(full)};

  std::vector<std::vector<uint64_t>> by_count(n_sent + 1);
  for (uint64_t mask = 0; mask < full; ++mask) {
    by_count[static_cast<size_t>(std::popcount(mask))].push_back(mask);
  }

  std::vector<uint64_t> found_masks;
  std::vector<std::vector<size_t>> out;
  for (size_t c = n_sent; c-- > 0;) {
    for (uint64_t mask : by_count[c + 1]) {
      bool covered = false;
      for (uint64_t m : found_masks) {
        if ((mask & ~m) == 0) {
          covered = true;
          break;
        }
      }
      if (covered) continue;
      if (sat(mask)) {
        found_masks.push_back(mask);
        out.push_back(subset_of_mask(mask));
      }
    }
  }
  if (out.empty()) out.push_back({});
  return out;
}

// Degree of support of query by kb. Satisfiable knowledge bases go through
// the resolver (ground-atom query with detected structures, or mode resolve)
// or plain enumeration. Unsatisfiable ones are judged per maximal consistent
// subset: agreement on one interval is Defined, disagreement is Conflicted.
inline SupportVerdict support(const KnowledgeBase& kb, const FormulaPtr& query,
                              const SupportOptions& opts = {}) {
  if (!query || !is_closed(*query)) {
    throw InvalidArgument("query must be a closed sentence");
  }
  if (opts.range.min_size < 1 || opts.range.min_size > opts.range.max_size) {
    throw InvalidArgument("invalid size range");
  }

  if (satisfiable_in_range(kb, opts.range, opts.count)) {
    if (opts.mode == SupportMode::Resolve || opts.mode == SupportMode::Auto) {
      DetectedStructures det = detect_inference_structures(kb, query);
      if (!det.structures.empty()) {
        SupportVerdict v;
        v.status = SupportStatus::Defined;
        v.interval = resolve(det.structures, det.inclusions);
        v.path = SupportPath::Resolver;
        v.range = opts.range;
        return v;
      }
      if (opts.mode == SupportMode::Resolve) {
        throw InvalidArgument(
            "mode resolve requires a ground-atom query with matching "
            "direct-inference premises");
      }
    }
    return support_by_enumeration(kb, query, opts.range, opts.count);
  }

  std::vector<std::vector<size_t>> subsets =
      maximal_consistent_subsets(kb, opts.range, opts.count);

  SupportVerdict v;
  v.path = SupportPath::Mcs;
  v.range = opts.range;

  std::optional<Interval> agreed;
  bool all_agree = true;
  std::optional<Interval> envelope;
  for (const std::vector<size_t>& ids : subsets) {
    SupportOptions sub_opts = opts;
    SupportVerdict sub = support(kb.subset(ids), query, sub_opts);
    if (!sub.interval) {
      throw Error("consistent subset produced no interval");
    }
    SubsetVerdict entry;
    entry.sentence_ids = ids;
    entry.interval = *sub.interval;
    v.breakdown.push_back(std::move(entry));

    if (!agreed) {
      agreed = *sub.interval;
    } else if (*agreed != *sub.interval) {
      all_agree = false;
    }
    if (!envelope) {
      envelope = *sub.interval;
    } else {
      envelope->lower = std::min(envelope->lower, sub.interval->lower);
      envelope->upper = std::max(envelope->upper, sub.interval->upper);
    }
  }

  if (all_agree && agreed) {
    v.status = SupportStatus::Defined;
    v.interval = agreed;
  } else {
    v.status = SupportStatus::Conflicted;
    v.interval = envelope;
  }
  return v;
}

}  // namespace tally
