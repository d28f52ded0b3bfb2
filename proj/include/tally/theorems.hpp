#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tally/accept.hpp"
#include "tally/census.hpp"
#include "tally/numbers.hpp"
#include "tally/parser.hpp"
#include "tally/support.hpp"

namespace tally {

struct TheoremResult {
  std::string id;
  std::string title;
  std::string expected;
  std::string computed;
  bool passed = false;
};

namespace detail {

inline std::string per_size_text(const SupportVerdict& v) {
  std::string out;
  for (const auto& [n, fraction] : v.per_size) {
    if (!out.empty()) out += ", ";
    out += std::to_string(n) + ": ";
    out += fraction ? to_text(*fraction) : "none";
  }
  return out.empty() ? "none" : out;
}

inline bool fractions_within(const SupportVerdict& v, const Interval& box) {
  bool any = false;
  for (const auto& [n, fraction] : v.per_size) {
    if (!fraction) continue;
    any = true;
    if (*fraction < box.lower || *fraction > box.upper) return false;
  }
  return any;
}

// T-1: sentences the knowledge base makes equivalent draw identical support.
inline TheoremResult theorem_1(const CountOptions& count) {
  TheoremResult r{"T1", "equivalent sentences get equal support", "", "", false};
  KnowledgeBase kb = must_parse_kb("P(a) <-> Q(b).");
  SizeRange range{2, 5};
  SupportVerdict vp = support_by_enumeration(kb, must_parse("P(a)"), range, count);
  SupportVerdict vq = support_by_enumeration(kb, must_parse("Q(b)"), range, count);
  r.expected = "identical per-size fractions, interval [1/2, 1/2]";
  r.computed = "P(a) {" + per_size_text(vp) + "}; Q(b) {" + per_size_text(vq) + "}";
  Interval half{Rational(1, 2), Rational(1, 2)};
  r.passed = vp.per_size == vq.per_size && vp.interval && vq.interval &&
             *vp.interval == half && *vq.interval == half;
  return r;
}

// T-2: direct inference from one statistical premise and one instance.
inline TheoremResult theorem_2(const CountOptions& count) {
  TheoremResult r{"T2", "direct inference hits the stated interval", "", "", false};
  KnowledgeBase kb = must_parse_kb("%(A(x), B(x), 4/5, 4/5). B(a).");
  FormulaPtr query = must_parse("A(a)");

  DetectedStructures det = detect_inference_structures(kb, query);
  Interval box{Rational(4, 5), Rational(4, 5)};
  std::optional<Interval> resolved;
  if (det.structures.size() == 1) {
    resolved = resolve(det.structures, det.inclusions);
  }

  CensusResult at5 = count_models(kb, query, 5, count);
  bool counts_ok = at5.satisfying_premises == 25 &&
                   at5.satisfying_premises_and_query == 20;

  SupportVerdict v = support_by_enumeration(kb, query, SizeRange{2, 6}, count);
  r.expected = "resolver [4/5, 4/5]; n=5 counts 20/25; fractions in [4/5, 4/5]";
  r.computed = "resolver " +
               (resolved ? to_text(*resolved) : std::string("none")) +
               "; n=5 counts " +
               to_text(at5.satisfying_premises_and_query) + "/" +
               to_text(at5.satisfying_premises) + "; {" + per_size_text(v) + "}";
  r.passed = resolved && *resolved == box && counts_ok && fractions_within(v, box);
  return r;
}

// T-3: the narrower reference class governs (specificity).
inline TheoremResult theorem_3(const CountOptions& count) {
  TheoremResult r{"T3", "specificity prefers the narrower reference", "", "", false};
  KnowledgeBase kb = must_parse_kb(
      "%(A(x), B(x), 3/5, 7/10). B(a). Bp(a). forall x (Bp(x) -> B(x)). "
      "%(A(x), Bp(x), 4/5, 9/10).");
  FormulaPtr query = must_parse("A(a)");

  SupportVerdict res = support(kb, query, {{2, 6}, SupportMode::Resolve, count});
  Interval box{Rational(4, 5), Rational(9, 10)};
  SupportVerdict enu = support_by_enumeration(kb, query, SizeRange{2, 6}, count);

  r.expected = "resolver [4/5, 9/10]; fractions within it";
  r.computed = "resolver " +
               (res.interval ? to_text(*res.interval) : std::string("none")) +
               "; {" + per_size_text(enu) + "}";
  r.passed = res.status == SupportStatus::Defined && res.interval &&
             *res.interval == box && fractions_within(enu, box);
  return r;
}

// T-4: a broader class's looser interval does not dilute (strength).
inline TheoremResult theorem_4(const CountOptions& count) {
  TheoremResult r{"T4", "the tighter interval stands", "", "", false};
  KnowledgeBase kb = must_parse_kb(
      "%(A(x), B(x), 4/5, 9/10). B(a). Bp(a). forall x (B(x) -> Bp(x)). "
      "%(A(x), Bp(x), 7/10, 19/20).");
  FormulaPtr query = must_parse("A(a)");

  SupportVerdict res = support(kb, query, {{2, 6}, SupportMode::Resolve, count});
  Interval box{Rational(4, 5), Rational(9, 10)};
  SupportVerdict enu = support_by_enumeration(kb, query, SizeRange{2, 6}, count);

  r.expected = "resolver [4/5, 9/10]; fractions within it";
  r.computed = "resolver " +
               (res.interval ? to_text(*res.interval) : std::string("none")) +
               "; {" + per_size_text(enu) + "}";
  r.passed = res.status == SupportStatus::Defined && res.interval &&
             *res.interval == box && fractions_within(enu, box);
  return r;
}

// T-5: shifted intervals without inclusion combine to [min, max].
inline TheoremResult theorem_5(const CountOptions& count) {
  TheoremResult r{"T5", "conflict collapses to the spanning interval", "", "", false};
  const std::string forward =
      "%(A(x), B(x), 3/5, 7/10). %(A(x), Bp(x), 3/4, 17/20). B(a). Bp(a).";
  const std::string reversed =
      "Bp(a). B(a). %(A(x), Bp(x), 3/4, 17/20). %(A(x), B(x), 3/5, 7/10).";
  FormulaPtr query = must_parse("A(a)");

  SupportOptions opts{{2, 6}, SupportMode::Resolve, count};
  SupportVerdict a = support(must_parse_kb(forward), query, opts);
  SupportVerdict b = support(must_parse_kb(reversed), query, opts);

  Interval box{Rational(3, 5), Rational(17, 20)};
  r.expected = "[3/5, 17/20] in both premise orders";
  r.computed = (a.interval ? to_text(*a.interval) : std::string("none")) +
               " and " +
               (b.interval ? to_text(*b.interval) : std::string("none"));
  r.passed = a.interval && b.interval && *a.interval == box && *b.interval == box;
  return r;
}

// T-6: the lottery description is jointly unsatisfiable, yet the coin query
// is answered from the maximal consistent subsets.
inline TheoremResult theorem_6(const CountOptions& count) {
  TheoremResult r{"T6", "inconsistent premises still answer the coin query", "",
                  "", false};
  KnowledgeBase kb = lottery_kb(3);
  SizeRange range{2, 6};
  bool unsat = !satisfiable_in_range(kb, range, count);
  SupportVerdict v = support(kb, must_parse("H(c)"), {range, SupportMode::Auto, count});

  Interval box{Rational(49, 100), Rational(51, 100)};
  r.expected = "premises unsatisfiable; H(c) Defined [49/100, 51/100] via subsets";
  r.computed = std::string(unsat ? "unsatisfiable" : "satisfiable") + "; " +
               (v.status == SupportStatus::Defined ? "Defined " : "not Defined ") +
               (v.interval ? to_text(*v.interval) : std::string("none"));
  r.passed = unsat && v.status == SupportStatus::Defined && v.interval &&
             *v.interval == box && v.path == SupportPath::Mcs;
  return r;
}

// T-7: per-ticket verdicts conflict and are never accepted.
inline TheoremResult theorem_7(const CountOptions& count) {
  TheoremResult r{"T7", "no verdict on any single ticket", "", "", false};
  KnowledgeBase kb = lottery_kb(3);
  SizeRange range{2, 6};

  bool all_conflicted = true;
  std::string statuses;
  for (uint32_t i = 1; i <= 3; ++i) {
    SupportVerdict v = support(kb, must_parse("~W(t" + std::to_string(i) + ")"),
                               {range, SupportMode::Auto, count});
    if (v.status != SupportStatus::Conflicted) all_conflicted = false;
    if (!statuses.empty()) statuses += ", ";
    statuses += "~W(t" + std::to_string(i) + "): " +
                (v.status == SupportStatus::Conflicted ? "Conflicted" : "other");
  }

  AcceptanceConfig config{Rational(3, 5), range, SupportMode::Auto, count};
  AcceptedSet set = accept(kb, lottery_candidates(3), config);
  bool accepted_ok = set.accepted.size() == 1 &&
                     equal(set.accepted[0].sentence, must_parse("H(c)"));

  r.expected = "every ~W(ti) Conflicted; accept(delta=3/5) = {H(c)}";
  r.computed = statuses + "; accepted " + std::to_string(set.accepted.size());
  r.passed = all_conflicted && accepted_ok;
  return r;
}

// T-8: a sentence of a consistent knowledge base has support [1, 1].
inline TheoremResult theorem_8(const CountOptions& count) {
  TheoremResult r{"T8", "premises support themselves fully", "", "", false};
  KnowledgeBase kb = must_parse_kb("P(a). Q(b).");
  SupportVerdict v =
      support(kb, must_parse("P(a)"), {{2, 5}, SupportMode::Auto, count});
  Interval one{Rational(1), Rational(1)};
  r.expected = "Defined [1, 1]";
  r.computed = (v.status == SupportStatus::Defined ? "Defined " : "not Defined ") +
               (v.interval ? to_text(*v.interval) : std::string("none"));
  r.passed = v.status == SupportStatus::Defined && v.interval && *v.interval == one;
  return r;
}

}  // namespace detail

// The bundled fixture suite: one deterministic result per theorem T-1..T-8.
inline std::vector<TheoremResult> run_theorems(const CountOptions& count = {}) {
  return {detail::theorem_1(count), detail::theorem_2(count),
          detail::theorem_3(count), detail::theorem_4(count),
          detail::theorem_5(count), detail::theorem_6(count),
          detail::theorem_7(count), detail::theorem_8(count)};
}

}  // namespace tally
