#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tally/ast.hpp"
#include "tally/errors.hpp"
#include "tally/kb.hpp"
#include "tally/numbers.hpp"
#include "tally/support.hpp"

namespace tally {

struct AcceptanceConfig {
  Rational delta;
  SizeRange range;
  SupportMode mode = SupportMode::Auto;
  CountOptions count;
};

struct AcceptedEntry {
  FormulaPtr sentence;
  SupportVerdict verdict;
};

struct RejectedEntry {
  FormulaPtr sentence;
  std::optional<SupportVerdict> verdict;  // absent when support itself failed
  std::string reason;
};

struct AcceptedSet {
  Rational delta;
  std::vector<AcceptedEntry> accepted;
  std::vector<RejectedEntry> rejected;
};

// Threshold acceptance: a candidate is accepted exactly when its verdict is
// Defined and the interval's lower bound strictly exceeds 1 - delta.
// Conflicted and Vacuous verdicts carry no probability and are rejected at
// every delta. Failures (such as the size guard) reject the one candidate
// rather than abort the batch.
inline AcceptedSet accept(const KnowledgeBase& kb,
                          const std::vector<FormulaPtr>& candidates,
                          const AcceptanceConfig& config) {
  if (!(config.delta > 0 && config.delta < 1)) {
    throw InvalidArgument("delta must satisfy 0 < delta < 1");
  }
  const Rational threshold = Rational(1) - config.delta;

  SupportOptions sup;
  sup.range = config.range;
  sup.mode = config.mode;
  sup.count = config.count;

  AcceptedSet out;
  out.delta = config.delta;
  for (const FormulaPtr& candidate : candidates) {
    SupportVerdict v;
    try {
      v = support(kb, candidate, sup);
    } catch (const Error& e) {
      out.rejected.push_back(RejectedEntry{candidate, std::nullopt, e.what()});
      continue;
    }
    if (v.status != SupportStatus::Defined) {
      out.rejected.push_back(
          RejectedEntry{candidate, std::move(v), "no probability"});
      continue;
    }
    if (v.interval->lower > threshold) {
      out.accepted.push_back(AcceptedEntry{candidate, std::move(v)});
    } else {
      out.rejected.push_back(RejectedEntry{
          candidate, std::move(v), "lower bound does not exceed 1 - delta"});
    }
  }
  return out;
}

// The k-ticket lottery: exactly one of t1..tk wins (one disjunction plus all
// pairwise negated conjunctions), yet each ticket is individually described
// as losing; a fair-coin statement rides along to show ordinary queries keep
// working. Constants: t1..tk and the toss c.
inline KnowledgeBase lottery_kb(uint32_t tickets) {
  if (tickets < 2) throw InvalidArgument("lottery needs at least 2 tickets");

  auto ticket = [](uint32_t i) {
    return Term::constant("t" + std::to_string(i + 1));
  };
  auto wins = [&](uint32_t i) {
    return Formula::atom("W", {ticket(i)});
  };

  KnowledgeBase kb;
  int line = 1;
  auto add = [&](FormulaPtr f) { kb.add(std::move(f), {"lottery", line++}); };

  FormulaPtr someone = wins(0);
  for (uint32_t i = 1; i < tickets; ++i) {
    someone = Formula::disjunction(someone, wins(i));
  }
  add(someone);
  for (uint32_t i = 0; i < tickets; ++i) {
    for (uint32_t j = i + 1; j < tickets; ++j) {
      add(Formula::negation(Formula::conjunction(wins(i), wins(j))));
    }
  }
  for (uint32_t i = 0; i < tickets; ++i) {
    add(Formula::negation(wins(i)));
  }
  add(Formula::stat(Formula::atom("H", {Term::variable("x")}),
                    Formula::atom("T", {Term::variable("x")}),
                    Bound::literal(Rational(49, 100)),
                    Bound::literal(Rational(51, 100))));
  add(Formula::atom("T", {Term::constant("c")}));
  return kb;
}

inline std::vector<FormulaPtr> lottery_candidates(uint32_t tickets) {
  std::vector<FormulaPtr> out;
  out.push_back(Formula::atom("H", {Term::constant("c")}));
  for (uint32_t i = 0; i < tickets; ++i) {
    out.push_back(Formula::negation(
        Formula::atom("W", {Term::constant("t" + std::to_string(i + 1))})));
  }
  return out;
}

struct LotteryReport {
  uint32_t tickets = 0;
  Rational delta;
  SizeRange range;
  std::vector<std::string> kb_sentences;
  bool kb_satisfiable = false;
  std::vector<std::vector<size_t>> consistent_subsets;
  AcceptedSet result;
  bool accepted_set_satisfiable = false;
};

// End-to-end demonstration: the description is jointly unsatisfiable, every
// per-ticket claim comes back Conflicted, the coin query is answered from the
// consistent subsets, and the accepted set does not inherit the contradiction.
inline LotteryReport lottery_demo(uint32_t tickets, const Rational& delta,
                                  const SizeRange& range = {},
                                  const CountOptions& count = {}) {
  LotteryReport report;
  report.tickets = tickets;
  report.delta = delta;
  report.range = range;

  KnowledgeBase kb = lottery_kb(tickets);
  for (const FormulaPtr& s : kb.sentences) {
    report.kb_sentences.push_back(to_text(s));
  }
  report.kb_satisfiable = satisfiable_in_range(kb, range, count);
  report.consistent_subsets = maximal_consistent_subsets(kb, range, count);

  AcceptanceConfig config;
  config.delta = delta;
  config.range = range;
  config.count = count;
  report.result = accept(kb, lottery_candidates(tickets), config);

  KnowledgeBase accepted_kb;
  for (const AcceptedEntry& e : report.result.accepted) {
    accepted_kb.add(e.sentence);
  }
  report.accepted_set_satisfiable =
      accepted_kb.empty() || satisfiable_in_range(accepted_kb, range, count);
  return report;
}

}  // namespace tally
