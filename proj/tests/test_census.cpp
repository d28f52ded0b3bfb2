#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracle.hpp"
#include "tally/census.hpp"
#include "tally/json_io.hpp"
#include "tally/model_space.hpp"
#include "tally/parser.hpp"

using namespace tally;

namespace {

std::shared_ptr<const Signature> sig_of(const std::string& kb_text) {
  KnowledgeBase kb = must_parse_kb(kb_text);
  return std::make_shared<const Signature>(extract_signature(kb));
}

}  // namespace

TEST_CASE("the model stream is exhaustive, duplicate-free, and sized exactly") {
  auto count_stream = [](std::shared_ptr<const Signature> sig, uint32_t n) {
    std::set<std::string> seen;
    uint64_t visits = 0;
    enumerate_models(sig, n, [&](const FiniteModel& m, uint64_t index) {
      CHECK(index == visits);
      ++visits;
      seen.insert(dump_model(m).dump());
    });
    CHECK(seen.size() == visits);
    return visits;
  };

  CHECK(count_stream(sig_of("P(a)."), 2) == 8);
  CHECK(count_stream(sig_of("R(b, b)."), 2) == 32);
  KnowledgeBase empty;
  auto no_symbols = std::make_shared<const Signature>(extract_signature(empty));
  CHECK(count_stream(no_symbols, 3) == 1);
}

TEST_CASE("total model count follows the closed form") {
  CHECK(ModelSpace(sig_of("P(a). Q(a). R(a, a)."), 3).total() ==
        BigInt(3) * (BigInt(1) << (3 + 3 + 9)));
  CHECK(ModelSpace(sig_of("P(a). P(b)."), 4).total() == 16 * 16);
}

TEST_CASE("direct-inference example counts, three ways") {
  KnowledgeBase kb = must_parse_kb("%(A(x), B(x), 4/5, 4/5). B(a).");
  FormulaPtr query = must_parse("A(a)");

  CensusResult naive = count_conditional(kb, query, 5);
  CHECK(naive.total_models == 5120);
  CHECK(naive.satisfying_premises == 25);
  CHECK(naive.satisfying_premises_and_query == 20);

  CensusResult cells = count_monadic(kb, query, 5);
  CHECK(cells.total_models == 5120);
  CHECK(cells.satisfying_premises == 25);
  CHECK(cells.satisfying_premises_and_query == 20);

  oracle::Counts check = oracle::count(kb.sentences, query, 5);
  CHECK(check.models == 5120);
  CHECK(check.premises == 25);
  CHECK(check.premises_and_query == 20);
}

TEST_CASE("half-and-half statistical premise over four elements") {
  KnowledgeBase kb = must_parse_kb("%(A(x), B(x), 1/2, 1/2).");
  CensusResult cells = count_monadic(kb, nullptr, 4);
  CHECK(cells.total_models == 256);
  CHECK(cells.satisfying_premises == 54);
  CHECK(cells.satisfying_premises_and_query == 54);

  CensusResult naive = count_conditional(kb, nullptr, 4);
  CHECK(naive.satisfying_premises == 54);
  CHECK(oracle::count(kb.sentences, nullptr, 4).premises == 54);
}

TEST_CASE("empty premises accept every model") {
  KnowledgeBase no_sentences;
  CensusResult r = count_models(no_sentences, must_parse("P(a)"), 3);
  CHECK(r.total_models == 24);
  CHECK(r.satisfying_premises == 24);

  KnowledgeBase one_pred = must_parse_kb("exists x (P(x) | ~P(x)).");
  CHECK(count_models(one_pred, nullptr, 3).satisfying_premises == 8 * 1);
}

TEST_CASE("query limit cases: premise queries and contradictions") {
  KnowledgeBase kb = must_parse_kb("P(a).");
  for (uint32_t n = 1; n <= 4; ++n) {
    CensusResult same = count_models(kb, must_parse("P(a)"), n);
    CHECK(same.satisfying_premises_and_query == same.satisfying_premises);
    CHECK(count_models(kb, must_parse("~P(a)"), n).satisfying_premises_and_query ==
          0);
  }
}

TEST_CASE("census invariants hold on random monadic inputs") {
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 25; ++trial) {
    KnowledgeBase kb = gen::random_monadic_kb(rng);
    FormulaPtr query = gen::random_query(rng);
    for (uint32_t n = 2; n <= 4; ++n) {
      CensusResult fast = count_monadic(kb, query, n);
      CensusResult slow = count_conditional(kb, query, n);
      INFO("trial " << trial << " n " << n);
      CHECK(fast.total_models == slow.total_models);
      CHECK(fast.satisfying_premises == slow.satisfying_premises);
      CHECK(fast.satisfying_premises_and_query ==
            slow.satisfying_premises_and_query);
      CHECK(fast.satisfying_premises_and_query <= fast.satisfying_premises);
      CHECK(fast.satisfying_premises <= fast.total_models);
    }
  }
}

TEST_CASE("both counters agree with the naive oracle") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    KnowledgeBase kb = gen::random_monadic_kb(rng);
    FormulaPtr query = gen::random_query(rng);
    for (uint32_t n = 2; n <= 3; ++n) {
      oracle::Counts expect = oracle::count(kb.sentences, query, n);
      CensusResult fast = count_monadic(kb, query, n);
      INFO("trial " << trial << " n " << n);
      CHECK(fast.total_models == expect.models);
      CHECK(fast.satisfying_premises == expect.premises);
      CHECK(fast.satisfying_premises_and_query == expect.premises_and_query);
    }
  }
}

TEST_CASE("partitioned counting sums to the single-pass census") {
  KnowledgeBase kb = must_parse_kb("forall x (P(x) -> Q(x)). P(a).");
  FormulaPtr query = must_parse("Q(a)");
  auto sig = std::make_shared<const Signature>(
      extract_signature(kb, {query}));
  ModelSpace space(sig, 3);
  uint64_t total = space.total().convert_to<uint64_t>();

  std::vector<detail::CompiledSentence> compiled;
  std::vector<const detail::CompiledNode*> premises;
  uint32_t slots = 0;
  for (const FormulaPtr& s : kb.sentences) {
    compiled.push_back(detail::compile_sentence(*s, *sig));
    premises.push_back(compiled.back().root.get());
    slots = std::max(slots, compiled.back().slot_count);
  }
  detail::CompiledSentence cq = detail::compile_sentence(*query, *sig);
  slots = std::max(slots, cq.slot_count);

  detail::RangeCounts whole =
      detail::count_slice(space, premises, cq.root.get(), slots, 0, total);
  for (uint64_t cut1 : {uint64_t{0}, uint64_t{1}, total / 3, total / 2, total}) {
    for (uint64_t cut2 : {cut1, (cut1 + total) / 2, total}) {
      detail::RangeCounts a =
          detail::count_slice(space, premises, cq.root.get(), slots, 0, cut1);
      detail::RangeCounts b =
          detail::count_slice(space, premises, cq.root.get(), slots, cut1, cut2);
      detail::RangeCounts c =
          detail::count_slice(space, premises, cq.root.get(), slots, cut2, total);
      CHECK(a.premises + b.premises + c.premises == whole.premises);
      CHECK(a.premises_and_query + b.premises_and_query + c.premises_and_query ==
            whole.premises_and_query);
    }
  }
}

TEST_CASE("worker count never changes the census") {
  KnowledgeBase kb = must_parse_kb("forall x (P(x) -> Q(x)). R(a, a).");
  FormulaPtr query = must_parse("exists x R(x, a)");
  CountOptions one{kDefaultGuard, 1};
  CountOptions four{kDefaultGuard, 4};
  CountOptions eight{kDefaultGuard, 8};
  CensusResult r1 = count_conditional(kb, query, 3, one);
  CensusResult r4 = count_conditional(kb, query, 3, four);
  CensusResult r8 = count_conditional(kb, query, 3, eight);
  CHECK(r1.satisfying_premises == r4.satisfying_premises);
  CHECK(r1.satisfying_premises_and_query == r4.satisfying_premises_and_query);
  CHECK(r1.satisfying_premises == r8.satisfying_premises);
  CHECK(r1.satisfying_premises_and_query == r8.satisfying_premises_and_query);
}

TEST_CASE("the guard rejects oversized requests instead of truncating") {
  CHECK(kDefaultGuard == uint64_t{1} << 24);
  KnowledgeBase kb = must_parse_kb("R(a, b).");
  CountOptions tight{1000, 0};
  try {
    count_conditional(kb, nullptr, 3, tight);
    FAIL("expected the guard to fire");
  } catch (const GuardExceeded& e) {
    CHECK(e.guard() == 1000);
    CHECK(e.total() == "4608");
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("4608"));
  }

  CHECK_THROWS_AS(count_models(must_parse_kb("P(a)."), nullptr, 2,
                               CountOptions{2, 0}),
                  GuardExceeded);
}

TEST_CASE("function symbols are rejected by the counting layer") {
  KnowledgeBase kb = must_parse_kb("P(f(a)).");
  CHECK_THROWS_AS(count_conditional(kb, nullptr, 2), Unsupported);
  CHECK_FALSE(monadic_eligible(kb));
}

TEST_CASE("non-monadic signatures fall back to enumeration") {
  KnowledgeBase kb = must_parse_kb("R(a, a).");
  CHECK_FALSE(monadic_eligible(kb));
  CHECK_THROWS_AS(count_monadic(kb, nullptr, 2), Unsupported);
  CensusResult r = count_models(kb, nullptr, 2);
  CHECK(r.total_models == 32);
  CHECK(r.satisfying_premises == 16);
}

TEST_CASE("the cell counter scales far past enumeration") {
  KnowledgeBase kb = must_parse_kb("%(A(x), B(x), 1/2, 1/2). B(a).");
  CensusResult r = count_monadic(kb, must_parse("A(a)"), 40);
  CHECK(r.total_models == BigInt(40) * (BigInt(1) << 80));
  CHECK(r.satisfying_premises > 0);
  Rational fraction(r.satisfying_premises_and_query, r.satisfying_premises);
  CHECK(fraction == Rational(1, 2));
}
