#pragma once

#include <algorithm>
#include <memory>
#include <thread>
#include <vector>

#include "tally/detail/compiled_eval.hpp"
#include "tally/detail/monadic.hpp"
#include "tally/errors.hpp"
#include "tally/kb.hpp"
#include "tally/model_space.hpp"
#include "tally/numbers.hpp"

namespace tally {

struct CountOptions {
  uint64_t guard = kDefaultGuard;
  unsigned threads = 0;  // 0 picks the hardware default
};

struct CensusResult {
  uint32_t domain_size = 0;
  BigInt total_models;
  BigInt satisfying_premises;
  BigInt satisfying_premises_and_query;
};

namespace detail {

struct RangeCounts {
  uint64_t premises = 0;
  uint64_t premises_and_query = 0;
};

// Counts one contiguous slice [first, last) of the model stream. Partitioning
// the stream any way and summing slice counts gives the same census.
inline RangeCounts count_slice(const ModelSpace& space,
                               const std::vector<const CompiledNode*>& premises,
                               const CompiledNode* query, uint32_t slot_count,
                               uint64_t first, uint64_t last) {
  RangeCounts out;
  if (first >= last) return out;
  FiniteModel m = space.make_model();
  space.decode(first, m);
  std::vector<uint32_t> slots(std::max<uint32_t>(slot_count, 1), 0);
  for (uint64_t i = first; i < last; ++i) {
    bool all = true;
    for (const CompiledNode* p : premises) {
      if (!eval(*p, m, slots.data())) {
        all = false;
        break;
      }
    }
    if (all) {
      ++out.premises;
      if (query == nullptr || eval(*query, m, slots.data())) {
        ++out.premises_and_query;
      }
    }
    space.advance(m);
  }
  return out;
}

}  // namespace detail

// Exact conditional model census by explicit enumeration: how many
// interpretations at domain size n satisfy every sentence of kb, and how many
// of those also satisfy the query (pass nullptr to count premises only). The
// signature is extracted from kb plus query. Work is bounded by the guard.
inline CensusResult count_conditional(const KnowledgeBase& kb, const FormulaPtr& query,
                                      uint32_t n, const CountOptions& opts = {}) {
  std::vector<FormulaPtr> extra;
  if (query) {
    if (!is_closed(*query)) throw InvalidArgument("query must be a closed sentence");
    extra.push_back(query);
  }
  auto sig = std::make_shared<const Signature>(extract_signature(kb, extra));
  ModelSpace space(sig, n);

  CensusResult res;
  res.domain_size = n;
  res.total_models = space.total();
  if (space.total() > opts.guard) {
    throw GuardExceeded(to_text(space.total()), opts.guard);
  }
  uint64_t total = space.total().convert_to<uint64_t>();

  std::vector<detail::CompiledSentence> compiled;
  compiled.reserve(kb.size());
  std::vector<const detail::CompiledNode*> premise_nodes;
  uint32_t slot_count = 0;
  for (const FormulaPtr& s : kb.sentences) {
    compiled.push_back(detail::compile_sentence(*s, *sig));
    premise_nodes.push_back(compiled.back().root.get());
    slot_count = std::max(slot_count, compiled.back().slot_count);
  }
  detail::CompiledSentence cq;
  const detail::CompiledNode* query_node = nullptr;
  if (query) {
    cq = detail::compile_sentence(*query, *sig);
    query_node = cq.root.get();
    slot_count = std::max(slot_count, cq.slot_count);
  }

  unsigned threads = opts.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<uint64_t>(threads, std::max<uint64_t>(1, total / 4096)));

  if (threads <= 1) {
    detail::RangeCounts c = detail::count_slice(space, premise_nodes, query_node,
                                                slot_count, 0, total);
    res.satisfying_premises = c.premises;
    res.satisfying_premises_and_query = c.premises_and_query;
    return res;
  }

  std::vector<detail::RangeCounts> parts(threads);
  std::vector<std::thread> pool;
  uint64_t chunk = total / threads;
  uint64_t extra_models = total % threads;
  uint64_t start = 0;
  for (unsigned t = 0; t < threads; ++t) {
    uint64_t len = chunk + (t < extra_models ? 1 : 0);
    uint64_t first = start, last = start + len;
    start = last;
    pool.emplace_back([&, t, first, last] {
      parts[t] = detail::count_slice(space, premise_nodes, query_node, slot_count,
                                     first, last);
    });
  }
  for (std::thread& th : pool) th.join();

  for (const detail::RangeCounts& c : parts) {
    res.satisfying_premises += c.premises;
    res.satisfying_premises_and_query += c.premises_and_query;
  }
  return res;
}

// Same census through the cell decomposition; requires every predicate to be
// unary and no function symbols. Equal to count_conditional on its domain,
// exponentially faster in n. The guard bounds the counter's own work, not the
// (possibly astronomically larger) number of models.
inline CensusResult count_monadic(const KnowledgeBase& kb, const FormulaPtr& query,
                                  uint32_t n, const CountOptions& opts = {}) {
  std::vector<FormulaPtr> extra;
  if (query) {
    if (!is_closed(*query)) throw InvalidArgument("query must be a closed sentence");
    extra.push_back(query);
  }
  auto sig = std::make_shared<const Signature>(extract_signature(kb, extra));
  detail::MonadicCounter counter(kb, query, sig);
  detail::MonadicTotals totals = counter.count(n, opts.guard);

  CensusResult res;
  res.domain_size = n;
  res.total_models = totals.total;
  res.satisfying_premises = totals.premises;
  res.satisfying_premises_and_query =
      query ? totals.premises_and_query : totals.premises;
  return res;
}

// True when the signature of kb (plus query) lets count_monadic run.
inline bool monadic_eligible(const KnowledgeBase& kb, const FormulaPtr& query = {}) {
  std::vector<FormulaPtr> extra;
  if (query) extra.push_back(query);
  Signature sig = extract_signature(kb, extra);
  return sig.monadic() && sig.predicates().size() <= 16;
}

// Routes to the cell counter when possible, the enumerator otherwise.
inline CensusResult count_models(const KnowledgeBase& kb, const FormulaPtr& query,
                                 uint32_t n, const CountOptions& opts = {}) {
  if (monadic_eligible(kb, query)) return count_monadic(kb, query, n, opts);
  return count_conditional(kb, query, n, opts);
}

}  // namespace tally
