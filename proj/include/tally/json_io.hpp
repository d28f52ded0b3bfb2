#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "tally/accept.hpp"
#include "tally/census.hpp"
#include "tally/kb.hpp"
#include "tally/model.hpp"
#include "tally/numbers.hpp"
#include "tally/support.hpp"
#include "tally/theorems.hpp"

#include <nlohmann/json.hpp>

namespace tally {

using Json = nlohmann::ordered_json;

// Every numeric quantity is serialized as an exact decimal or fraction
// string; floats never appear. Object key order is fixed, so equal values
// serialize to identical bytes.

inline Json to_json(const Interval& i) {
  return Json{{"lower", to_text(i.lower)}, {"upper", to_text(i.upper)}};
}

inline Json to_json(const SizeRange& r) {
  return Json{{"min", r.min_size}, {"max", r.max_size}};
}

inline std::string to_text(SupportStatus s) {
  switch (s) {
    case SupportStatus::Defined: return "defined";
    case SupportStatus::Conflicted: return "conflicted";
    default: return "vacuous";
  }
}

inline std::string to_text(SupportPath p) {
  switch (p) {
    case SupportPath::Enumeration: return "enumeration";
    case SupportPath::Resolver: return "resolver";
    default: return "mcs";
  }
}

inline Json to_json(const SupportVerdict& v) {
  Json out;
  out["status"] = to_text(v.status);
  out["interval"] = v.interval ? to_json(*v.interval) : Json(nullptr);
  out["path"] = to_text(v.path);
  out["size_range"] = to_json(v.range);
  Json per = Json::object();
  for (const auto& [n, fraction] : v.per_size) {
    per[std::to_string(n)] =
        fraction ? to_text(*fraction) : std::string("no premise models");
  }
  out["per_size"] = per;
  Json breakdown = Json::array();
  for (const SubsetVerdict& s : v.breakdown) {
    breakdown.push_back(
        Json{{"sentences", s.sentence_ids}, {"interval", to_json(s.interval)}});
  }
  out["mcs_breakdown"] = breakdown;
  return out;
}

inline Json to_json(const CensusResult& c) {
  return Json{{"domain_size", c.domain_size},
              {"total_models", to_text(c.total_models)},
              {"satisfying_premises", to_text(c.satisfying_premises)},
              {"satisfying_premises_and_query",
               to_text(c.satisfying_premises_and_query)}};
}

inline Json to_json(const AcceptedSet& set) {
  Json out;
  out["delta"] = to_text(set.delta);
  Json accepted = Json::array();
  for (const AcceptedEntry& e : set.accepted) {
    accepted.push_back(
        Json{{"sentence", to_text(e.sentence)}, {"verdict", to_json(e.verdict)}});
  }
  out["accepted"] = accepted;
  Json rejected = Json::array();
  for (const RejectedEntry& e : set.rejected) {
    rejected.push_back(Json{{"sentence", to_text(e.sentence)},
                            {"verdict", e.verdict ? to_json(*e.verdict) : Json(nullptr)},
                            {"reason", e.reason}});
  }
  out["rejected"] = rejected;
  return out;
}

inline Json to_json(const LotteryReport& r) {
  Json out;
  out["tickets"] = r.tickets;
  out["delta"] = to_text(r.delta);
  out["size_range"] = to_json(r.range);
  out["kb"] = r.kb_sentences;
  out["kb_satisfiable"] = r.kb_satisfiable;
  out["maximal_consistent_subsets"] = r.consistent_subsets;
  out["acceptance"] = to_json(r.result);
  out["accepted_set_satisfiable"] = r.accepted_set_satisfiable;
  return out;
}

inline Json to_json(const TheoremResult& t) {
  return Json{{"id", t.id},
              {"title", t.title},
              {"expected", t.expected},
              {"computed", t.computed},
              {"passed", t.passed}};
}

inline Json to_json(const std::vector<TheoremResult>& results) {
  Json out = Json::array();
  for (const TheoremResult& t : results) out.push_back(to_json(t));
  return out;
}

inline Json signature_summary(const Signature& sig, size_t sentence_count) {
  Json out;
  out["sentences"] = sentence_count;
  Json preds = Json::array();
  for (const SymbolInfo& p : sig.predicates()) {
    preds.push_back(p.name + "/" + std::to_string(p.arity));
  }
  out["predicates"] = preds;
  out["constants"] = sig.constants();
  Json funcs = Json::array();
  for (const SymbolInfo& f : sig.functions()) {
    funcs.push_back(f.name + "/" + std::to_string(f.arity));
  }
  out["functions"] = funcs;
  return out;
}

// Debug dump of one interpretation: constant map plus each predicate's
// extension as a lexicographically sorted tuple list. Byte-stable, diffable.
inline Json dump_model(const FiniteModel& m) {
  const Signature& sig = m.signature();
  Json out;
  out["domain_size"] = m.domain_size();
  Json constants = Json::object();
  for (size_t c = 0; c < sig.constants().size(); ++c) {
    constants[sig.constants()[c]] = m.constant(static_cast<int>(c));
  }
  out["constant_map"] = constants;
  Json extensions = Json::object();
  for (size_t p = 0; p < sig.predicates().size(); ++p) {
    const int arity = sig.predicates()[p].arity;
    const std::vector<uint8_t>& bits = m.extension(static_cast<int>(p));
    std::vector<std::vector<uint32_t>> tuples;
    for (size_t r = 0; r < bits.size(); ++r) {
      if (!bits[r]) continue;
      std::vector<uint32_t> tuple(static_cast<size_t>(arity));
      size_t rest = r;
      for (int i = 0; i < arity; ++i) {
        tuple[static_cast<size_t>(i)] =
            static_cast<uint32_t>(rest % m.domain_size());
        rest /= m.domain_size();
      }
      tuples.push_back(std::move(tuple));
    }
    std::sort(tuples.begin(), tuples.end());
    extensions[sig.predicates()[p].name] = tuples;
  }
  out["extensions"] = extensions;
  return out;
}

}  // namespace tally
