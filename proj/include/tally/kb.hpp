#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "tally/ast.hpp"
#include "tally/errors.hpp"

namespace tally {

struct SourceLabel {
  std::string file;
  int line = 0;
};

// An ordered list of closed sentences. Order fixes the statement ids used in
// subset reports and diagnostics but never affects semantics.
struct KnowledgeBase {
  std::vector<FormulaPtr> sentences;
  std::vector<SourceLabel> labels;

  void add(FormulaPtr sentence, SourceLabel label = {}) {
    sentences.push_back(std::move(sentence));
    labels.push_back(std::move(label));
  }

  size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }

  KnowledgeBase subset(const std::vector<size_t>& indices) const {
    KnowledgeBase out;
    for (size_t i : indices) {
      out.add(sentences.at(i), labels.at(i));
    }
    return out;
  }
};

struct SymbolInfo {
  std::string name;
  int arity = 0;
};

inline bool operator==(const SymbolInfo& a, const SymbolInfo& b) {
  return a.name == b.name && a.arity == b.arity;
}

// The symbols a counting problem ranges over. Extraction is deterministic:
// predicates, constants, and function symbols are each sorted by name.
class Signature {
 public:
  Signature(std::vector<SymbolInfo> predicates, std::vector<std::string> constants,
            std::vector<SymbolInfo> functions)
      : predicates_(std::move(predicates)),
        constants_(std::move(constants)),
        functions_(std::move(functions)) {
    for (size_t i = 0; i < predicates_.size(); ++i) {
      pred_index_[predicates_[i].name] = static_cast<int>(i);
    }
    for (size_t i = 0; i < constants_.size(); ++i) {
      const_index_[constants_[i]] = static_cast<int>(i);
    }
  }

  const std::vector<SymbolInfo>& predicates() const { return predicates_; }
  const std::vector<std::string>& constants() const { return constants_; }
  const std::vector<SymbolInfo>& functions() const { return functions_; }

  int predicate_id(const std::string& name) const {
    auto it = pred_index_.find(name);
    return it == pred_index_.end() ? -1 : it->second;
  }
  int constant_id(const std::string& name) const {
    auto it = const_index_.find(name);
    return it == const_index_.end() ? -1 : it->second;
  }
  int arity(int pred_id) const { return predicates_.at(pred_id).arity; }

  bool monadic() const {
    if (!functions_.empty()) return false;
    return std::all_of(predicates_.begin(), predicates_.end(),
                       [](const SymbolInfo& p) { return p.arity == 1; });
  }

 private:
  std::vector<SymbolInfo> predicates_;
  std::vector<std::string> constants_;
  std::vector<SymbolInfo> functions_;
  std::unordered_map<std::string, int> pred_index_;
  std::unordered_map<std::string, int> const_index_;
};

namespace detail {

struct SymbolScan {
  std::map<std::string, int> predicates;
  std::map<std::string, int> functions;
  std::map<std::string, bool> constants;

  void note_predicate(const std::string& name, int arity) {
    auto [it, fresh] = predicates.emplace(name, arity);
    if (!fresh && it->second != arity) {
      throw Error("predicate '" + name + "' used with arity " +
                  std::to_string(arity) + " and arity " + std::to_string(it->second));
    }
  }
  void note_function(const std::string& name, int arity) {
    auto [it, fresh] = functions.emplace(name, arity);
    if (!fresh && it->second != arity) {
      throw Error("function '" + name + "' used with arity " +
                  std::to_string(arity) + " and arity " + std::to_string(it->second));
    }
  }

  void scan_term(const Term& t) {
    if (t.kind == TermKind::Constant) {
      constants[t.name] = true;
    } else if (t.kind == TermKind::Function) {
      note_function(t.name, static_cast<int>(t.args.size()));
      for (const Term& a : t.args) scan_term(a);
    }
  }

  void scan(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::Atom:
        note_predicate(f.pred, static_cast<int>(f.terms.size()));
        for (const Term& t : f.terms) scan_term(t);
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

}  // namespace detail

// Collects every predicate, constant, and function symbol occurring in the
// sentences plus any extra formulas (typically a query). Throws Error when a
// symbol is used at two different arities.
inline Signature extract_signature(const KnowledgeBase& kb,
                                   const std::vector<FormulaPtr>& extra = {}) {
  detail::SymbolScan scan;
  for (const FormulaPtr& s : kb.sentences) scan.scan(*s);
  for (const FormulaPtr& s : extra) scan.scan(*s);

  std::vector<SymbolInfo> preds;
  preds.reserve(scan.predicates.size());
  for (const auto& [name, arity] : scan.predicates) preds.push_back({name, arity});

  std::vector<std::string> consts;
  consts.reserve(scan.constants.size());
  for (const auto& [name, seen] : scan.constants) consts.push_back(name);

  std::vector<SymbolInfo> funcs;
  funcs.reserve(scan.functions.size());
  for (const auto& [name, arity] : scan.functions) funcs.push_back({name, arity});

  return Signature(std::move(preds), std::move(consts), std::move(funcs));
}

}  // namespace tally
