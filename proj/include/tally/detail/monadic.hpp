#pragma once

// Closed-form counting for monadic signatures. With k unary predicates the
// domain splits into 2^k cells (one per predicate profile). A model is
// determined by how many elements land in each cell (a composition of n) plus
// a cell choice for every constant, weighted by multinomial coefficients and
// cell sizes. Sentence truth depends only on that data, never on which
// concrete elements fill a cell, so counting is polynomial in compositions
// instead of exponential in n.

#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "tally/ast.hpp"
#include "tally/detail/compiled_eval.hpp"
#include "tally/errors.hpp"
#include "tally/kb.hpp"
#include "tally/numbers.hpp"

namespace tally::detail {

inline BigInt binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt out = 1;
  for (uint64_t i = 0; i < k; ++i) {
    out *= n - i;
    out /= i + 1;
  }
  return out;
}

inline std::vector<BigInt> factorial_table(uint32_t n) {
  std::vector<BigInt> out(n + 1);
  out[0] = 1;
  for (uint32_t i = 1; i <= n; ++i) out[i] = out[i - 1] * i;
  return out;
}

inline bool pow_fits_u64(uint64_t base, uint32_t exp) {
  uint64_t limit = uint64_t{1} << 62;
  uint64_t v = 1;
  for (uint32_t i = 0; i < exp; ++i) {
    if (base != 0 && v > limit / base) return false;
    v *= base;
  }
  return true;
}

// How each sentence reads a model in cell form. M: composition only (no
// constants). G: constant profile only (ground, no quantifier or statistics).
// Mixed: both at once.
enum class CellClass { M, G, Mixed };

inline CellClass classify_cell_sentence(const Formula& f) {
  if (!contains_constant(f)) return CellClass::M;
  if (contains_quantifier(f) || contains_stat(f)) return CellClass::Mixed;
  return CellClass::G;
}

struct CellCtx {
  const uint32_t* counts = nullptr;  // composition, indexed by cell
  const uint32_t* gamma = nullptr;   // cell per constant id
  uint32_t cells = 1;
  uint32_t n = 0;
  uint32_t* slots = nullptr;         // cell per variable slot
};

inline bool cell_eval(const CompiledNode& node, const CellCtx& ctx);

struct CellStatCounts {
  uint64_t num = 0;
  uint64_t den = 0;
};

inline CellStatCounts cell_stat_counts(const CompiledNode& node, const CellCtx& ctx) {
  CellStatCounts out;
  const size_t dims = node.loop_slots.size();
  std::vector<uint32_t> cursor(dims, 0);
  while (true) {
    uint64_t weight = 1;
    for (size_t i = 0; i < dims; ++i) {
      uint32_t cell = cursor[i];
      ctx.slots[node.loop_slots[i]] = cell;
      weight *= ctx.counts[cell];
    }
    if (weight != 0 && cell_eval(*node.b, ctx)) {
      out.den += weight;
      if (node.a && cell_eval(*node.a, ctx)) out.num += weight;
    }
    size_t i = 0;
    for (; i < dims; ++i) {
      if (++cursor[i] < ctx.cells) break;
      cursor[i] = 0;
    }
    if (i == dims) break;
  }
  return out;
}

inline bool cell_eval(const CompiledNode& node, const CellCtx& ctx) {
  switch (node.kind) {
    case FormulaKind::Atom: {
      const ArgRef& a = node.args.front();
      uint32_t cell = a.is_var ? ctx.slots[a.index] : ctx.gamma[a.index];
      return (cell >> node.pred) & 1u;
    }
    case FormulaKind::Not:
      return !cell_eval(*node.a, ctx);
    case FormulaKind::And:
      return cell_eval(*node.a, ctx) && cell_eval(*node.b, ctx);
    case FormulaKind::Or:
      return cell_eval(*node.a, ctx) || cell_eval(*node.b, ctx);
    case FormulaKind::Implies:
      return !cell_eval(*node.a, ctx) || cell_eval(*node.b, ctx);
    case FormulaKind::Iff:
      return cell_eval(*node.a, ctx) == cell_eval(*node.b, ctx);
    case FormulaKind::Forall:
      for (uint32_t c = 0; c < ctx.cells; ++c) {
        if (ctx.counts[c] == 0) continue;
        ctx.slots[node.slot] = c;
        if (!cell_eval(*node.a, ctx)) return false;
      }
      return true;
    case FormulaKind::Exists:
      for (uint32_t c = 0; c < ctx.cells; ++c) {
        if (ctx.counts[c] == 0) continue;
        ctx.slots[node.slot] = c;
        if (cell_eval(*node.a, ctx)) return true;
      }
      return false;
    case FormulaKind::Stat: {
      if (!node.bounds_literal) {
        throw Unsupported("field-variable bounds cannot be evaluated");
      }
      CellStatCounts c = cell_stat_counts(node, ctx);
      if (c.den == 0) return node.lo == 0;
      BigInt num(c.num), den(c.den);
      return numerator(node.lo) * den <= num * denominator(node.lo) &&
             num * denominator(node.hi) <= numerator(node.hi) * den;
    }
  }
  return false;
}

inline void collect_constant_ids(const Formula& f, const Signature& sig,
                                 std::set<uint32_t>& out) {
  switch (f.kind) {
    case FormulaKind::Atom:
      for (const Term& t : f.terms) {
        if (t.kind == TermKind::Constant) {
          out.insert(static_cast<uint32_t>(sig.constant_id(t.name)));
        }
      }
      return;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      collect_constant_ids(*f.lhs, sig, out);
      return;
    default:
      collect_constant_ids(*f.lhs, sig, out);
      collect_constant_ids(*f.rhs, sig, out);
      return;
  }
}

inline void collect_predicate_ids(const Formula& f, const Signature& sig,
                                  std::set<uint32_t>& out) {
  switch (f.kind) {
    case FormulaKind::Atom:
      out.insert(static_cast<uint32_t>(sig.predicate_id(f.pred)));
      return;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      collect_predicate_ids(*f.lhs, sig, out);
      return;
    default:
      collect_predicate_ids(*f.lhs, sig, out);
      collect_predicate_ids(*f.rhs, sig, out);
      return;
  }
}

struct CellSentence {
  CompiledSentence compiled;
  CellClass cls = CellClass::M;
  std::set<uint32_t> constants;
  std::set<uint32_t> predicates;
};

struct MonadicTotals {
  BigInt total;
  BigInt premises;
  BigInt premises_and_query;
};

// Exact conditional counting over a monadic signature. Two strategies:
// a projected one when no sentence mixes constants with quantifiers or
// statistics (truth factorizes into a composition part and independent
// constant groups), and a direct sweep over (composition, constant profile)
// pairs otherwise.
class MonadicCounter {
 public:
  MonadicCounter(const KnowledgeBase& kb, const FormulaPtr& query,
                 std::shared_ptr<const Signature> sig)
      : sig_(std::move(sig)) {
    if (!sig_->monadic()) {
      throw Unsupported("cell counting requires a monadic signature");
    }
    k_ = static_cast<uint32_t>(sig_->predicates().size());
    if (k_ > 16) {
      throw Unsupported("cell counting supports at most 16 predicates");
    }
    cells_ = uint32_t{1} << k_;
    constant_count_ = static_cast<uint32_t>(sig_->constants().size());

    for (const FormulaPtr& s : kb.sentences) premises_.push_back(make(s));
    if (query) {
      query_ = make(query);
      has_query_ = true;
    }

    pure_ = true;
    for (const CellSentence& s : premises_) {
      if (s.cls == CellClass::Mixed) pure_ = false;
    }
    if (has_query_ && query_.cls == CellClass::Mixed) pure_ = false;
    if (pure_) build_groups();
  }

  const Signature& signature() const { return *sig_; }

  MonadicTotals count(uint32_t n, uint64_t guard) {
    return run(n, guard, /*early_exit=*/false);
  }

  bool satisfiable(uint32_t n, uint64_t guard) {
    return run(n, guard, /*early_exit=*/true).premises > 0;
  }

 private:
  struct Group {
    std::vector<uint32_t> members;           // constant ids, ascending
    std::vector<const CellSentence*> sents;  // premises
    uint32_t pred_mask = 0;
    uint32_t classes = 1;
    bool has_query = false;
    std::vector<uint32_t> class_of_cell;
    std::vector<uint8_t> table;  // bit 0: premises hold, bit 1: query holds
  };

  CellSentence make(const FormulaPtr& f) {
    CellSentence out;
    out.compiled = compile_sentence(*f, *sig_);
    out.cls = classify_cell_sentence(*f);
    collect_constant_ids(*f, *sig_, out.constants);
    collect_predicate_ids(*f, *sig_, out.predicates);
    return out;
  }

  void build_groups() {
    // Union-find over constants, linked when a ground sentence (or a ground
    // query) mentions both.
    std::vector<uint32_t> root(constant_count_);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](uint32_t x) {
      while (root[x] != x) x = root[x] = root[root[x]];
      return x;
    };
    auto unite = [&](uint32_t a, uint32_t b) { root[find(a)] = find(b); };

    auto link_all = [&](const CellSentence& s) {
      if (s.constants.empty()) return;
      uint32_t first = *s.constants.begin();
      for (uint32_t c : s.constants) unite(first, c);
    };
    for (const CellSentence& s : premises_) {
      if (s.cls == CellClass::G) link_all(s);
    }
    if (has_query_ && query_.cls == CellClass::G) link_all(query_);

    std::map<uint32_t, size_t> group_of_root;
    for (const CellSentence& s : premises_) {
      if (s.cls != CellClass::G) continue;
      place(s, /*is_query=*/false, find, group_of_root);
    }
    if (has_query_ && query_.cls == CellClass::G) {
      place(query_, /*is_query=*/true, find, group_of_root);
    }

    free_constants_ = 0;
    std::set<uint32_t> grouped;
    for (Group& g : groups_) {
      std::set<uint32_t> members(g.members.begin(), g.members.end());
      for (uint32_t c = 0; c < constant_count_; ++c) {
        if (find(c) == find(*members.begin())) members.insert(c);
      }
      g.members.assign(members.begin(), members.end());
      grouped.insert(members.begin(), members.end());
    }
    free_constants_ = constant_count_ - static_cast<uint32_t>(grouped.size());

    for (Group& g : groups_) finish_group(g);
  }

  template <typename Find>
  void place(const CellSentence& s, bool is_query, Find& find,
             std::map<uint32_t, size_t>& group_of_root) {
    uint32_t r = find(*s.constants.begin());
    auto it = group_of_root.find(r);
    if (it == group_of_root.end()) {
      it = group_of_root.emplace(r, groups_.size()).first;
      groups_.emplace_back();
      groups_.back().members.assign(s.constants.begin(), s.constants.end());
    }
    Group& g = groups_[it->second];
    for (uint32_t c : s.constants) {
      if (std::find(g.members.begin(), g.members.end(), c) == g.members.end()) {
        g.members.push_back(c);
      }
    }
    for (uint32_t p : s.predicates) g.pred_mask |= uint32_t{1} << p;
    if (is_query) {
      g.has_query = true;
    } else {
      g.sents.push_back(&s);
    }
  }

  void finish_group(Group& g) {
    std::sort(g.members.begin(), g.members.end());
    uint32_t bits = static_cast<uint32_t>(__builtin_popcount(g.pred_mask));
    g.classes = uint32_t{1} << bits;
    g.class_of_cell.assign(cells_, 0);
    for (uint32_t cell = 0; cell < cells_; ++cell) {
      uint32_t cls = 0, out_bit = 0;
      for (uint32_t p = 0; p < k_; ++p) {
        if (!(g.pred_mask & (uint32_t{1} << p))) continue;
        if ((cell >> p) & 1u) cls |= uint32_t{1} << out_bit;
        ++out_bit;
      }
      g.class_of_cell[cell] = cls;
    }
    // Representative cell per class: spread class bits back onto pred_mask.
    std::vector<uint32_t> rep(g.classes, 0);
    for (uint32_t cls = 0; cls < g.classes; ++cls) {
      uint32_t cell = 0, in_bit = 0;
      for (uint32_t p = 0; p < k_; ++p) {
        if (!(g.pred_mask & (uint32_t{1} << p))) continue;
        if ((cls >> in_bit) & 1u) cell |= uint32_t{1} << p;
        ++in_bit;
      }
      rep[cls] = cell;
    }

    const size_t dims = g.members.size();
    size_t tuples = 1;
    for (size_t i = 0; i < dims; ++i) tuples *= g.classes;
    g.table.assign(tuples, 0);

    std::vector<uint32_t> gamma(constant_count_, 0);
    std::vector<uint32_t> cursor(dims, 0);
    uint32_t max_slots = 1;
    for (const CellSentence* s : g.sents) {
      max_slots = std::max(max_slots, std::max(1u, s->compiled.slot_count));
    }
    if (g.has_query) {
      max_slots = std::max(max_slots, std::max(1u, query_.compiled.slot_count));
    }
    std::vector<uint32_t> slots(max_slots, 0);
    for (size_t t = 0; t < tuples; ++t) {
      for (size_t i = 0; i < dims; ++i) gamma[g.members[i]] = rep[cursor[i]];
      CellCtx ctx{nullptr, gamma.data(), cells_, 0, slots.data()};
      uint8_t flags = 1;
      for (const CellSentence* s : g.sents) {
        if (!cell_eval(*s->compiled.root, ctx)) {
          flags = 0;
          break;
        }
      }
      if (g.has_query && cell_eval(*query_.compiled.root, ctx)) flags |= 2;
      g.table[t] = flags;
      for (size_t i = 0; i < dims; ++i) {
        if (++cursor[i] < g.classes) break;
        cursor[i] = 0;
      }
    }
  }

  // Work estimate, used for the guard: compositions times per-composition
  // steps. Never an undercount of magnitude; the point is to refuse absurd
  // inputs rather than meter precisely.
  BigInt work_estimate(uint32_t n) const {
    BigInt comps = binomial(n + cells_ - 1, cells_ - 1);
    BigInt per = 1;
    if (pure_) {
      for (const Group& g : groups_) {
        BigInt tuples = 1;
        for (size_t i = 0; i < g.members.size(); ++i) tuples *= g.classes;
        per += tuples;
      }
      per += cells_ * (groups_.size() + 1);
    } else {
      uint64_t base = std::min<uint64_t>(n, cells_);
      BigInt gamma = 1;
      for (uint32_t c = 0; c < constant_count_; ++c) gamma *= base;
      per += gamma;
    }
    return comps * per;
  }

  MonadicTotals run(uint32_t n, uint64_t guard, bool early_exit) {
    if (n == 0) throw InvalidArgument("domain size must be at least 1");
    BigInt work = work_estimate(n);
    if (work > guard) throw GuardExceeded(to_text(work), guard);

    MonadicTotals out;
    out.total = 1;
    for (uint32_t c = 0; c < constant_count_; ++c) out.total *= n;
    out.total <<= uint64_t{k_} * n;

    fast_group_products_ = true;
    for (const Group& g : groups_) {
      if (!pow_fits_u64(n, static_cast<uint32_t>(g.members.size()))) {
        fast_group_products_ = false;
      }
    }
    fast_gamma_weight_ = pow_fits_u64(n, constant_count_);

    std::vector<BigInt> fact = factorial_table(n);
    std::vector<uint32_t> m(cells_, 0);

    uint32_t max_slots = 1;
    for (const CellSentence& s : premises_) {
      max_slots = std::max(max_slots, std::max(1u, s.compiled.slot_count));
    }
    if (has_query_) {
      max_slots = std::max(max_slots, std::max(1u, query_.compiled.slot_count));
    }
    std::vector<uint32_t> slots(max_slots, 0);

    bool done = false;
    auto visit = [&](auto&& self, uint32_t cell, uint32_t remaining) -> void {
      if (done) return;
      if (cell + 1 == cells_) {
        m[cell] = remaining;
        visit_composition(n, m, fact, slots, out, early_exit, done);
        return;
      }
      for (uint32_t v = 0; v <= remaining; ++v) {
        m[cell] = v;
        self(self, cell + 1, remaining - v);
        if (done) return;
      }
    };
    visit(visit, 0, n);
    return out;
  }

  void visit_composition(uint32_t n, const std::vector<uint32_t>& m,
                         const std::vector<BigInt>& fact,
                         std::vector<uint32_t>& slots, MonadicTotals& out,
                         bool early_exit, bool& done) {
    CellCtx mctx{m.data(), nullptr, cells_, n, slots.data()};
    for (const CellSentence& s : premises_) {
      if (s.cls == CellClass::M && !cell_eval(*s.compiled.root, mctx)) return;
    }
    bool query_m_true = true;
    if (has_query_ && query_.cls == CellClass::M && !early_exit) {
      query_m_true = cell_eval(*query_.compiled.root, mctx);
    }

    BigInt weight = fact[n];
    for (uint32_t c = 0; c < cells_; ++c) weight /= fact[m[c]];

    if (pure_) {
      BigInt prem = 1, pq = 1;
      for (uint32_t i = 0; i < free_constants_; ++i) {
        prem *= n;
        pq *= n;
      }
      for (const Group& g : groups_) {
        auto [s_all, s_query] = group_sums(g, m);
        prem *= s_all;
        pq *= g.has_query ? s_query : s_all;
        if (prem == 0) return;
      }
      out.premises += weight * prem;
      if (early_exit) {
        done = out.premises > 0;
        return;
      }
      if (query_m_true) out.premises_and_query += weight * pq;
      return;
    }

    // Direct sweep over constant profiles restricted to nonempty cells.
    std::vector<uint32_t> live;
    for (uint32_t c = 0; c < cells_; ++c) {
      if (m[c] > 0) live.push_back(c);
    }
    if (constant_count_ == 0) {
      bool ok = true;
      CellCtx ctx{m.data(), nullptr, cells_, n, slots.data()};
      for (const CellSentence& s : premises_) {
        if (s.cls != CellClass::M && !cell_eval(*s.compiled.root, ctx)) {
          ok = false;
          break;
        }
      }
      if (!ok) return;
      out.premises += weight;
      if (early_exit) {
        done = true;
        return;
      }
      bool q = !has_query_ ||
               (query_.cls == CellClass::M
                    ? query_m_true
                    : cell_eval(*query_.compiled.root, ctx));
      if (q) out.premises_and_query += weight;
      return;
    }

    std::vector<uint32_t> gamma(constant_count_, 0);
    std::vector<uint32_t> cursor(constant_count_, 0);
    while (true) {
      BigInt gweight = 1;
      if (fast_gamma_weight_) {
        uint64_t w = 1;
        for (uint32_t i = 0; i < constant_count_; ++i) {
          gamma[i] = live[cursor[i]];
          w *= m[gamma[i]];
        }
        gweight = w;
      } else {
        for (uint32_t i = 0; i < constant_count_; ++i) {
          gamma[i] = live[cursor[i]];
          gweight *= m[gamma[i]];
        }
      }
      CellCtx ctx{m.data(), gamma.data(), cells_, n, slots.data()};
      bool ok = true;
      for (const CellSentence& s : premises_) {
        if (s.cls != CellClass::M && !cell_eval(*s.compiled.root, ctx)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.premises += weight * gweight;
        if (early_exit) {
          done = true;
          return;
        }
        bool q = !has_query_ ||
                 (query_.cls == CellClass::M
                      ? query_m_true
                      : cell_eval(*query_.compiled.root, ctx));
        if (q) out.premises_and_query += weight * gweight;
      }
      uint32_t i = 0;
      for (; i < constant_count_; ++i) {
        if (++cursor[i] < live.size()) break;
        cursor[i] = 0;
      }
      if (i == constant_count_) break;
    }
  }

  std::pair<BigInt, BigInt> group_sums(const Group& g,
                                       const std::vector<uint32_t>& m) const {
    std::vector<uint64_t> marg(g.classes, 0);
    for (uint32_t cell = 0; cell < cells_; ++cell) {
      marg[g.class_of_cell[cell]] += m[cell];
    }
    const size_t dims = g.members.size();
    std::vector<uint32_t> cursor(dims, 0);
    BigInt s_all = 0, s_query = 0;
    uint64_t fast_all = 0, fast_query = 0;
    size_t t = 0;
    while (true) {
      uint8_t flags = g.table[t];
      if (flags & 1) {
        if (fast_group_products_) {
          uint64_t prod = 1;
          for (size_t i = 0; i < dims; ++i) prod *= marg[cursor[i]];
          fast_all += prod;
          if (flags & 2) fast_query += prod;
        } else {
          BigInt prod = 1;
          for (size_t i = 0; i < dims; ++i) prod *= marg[cursor[i]];
          s_all += prod;
          if (flags & 2) s_query += prod;
        }
      }
      ++t;
      size_t i = 0;
      for (; i < dims; ++i) {
        if (++cursor[i] < g.classes) break;
        cursor[i] = 0;
      }
      if (i == dims) break;
    }
    if (fast_group_products_) {
      s_all = fast_all;
      s_query = fast_query;
    }
    return {s_all, s_query};
  }

  std::shared_ptr<const Signature> sig_;
  uint32_t k_ = 0;
  uint32_t cells_ = 1;
  uint32_t constant_count_ = 0;
  std::vector<CellSentence> premises_;
  CellSentence query_;
  bool has_query_ = false;
  bool pure_ = false;
  std::vector<Group> groups_;
  uint32_t free_constants_ = 0;
  bool fast_group_products_ = true;
  bool fast_gamma_weight_ = true;
};

// Satisfiability oracle for arbitrary subsets of one monadic knowledge base,
// amortized across many queries (the consistent-subset search). Sentence
// truth splits per sentence into a composition part and a profile part, so
// each domain size reduces to a set of (true-sentence mask, support) pairs
// from compositions and (true-sentence mask, used-cells) pairs from profiles.
class MonadicSubsetSat {
 public:
  MonadicSubsetSat(const KnowledgeBase& kb, std::shared_ptr<const Signature> sig)
      : sig_(std::move(sig)) {
    eligible_ = sig_->monadic() && kb.size() <= 64 &&
                sig_->predicates().size() <= 6;
    if (!eligible_) return;
    k_ = static_cast<uint32_t>(sig_->predicates().size());
    cells_ = uint32_t{1} << k_;
    constant_count_ = static_cast<uint32_t>(sig_->constants().size());

    BigInt profiles = 1;
    for (uint32_t c = 0; c < constant_count_; ++c) profiles *= cells_;
    if (profiles > (uint64_t{1} << 22)) {
      eligible_ = false;
      return;
    }

    for (size_t i = 0; i < kb.size(); ++i) {
      CellSentence s;
      s.compiled = compile_sentence(*kb.sentences[i], *sig_);
      s.cls = classify_cell_sentence(*kb.sentences[i]);
      if (s.cls == CellClass::Mixed) {
        eligible_ = false;
        return;
      }
      if (s.cls == CellClass::M) {
        m_index_.push_back(i);
      } else {
        g_index_.push_back(i);
      }
      sentences_.push_back(std::move(s));
    }
  }

  bool eligible() const { return eligible_; }

  // Satisfiability of the sentences selected by `mask` at domain size n.
  bool satisfiable(uint64_t mask, uint32_t n, uint64_t guard) {
    const SizeData& data = for_size(n, guard);
    uint64_t m_need = 0, g_need = 0;
    for (size_t j = 0; j < m_index_.size(); ++j) {
      if (mask & (uint64_t{1} << m_index_[j])) m_need |= uint64_t{1} << j;
    }
    for (size_t j = 0; j < g_index_.size(); ++j) {
      if (mask & (uint64_t{1} << g_index_[j])) g_need |= uint64_t{1} << j;
    }
    for (const auto& [m_true, support] : data.m_pairs) {
      if ((m_need & ~m_true) != 0) continue;
      for (const auto& [g_true, used] : data.g_pairs) {
        if ((g_need & ~g_true) != 0) continue;
        if ((used & ~support) != 0) continue;
        return true;
      }
    }
    return false;
  }

 private:
  struct SizeData {
    std::set<std::pair<uint64_t, uint64_t>> m_pairs;  // (true M mask, support)
    std::set<std::pair<uint64_t, uint64_t>> g_pairs;  // (true G mask, used cells)
  };

  const SizeData& for_size(uint32_t n, uint64_t guard) {
    auto it = by_size_.find(n);
    if (it != by_size_.end()) return it->second;

    BigInt comps = binomial(n + cells_ - 1, cells_ - 1);
    BigInt profiles = 1;
    for (uint32_t c = 0; c < constant_count_; ++c) profiles *= cells_;
    BigInt work = comps + profiles;
    if (work > guard) {
      throw GuardExceeded(to_text(work), guard);
    }

    SizeData data;
    uint32_t max_slots = 1;
    for (const CellSentence& s : sentences_) {
      max_slots = std::max(max_slots, std::max(1u, s.compiled.slot_count));
    }
    std::vector<uint32_t> slots(max_slots, 0);

    std::vector<uint32_t> m(cells_, 0);
    auto visit = [&](auto&& self, uint32_t cell, uint32_t remaining) -> void {
      if (cell + 1 == cells_) {
        m[cell] = remaining;
        CellCtx ctx{m.data(), nullptr, cells_, n, slots.data()};
        uint64_t truth = 0, support = 0;
        for (size_t j = 0; j < m_index_.size(); ++j) {
          const CellSentence& s = sentences_[m_index_[j]];
          if (cell_eval(*s.compiled.root, ctx)) truth |= uint64_t{1} << j;
        }
        for (uint32_t c = 0; c < cells_; ++c) {
          if (m[c] > 0) support |= uint64_t{1} << c;
        }
        data.m_pairs.emplace(truth, support);
        return;
      }
      for (uint32_t v = 0; v <= remaining; ++v) {
        m[cell] = v;
        self(self, cell + 1, remaining - v);
      }
    };
    visit(visit, 0, n);

    std::vector<uint32_t> gamma(constant_count_, 0);
    std::vector<uint32_t> cursor(std::max(1u, constant_count_), 0);
    if (constant_count_ == 0) {
      uint64_t truth = 0;
      for (size_t j = 0; j < g_index_.size(); ++j) truth |= uint64_t{1} << j;
      // No constants: no ground sentences exist, the empty profile uses no cells.
      data.g_pairs.emplace(truth, 0);
    } else {
      while (true) {
        uint64_t used = 0;
        for (uint32_t i = 0; i < constant_count_; ++i) {
          gamma[i] = cursor[i];
          used |= uint64_t{1} << cursor[i];
        }
        CellCtx ctx{nullptr, gamma.data(), cells_, n, slots.data()};
        uint64_t truth = 0;
        for (size_t j = 0; j < g_index_.size(); ++j) {
          const CellSentence& s = sentences_[g_index_[j]];
          if (cell_eval(*s.compiled.root, ctx)) truth |= uint64_t{1} << j;
        }
        data.g_pairs.emplace(truth, used);
        uint32_t i = 0;
        for (; i < constant_count_; ++i) {
          if (++cursor[i] < cells_) break;
          cursor[i] = 0;
        }
        if (i == constant_count_) break;
      }
    }

    return by_size_.emplace(n, std::move(data)).first->second;
  }

  std::shared_ptr<const Signature> sig_;
  bool eligible_ = false;
  uint32_t k_ = 0;
  uint32_t cells_ = 1;
  uint32_t constant_count_ = 0;
  std::vector<CellSentence> sentences_;
  std::vector<size_t> m_index_;
  std::vector<size_t> g_index_;
  std::map<uint32_t, SizeData> by_size_;
};

}  // namespace tally::detail
