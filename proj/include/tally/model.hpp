#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tally/errors.hpp"
#include "tally/kb.hpp"

namespace tally {

// A finite interpretation: domain {0, .., n-1}, a relation per predicate, an
// element per constant. Relations are dense bitmaps indexed by tuple rank
// (little-endian mixed radix, base n), so cell updates and membership tests
// are O(1) for the enumerator.
class FiniteModel {
 public:
  FiniteModel(std::shared_ptr<const Signature> sig, uint32_t n)
      : sig_(std::move(sig)), n_(n) {
    if (n_ == 0) throw InvalidArgument("domain size must be at least 1");
    constant_value_.assign(sig_->constants().size(), 0);
    extensions_.resize(sig_->predicates().size());
    for (size_t p = 0; p < extensions_.size(); ++p) {
      uint64_t cells = 1;
      for (int a = 0; a < sig_->predicates()[p].arity; ++a) {
        if (cells > (uint64_t{1} << 62) / n_) {
          throw Unsupported("relation for '" + sig_->predicates()[p].name +
                            "' is too large to materialize");
        }
        cells *= n_;
      }
      extensions_[p].assign(cells, 0);
    }
  }

  uint32_t domain_size() const { return n_; }
  const Signature& signature() const { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }

  size_t rank(std::span<const uint32_t> tuple) const {
    size_t r = 0;
    for (size_t i = tuple.size(); i-- > 0;) r = r * n_ + tuple[i];
    return r;
  }

  bool contains(int pred_id, size_t rank) const {
    return extensions_[pred_id][rank] != 0;
  }
  void set(int pred_id, size_t rank, bool value) {
    extensions_[pred_id][rank] = value ? 1 : 0;
  }

  uint32_t constant(int const_id) const { return constant_value_[const_id]; }
  void set_constant(int const_id, uint32_t value) {
    check_element(value);
    constant_value_[const_id] = value;
  }

  std::vector<uint8_t>& extension(int pred_id) { return extensions_[pred_id]; }
  const std::vector<uint8_t>& extension(int pred_id) const {
    return extensions_[pred_id];
  }

  // Name-based conveniences for tests and fixtures.
  void set_constant(const std::string& name, uint32_t value) {
    int id = sig_->constant_id(name);
    if (id < 0) throw InvalidArgument("unknown constant '" + name + "'");
    set_constant(id, value);
  }
  void add_tuple(const std::string& pred, const std::vector<uint32_t>& tuple) {
    int id = sig_->predicate_id(pred);
    if (id < 0) throw InvalidArgument("unknown predicate '" + pred + "'");
    if (static_cast<int>(tuple.size()) != sig_->arity(id)) {
      throw InvalidArgument("arity mismatch for '" + pred + "'");
    }
    for (uint32_t v : tuple) check_element(v);
    set(id, rank(tuple), true);
  }

 private:
  void check_element(uint32_t value) const {
    if (value >= n_) {
      throw InvalidArgument("element " + std::to_string(value) +
                            " outside domain of size " + std::to_string(n_));
    }
  }

  std::shared_ptr<const Signature> sig_;
  uint32_t n_;
  std::vector<uint32_t> constant_value_;
  std::vector<std::vector<uint8_t>> extensions_;
};

// The assignments of domain elements to a fixed list of object variables that
// make an open formula true in a model.
struct SatSet {
  std::vector<std::string> variable_order;
  std::set<std::vector<uint32_t>> tuples;

  size_t size() const { return tuples.size(); }
};

}  // namespace tally
