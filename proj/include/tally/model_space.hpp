#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "tally/errors.hpp"
#include "tally/kb.hpp"
#include "tally/model.hpp"
#include "tally/numbers.hpp"

namespace tally {

// Hard ceiling on how many interpretations a single run may enumerate or
// count model-by-model. Exceeding it raises GuardExceeded; nothing is ever
// truncated silently.
inline constexpr uint64_t kDefaultGuard = uint64_t{1} << 24;

// All finite interpretations of a signature over domain {0, .., n-1}, in a
// fixed stream order: position i is read off in mixed radix, constants first
// (sorted by name, least significant), then each predicate's relation as a
// block of bits ordered by tuple rank.
class ModelSpace {
 public:
  ModelSpace(std::shared_ptr<const Signature> sig, uint32_t n)
      : sig_(std::move(sig)), n_(n) {
    if (n_ == 0) throw InvalidArgument("domain size must be at least 1");
    if (!sig_->functions().empty()) {
      throw Unsupported("function symbol '" + sig_->functions().front().name +
                        "' cannot be enumerated");
    }
    BigInt bits = 0;
    for (const SymbolInfo& p : sig_->predicates()) {
      BigInt cells = 1;
      for (int a = 0; a < p.arity; ++a) cells *= n_;
      cell_counts_.push_back(cells);
      bits += cells;
    }
    if (bits > (uint64_t{1} << 26)) {
      throw Unsupported("model space too large to size exactly");
    }
    // total = n^#constants * 2^(sum of relation sizes)
    total_ = 1;
    for (size_t c = 0; c < sig_->constants().size(); ++c) total_ *= n_;
    total_ <<= static_cast<uint64_t>(bits);
  }

  const BigInt& total() const { return total_; }
  uint32_t domain_size() const { return n_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }

  FiniteModel make_model() const { return FiniteModel(sig_, n_); }

  // Writes the interpretation at a stream position. Callers check the guard
  // first, so positions always fit in 64 bits here.
  void decode(uint64_t index, FiniteModel& m) const {
    for (size_t c = 0; c < sig_->constants().size(); ++c) {
      m.set_constant(static_cast<int>(c), static_cast<uint32_t>(index % n_));
      index /= n_;
    }
    for (size_t p = 0; p < cell_counts_.size(); ++p) {
      std::vector<uint8_t>& ext = m.extension(static_cast<int>(p));
      for (size_t r = 0; r < ext.size(); ++r) {
        ext[r] = static_cast<uint8_t>(index & 1);
        index >>= 1;
      }
    }
  }

  // Steps to the next stream position; false when the last one was reached.
  bool advance(FiniteModel& m) const {
    for (size_t c = 0; c < sig_->constants().size(); ++c) {
      uint32_t v = m.constant(static_cast<int>(c)) + 1;
      if (v < n_) {
        m.set_constant(static_cast<int>(c), v);
        return true;
      }
      m.set_constant(static_cast<int>(c), 0);
    }
    for (size_t p = 0; p < cell_counts_.size(); ++p) {
      std::vector<uint8_t>& ext = m.extension(static_cast<int>(p));
      for (size_t r = 0; r < ext.size(); ++r) {
        if (ext[r] == 0) {
          ext[r] = 1;
          return true;
        }
        ext[r] = 0;
      }
    }
    return false;
  }

 private:
  std::shared_ptr<const Signature> sig_;
  uint32_t n_;
  std::vector<BigInt> cell_counts_;
  BigInt total_;
};

// Visits every interpretation exactly once in stream order. The visitor
// receives (const FiniteModel&, uint64_t index).
template <typename Visitor>
void enumerate_models(std::shared_ptr<const Signature> sig, uint32_t n,
                      Visitor&& visit, uint64_t guard = kDefaultGuard) {
  ModelSpace space(std::move(sig), n);
  if (space.total() > guard) {
    throw GuardExceeded(to_text(space.total()), guard);
  }
  FiniteModel m = space.make_model();
  space.decode(0, m);
  uint64_t index = 0;
  while (true) {
    visit(static_cast<const FiniteModel&>(m), index);
    if (!space.advance(m)) break;
    ++index;
  }
}

}  // namespace tally
