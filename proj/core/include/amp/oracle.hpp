#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "amp/bitvec.hpp"
#include "amp/seed.hpp"

namespace amp {

// Tabulated boolean predicate on {0,1}^n with a shared call counter so that
// every consumer of the same oracle is charged against one budget.
class PredicateOracle {
 public:
  PredicateOracle(uint32_t n, std::vector<uint8_t> table);

  static PredicateOracle random(uint32_t n, Rng& rng);
  static PredicateOracle parity(uint32_t n);
  static PredicateOracle constant(uint32_t n, int bit);

  int eval(BitVec x) const {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return table_[x.v];
  }

  // Uncounted table lookup, for verification sweeps only.
  int peek(BitVec x) const { return table_[x.v]; }

  uint32_t n() const { return n_; }
  uint64_t domain_size() const { return uint64_t{1} << n_; }
  uint64_t calls() const { return counter_->load(std::memory_order_relaxed); }
  void reset_calls() const { counter_->store(0, std::memory_order_relaxed); }

 private:
  uint32_t n_;
  std::vector<uint8_t> table_;
  std::shared_ptr<std::atomic<uint64_t>> counter_;
};

}  // namespace amp
