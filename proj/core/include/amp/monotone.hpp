#pragma once

#include <cstdint>
#include <vector>

#include "amp/seed.hpp"

namespace amp {

// Boolean function on k <= 20 inputs, stored as a truth table indexed by the
// packed input word (input j -> bit j of the index).  Used as the combiner g
// in puzzle composition; monotonicity is checked on construction when
// require_monotone is set.
class MonotoneFn {
 public:
  MonotoneFn(uint32_t k, std::vector<uint8_t> table, bool require_monotone = true);

  static MonotoneFn and_k(uint32_t k);
  static MonotoneFn or_k(uint32_t k);
  static MonotoneFn threshold(uint32_t k, uint32_t t);  // 1 iff >= t inputs set
  static MonotoneFn constant(uint32_t k, int bit);

  int eval(uint64_t packed) const { return table_[packed]; }
  int eval_bits(const std::vector<uint8_t>& bits) const;

  uint32_t arity() const { return k_; }
  bool is_monotone() const;
  bool is_constant() const;

  // Fix input `pos` (0-based) to `bit`; arity drops by one, remaining inputs
  // keep their relative order.
  MonotoneFn restrict_input(uint32_t pos, int bit) const;

  // Pr[g(u) = 1] when each input is independently Bernoulli(delta), by full
  // enumeration of the table.
  double success_prob_exact(double delta) const;

 private:
  uint32_t k_;
  std::vector<uint8_t> table_;
};

// k independent Bernoulli(delta) bits.
std::vector<uint8_t> bernoulli_vec(double delta, uint32_t k, Rng& rng);

}  // namespace amp
