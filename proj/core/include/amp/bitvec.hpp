#pragma once

#include <cassert>
#include <cstdint>
#include <string>

#include "amp/seed.hpp"

namespace amp {

// Fixed-length bit string, n <= 32.  Stored as the integer whose binary
// expansion (MSB first) is the string, so integer order == lexicographic
// order on strings of equal length.
struct BitVec {
  uint32_t n = 0;
  uint64_t v = 0;

  BitVec() = default;
  BitVec(uint32_t n_, uint64_t v_) : n(n_), v(v_) { assert(n <= 32 && v < (uint64_t{1} << n)); }

  static BitVec random(uint32_t n, Rng& rng) { return BitVec(n, rng.below(uint64_t{1} << n)); }

  int bit(uint32_t i) const {  // i = 0 is the leftmost position
    assert(i < n);
    return static_cast<int>((v >> (n - 1 - i)) & 1);
  }

  bool operator==(const BitVec& o) const { return n == o.n && v == o.v; }
  bool lex_lt(const BitVec& o) const { assert(n == o.n); return v < o.v; }

  std::string str() const {
    std::string s(n, '0');
    for (uint32_t i = 0; i < n; ++i) s[i] = bit(i) ? '1' : '0';
    return s;
  }
};

}  // namespace amp
