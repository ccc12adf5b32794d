#include "amp/oracle.hpp"

#include <bit>
#include <stdexcept>

namespace amp {

PredicateOracle::PredicateOracle(uint32_t n, std::vector<uint8_t> table)
    : n_(n), table_(std::move(table)),
      counter_(std::make_shared<std::atomic<uint64_t>>(0)) {
  if (n < 1 || n > 20) throw std::invalid_argument("PredicateOracle: n must be in [1,20]");
  if (table_.size() != (uint64_t{1} << n)) throw std::invalid_argument("PredicateOracle: table size != 2^n");
}

PredicateOracle PredicateOracle::random(uint32_t n, Rng& rng) {
  std::vector<uint8_t> t(uint64_t{1} << n);
  for (auto& b : t) b = static_cast<uint8_t>(rng.bit());
  return PredicateOracle(n, std::move(t));
}

PredicateOracle PredicateOracle::parity(uint32_t n) {
  std::vector<uint8_t> t(uint64_t{1} << n);
  for (uint64_t x = 0; x < t.size(); ++x) t[x] = static_cast<uint8_t>(std::popcount(x) & 1);
  return PredicateOracle(n, std::move(t));
}

PredicateOracle PredicateOracle::constant(uint32_t n, int bit) {
  std::vector<uint8_t> t(uint64_t{1} << n, static_cast<uint8_t>(bit & 1));
  return PredicateOracle(n, std::move(t));
}

}  // namespace amp
