#include "amp/monotone.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>

namespace amp {

MonotoneFn::MonotoneFn(uint32_t k, std::vector<uint8_t> table, bool require_monotone)
    : k_(k), table_(std::move(table)) {
  if (k < 1 || k > 20) throw std::invalid_argument("MonotoneFn: arity must be in [1,20]");
  if (table_.size() != (uint64_t{1} << k)) throw std::invalid_argument("MonotoneFn: table size != 2^k");
  if (require_monotone && !is_monotone()) throw std::invalid_argument("MonotoneFn: table is not monotone");
}

MonotoneFn MonotoneFn::and_k(uint32_t k) {
  std::vector<uint8_t> t(uint64_t{1} << k, 0);
  t.back() = 1;
  return MonotoneFn(k, std::move(t));
}

MonotoneFn MonotoneFn::or_k(uint32_t k) {
  std::vector<uint8_t> t(uint64_t{1} << k, 1);
  t.front() = 0;
  return MonotoneFn(k, std::move(t));
}

MonotoneFn MonotoneFn::threshold(uint32_t k, uint32_t thr) {
  std::vector<uint8_t> t(uint64_t{1} << k);
  for (uint64_t u = 0; u < t.size(); ++u)
    t[u] = static_cast<uint8_t>(static_cast<uint32_t>(std::popcount(u)) >= thr);
  return MonotoneFn(k, std::move(t));
}

MonotoneFn MonotoneFn::constant(uint32_t k, int bit) {
  std::vector<uint8_t> t(uint64_t{1} << k, static_cast<uint8_t>(bit & 1));
  return MonotoneFn(k, std::move(t));
}

int MonotoneFn::eval_bits(const std::vector<uint8_t>& bits) const {
  assert(bits.size() == k_);
  uint64_t packed = 0;
  for (uint32_t j = 0; j < k_; ++j) packed |= static_cast<uint64_t>(bits[j] & 1) << j;
  return table_[packed];
}

bool MonotoneFn::is_monotone() const {
  for (uint64_t u = 0; u < table_.size(); ++u)
    for (uint32_t j = 0; j < k_; ++j)
      if (!(u & (uint64_t{1} << j)) && table_[u] > table_[u | (uint64_t{1} << j)])
        return false;
  return true;
}

bool MonotoneFn::is_constant() const {
  for (uint8_t v : table_)
    if (v != table_[0]) return false;
  return true;
}

MonotoneFn MonotoneFn::restrict_input(uint32_t pos, int bit) const {
  if (k_ < 2) throw std::invalid_argument("restrict_input: arity would drop below 1");
  assert(pos < k_);
  uint64_t lo_mask = (uint64_t{1} << pos) - 1;
  std::vector<uint8_t> t(uint64_t{1} << (k_ - 1));
  for (uint64_t u = 0; u < t.size(); ++u) {
    uint64_t full = (u & lo_mask) | (static_cast<uint64_t>(bit & 1) << pos) | ((u & ~lo_mask) << 1);
    t[u] = table_[full];
  }
  return MonotoneFn(k_ - 1, std::move(t), /*require_monotone=*/false);
}

double MonotoneFn::success_prob_exact(double delta) const {
  // weight(u) = delta^|u| (1-delta)^(k-|u|); powers precomputed.
  std::vector<double> pd(k_ + 1, 1.0), pq(k_ + 1, 1.0);
  for (uint32_t i = 1; i <= k_; ++i) {
    pd[i] = pd[i - 1] * delta;
    pq[i] = pq[i - 1] * (1.0 - delta);
  }
  double total = 0.0;
  for (uint64_t u = 0; u < table_.size(); ++u) {
    if (!table_[u]) continue;
    uint32_t pop = static_cast<uint32_t>(std::popcount(u));
    total += pd[pop] * pq[k_ - pop];
  }
  return total;
}

std::vector<uint8_t> bernoulli_vec(double delta, uint32_t k, Rng& rng) {
  std::vector<uint8_t> out(k);
  for (auto& b : out) b = rng.bernoulli(delta) ? 1 : 0;
  return out;
}

}  // namespace amp
