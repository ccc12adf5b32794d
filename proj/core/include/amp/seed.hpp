#pragma once

#include <cstdint>
#include <vector>

namespace amp {

// splitmix64 finalizer; decent avalanche, cheap.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream keyed by a 64-bit value.  Output i depends only on
// (key, i), so two Rng objects with the same key produce identical streams
// regardless of how calls interleave elsewhere.
class Rng {
 public:
  explicit Rng(uint64_t key) : key_(key) {}

  uint64_t u64() { return mix64(key_ ^ mix64(ctr_++)); }

  int bit() { return static_cast<int>(u64() >> 63); }

  // uniform in [0,1), 53 bits of precision
  double real() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return real() < p; }

  // uniform in [0, n); rejection-free modulo is fine at our scales but we
  // use rejection to keep draws exactly uniform.
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t lim = ~uint64_t{0} - (~uint64_t{0} % n);
    uint64_t v;
    do {
      v = u64();
    } while (v >= lim);
    return v % n;
  }

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
  uint64_t ctr_ = 0;
};

// Hierarchical deterministic seed: a root plus a path of child indices.
// child(i) derives an independent subtree; stream() opens a counter stream
// at the current node.  Derivation is pure hashing, so any node's stream is
// reproducible from (root, path) alone, independent of evaluation order.
class SeedPath {
 public:
  explicit SeedPath(uint64_t root) : key_(mix64(root ^ 0xa0761d6478bd642fULL)) {
    path_.reserve(4);
  }

  SeedPath child(uint64_t idx) const {
    SeedPath c(*this);
    c.key_ = mix64(key_ ^ mix64(idx + 0x2545f4914f6cdd1dULL));
    c.path_.push_back(idx);
    return c;
  }

  Rng stream() const { return Rng(key_); }

  uint64_t key() const { return key_; }
  const std::vector<uint64_t>& path() const { return path_; }

 private:
  uint64_t key_;
  std::vector<uint64_t> path_;
};

}  // namespace amp
