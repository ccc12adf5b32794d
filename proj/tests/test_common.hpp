#pragma once

// Shared planted adversaries for the tests.  They "know" the hidden
// predicate by construction, standing in for circuits whose existence the
// reductions turn into predictors; knowledge is read via peek() so it is
// not charged to the oracle budget.

#include <memory>
#include <unordered_set>
#include <vector>

#include "amp/multi.hpp"
#include "amp/oracle.hpp"
#include "amp/single.hpp"
#include "amp/xorlemma.hpp"

namespace amptest {

using namespace amp;

// Perfect on a fixed half of the domain, a fair coin on the other half.
// Aggregate advantage is exactly 1/2, the hard set is the coin half.
class HalfPlanted : public Distinguisher {
 public:
  HalfPlanted(const PredicateOracle& p, uint64_t salt) : p_(&p) {
    uint64_t dom = p.domain_size();
    marked_.assign(dom, 0);
    Rng r(mix64(salt ^ 0x5ca1ab1eULL));
    for (uint64_t v = 0; v < dom; ++v) marked_[v] = r.bit();
  }

  bool marked(BitVec x) const { return marked_[x.v] != 0; }

 protected:
  int do_eval(BitVec x, int b, Rng& r) const override {
    if (marked_[x.v]) return r.bit();
    return b == p_->peek(x) ? 1 : 0;
  }

 private:
  const PredicateOracle* p_;
  std::vector<uint8_t> marked_;
};

// Pure fair coin: advantage exactly 0.
class CoinOnly : public Distinguisher {
 protected:
  int do_eval(BitVec, int, Rng& r) const override { return r.bit(); }
};

// Perfect everywhere: advantage exactly 1 (saturated advantage table).
class PerfectSingle : public Distinguisher {
 public:
  explicit PerfectSingle(const PredicateOracle& p) : p_(&p) {}

 protected:
  int do_eval(BitVec x, int b, Rng&) const override {
    return b == p_->peek(x) ? 1 : 0;
  }

 private:
  const PredicateOracle* p_;
};

// k-instance circuit that only inspects the first pair; every other slot is
// ignored.  The induced circuit at the empty prefix is a perfect
// single-instance distinguisher, all later slots are coins.
class FirstSlotOnly : public MultiDistinguisher {
 public:
  FirstSlotOnly(const PredicateOracle& p, uint32_t k) : p_(&p), k_(k) {}
  uint32_t k() const override { return k_; }

 protected:
  int do_eval(const std::vector<XPair>& pairs, Rng&) const override {
    return pairs[0].b == p_->peek(pairs[0].x) ? 1 : 0;
  }

 private:
  const PredicateOracle* p_;
  uint32_t k_;
};

}  // namespace amptest
