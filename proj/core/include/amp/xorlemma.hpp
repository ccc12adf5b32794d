#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "amp/estimate.hpp"
#include "amp/multi.hpp"
#include "amp/oracle.hpp"

namespace amp {

// Adversary against the XOR of predicate values: sees the k inputs (and its
// own randomness) and guesses P(x_1) ^ ... ^ P(x_k).  Counted.
class XorAdversary {
 public:
  XorAdversary() : counter_(std::make_shared<std::atomic<uint64_t>>(0)) {}
  virtual ~XorAdversary() = default;

  int guess(const std::vector<BitVec>& xs, Rng& r) const {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return do_guess(xs, r);
  }
  virtual uint32_t k() const = 0;
  uint64_t calls() const { return counter_->load(std::memory_order_relaxed); }

 protected:
  virtual int do_guess(const std::vector<BitVec>& xs, Rng& r) const = 0;

 private:
  std::shared_ptr<std::atomic<uint64_t>> counter_;
};

// Per-coordinate attacker of the planted delta'-bounded regime: each round
// it gets a side-channel bit equal to P(x_i) with probability 1 - delta'/2
// and outputs the XOR of those bits — the best strategy that treats rounds
// independently, with success exactly (1 + (1-delta')^k) / 2.
class NoisySideChannelAdversary : public XorAdversary {
 public:
  NoisySideChannelAdversary(const PredicateOracle& p, uint32_t k, double delta_prime)
      : p_(&p), k_(k), flip_prob_(delta_prime / 2.0) {}

  uint32_t k() const override { return k_; }

 protected:
  int do_guess(const std::vector<BitVec>& xs, Rng& r) const override {
    int acc = 0;
    for (const BitVec& x : xs) {
      // The planted attacker owns the predicate table; its internal reads
      // are not oracle queries and stay off the shared budget.
      int side = p_->peek(x) ^ (r.bernoulli(flip_prob_) ? 1 : 0);
      acc ^= side;
    }
    return acc;
  }

 private:
  const PredicateOracle* p_;
  uint32_t k_;
  double flip_prob_;
};

// Cheat: reads the predicate exactly (a planted backdoor standing in for a
// circuit that is "too good to exist" if P were hard).
class BackdoorXorAdversary : public XorAdversary {
 public:
  BackdoorXorAdversary(const PredicateOracle& p, uint32_t k) : p_(&p), k_(k) {}
  uint32_t k() const override { return k_; }

 protected:
  int do_guess(const std::vector<BitVec>& xs, Rng&) const override {
    int acc = 0;
    for (const BitVec& x : xs) acc ^= p_->peek(x);  // planted, uncounted
    return acc;
  }

 private:
  const PredicateOracle* p_;
  uint32_t k_;
};

// Wrapper turning an XOR adversary into a k-instance distinguisher that
// outputs 1 exactly when the guess matches b_1 ^ ... ^ b_k.
class XorWrap : public MultiDistinguisher {
 public:
  explicit XorWrap(const XorAdversary& adv) : adv_(&adv) {}
  uint32_t k() const override { return adv_->k(); }

 protected:
  int do_eval(const std::vector<XPair>& pairs, Rng& r) const override {
    thread_local std::vector<BitVec> xs;  // hot path, never re-entered
    xs.clear();
    xs.reserve(pairs.size());
    int bxor = 0;
    for (const XPair& p : pairs) {
      xs.push_back(p.x);
      bxor ^= p.b;
    }
    return adv_->guess(xs, r) == bxor ? 1 : 0;
  }

 private:
  const XorAdversary* adv_;
};

struct XorBoundReport {
  Estimate success;       // measured Pr[guess = P(x_1) ^ ... ^ P(x_k)]
  double bound = 0.0;     // 1/2 + (1-delta')^k + eps' (k=1: 1 - delta'/2 + eps')
  bool respected = false;
  // Filled when the bound was violated: the extraction path's witness.
  bool extraction_run = false;
  double extracted_predict_prob = 0.0;  // exhaustive Pr[Q = P]
  double extracted_delta = 1.0;
  bool extraction_ok = false;           // predict_prob >= 1 - delta'/2
};

// Measures the adversary against the XOR bound; on violation, wraps it into
// a k-instance distinguisher, extracts a predictor and verifies its success
// exhaustively — the constructive reading of the contradiction.
XorBoundReport xor_bound_check(const XorAdversary& adv, const PredicateOracle& p,
                               double delta_prime, double eps_prime,
                               double measure_eps, double eta, const SeedPath& seeds,
                               double gen_eps = 0.0);

}  // namespace amp
