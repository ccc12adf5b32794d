#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "amp/single.hpp"

namespace amp {

struct XPair {
  BitVec x;
  int b = 0;
  bool operator==(const XPair& o) const { return x == o.x && b == o.b; }
};

using Prefix = std::vector<XPair>;  // pairs for rounds 1..i-1; live round is size()+1

uint64_t prefix_digest(const Prefix& t);

// k-instance distinguisher C(x_1,b_1,...,x_k,b_k,r); counted like the
// single-instance one.
class MultiDistinguisher {
 public:
  MultiDistinguisher() : counter_(std::make_shared<std::atomic<uint64_t>>(0)) {}
  virtual ~MultiDistinguisher() = default;

  int eval(const std::vector<XPair>& pairs, Rng& r) const {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return do_eval(pairs, r);
  }

  virtual uint32_t k() const = 0;
  uint64_t calls() const { return counter_->load(std::memory_order_relaxed); }
  void reset_calls() const { counter_->store(0, std::memory_order_relaxed); }

 protected:
  virtual int do_eval(const std::vector<XPair>& pairs, Rng& r) const = 0;

 private:
  std::shared_ptr<std::atomic<uint64_t>> counter_;
};

// Logs every tuple passed to the base; used for the non-rewinding
// certificate (fixed prefix, fixed slot, live input forwarded unchanged).
// Recording is switchable: generation makes ~100n/eps^2 calls per tabulated
// input, far too many to retain, so callers record only the certified
// prediction phase.
class MultiCallRecorder : public MultiDistinguisher {
 public:
  explicit MultiCallRecorder(const MultiDistinguisher& base) : base_(base) {}

  uint32_t k() const override { return base_.k(); }
  void enable() const { recording_.store(true, std::memory_order_relaxed); }
  void disable() const { recording_.store(false, std::memory_order_relaxed); }
  std::vector<std::vector<XPair>> log() const {
    std::lock_guard<std::mutex> lk(mu_);
    return log_;
  }
  void clear() {
    std::lock_guard<std::mutex> lk(mu_);
    log_.clear();
  }

 protected:
  int do_eval(const std::vector<XPair>& pairs, Rng& r) const override {
    if (recording_.load(std::memory_order_relaxed)) {
      std::lock_guard<std::mutex> lk(mu_);
      log_.push_back(pairs);
    }
    return base_.eval(pairs, r);
  }

 private:
  const MultiDistinguisher& base_;
  mutable std::atomic<bool> recording_{true};
  mutable std::mutex mu_;
  mutable std::vector<std::vector<XPair>> log_;
};

// Single-instance circuit induced by fixing a prefix: its own randomness
// draws the suffix pairs (x_j, P(x_j)) for j > i, so freezing r freezes the
// suffix too.  P-oracle calls for the suffix are charged to p's counter.
class InducedSingle : public Distinguisher {
 public:
  InducedSingle(const MultiDistinguisher& ck, Prefix t, const PredicateOracle& p)
      : ck_(&ck), t_(std::move(t)), p_(&p) {}

  uint32_t slot() const { return static_cast<uint32_t>(t_.size()) + 1; }
  const Prefix& prefix() const { return t_; }

 protected:
  int do_eval(BitVec x, int b, Rng& r) const override {
    // Hot path of every frozen-table build; the buffer is reused because a
    // base-circuit call never re-enters another induced circuit.
    thread_local std::vector<XPair> pairs;
    pairs.clear();
    pairs.reserve(ck_->k());
    pairs.insert(pairs.end(), t_.begin(), t_.end());
    pairs.push_back({x, b});
    for (uint32_t j = slot() + 1; j <= ck_->k(); ++j) {
      BitVec xj = BitVec::random(p_->n(), r);
      pairs.push_back({xj, p_->eval(xj)});
    }
    return ck_->eval(pairs, r);
  }

 private:
  const MultiDistinguisher* ck_;
  Prefix t_;
  const PredicateOracle* p_;
};

// Per-prefix set generation at accuracy eps/4k, memoized by prefix digest;
// the same prefix always yields the same recognizer within a campaign, which
// is what makes the hybrid identities testable.
class PrefixSetGenerator {
 public:
  PrefixSetGenerator(const MultiDistinguisher& ck, const PredicateOracle& p,
                     double eps, double eta, const SeedPath& seeds)
      : ck_(&ck), p_(&p), eps_(eps), eta_(eta), seeds_(seeds) {}

  struct Entry {
    std::shared_ptr<InducedSingle> circuit;
    GenSingleResult gen;
  };

  std::shared_ptr<const Entry> gen(const Prefix& t);

  const HardSetRecognizer& gen_s(const Prefix& t) { return gen(t)->gen.s; }

  double eps() const { return eps_; }
  uint32_t k() const { return ck_->k(); }
  uint64_t cache_misses() const { return misses_; }

 private:
  const MultiDistinguisher* ck_;
  const PredicateOracle* p_;
  double eps_, eta_;
  SeedPath seeds_;
  std::mutex mu_;
  std::unordered_map<uint64_t, std::shared_ptr<const Entry>> cache_;
  uint64_t misses_ = 0;
};

struct ExperimentOutcome {
  int output = 0;
  std::vector<double> set_densities;     // exact, one per inspected round
  std::vector<uint8_t> randomized_rounds;  // 1 where b_i was a coin
  std::vector<XPair> pairs;
};

// Hybrid family H_j: rounds i <= j use the per-prefix hard set (coin inside,
// P(x_i) outside); rounds i > j always use b_i = P(x_i).  H_0 is Experiment 1
// and H_k is Experiment 2; per-round seed children are fixed, so matched
// seeds give matched traces.  gs may be null when j = 0.
ExperimentOutcome hybrid(uint32_t j, const MultiDistinguisher& ck,
                         PrefixSetGenerator* gs, const PredicateOracle& p,
                         const SeedPath& seeds);

inline ExperimentOutcome experiment1(const MultiDistinguisher& ck, const PredicateOracle& p,
                                     const SeedPath& seeds) {
  return hybrid(0, ck, nullptr, p, seeds);
}
inline ExperimentOutcome experiment2(const MultiDistinguisher& ck, PrefixSetGenerator& gs,
                                     const PredicateOracle& p, const SeedPath& seeds) {
  return hybrid(gs.k(), ck, &gs, p, seeds);
}

struct GenMultiResult {
  Predictor q;
  std::shared_ptr<const PrefixSetGenerator::Entry> entry;  // keeps the circuit alive
  Prefix prefix;
  uint32_t slot = 1;   // live round, 1-based
  double delta = 1.0;
  uint32_t iterations = 0;
  uint32_t best_iteration = 0;
  GenDiagnostics diag;
};

// Global search: ell = ceil(nk/eps) iterations, each simulating Experiment 2
// up to a random round and extracting a single-instance predictor at eps/4k;
// returns the smallest-delta pair (earliest iteration wins ties).
// strict_final re-runs the winning prefix with the strict-gain construction,
// buying the 1 - delta/2 + eps/16k prediction bound.
GenMultiResult gen_multi(const MultiDistinguisher& ck, const PredicateOracle& p,
                         double eps, double eta, const SeedPath& seeds,
                         PrefixSetGenerator* gs = nullptr, bool strict_final = false);

}  // namespace amp
