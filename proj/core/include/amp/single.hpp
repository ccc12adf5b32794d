#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "amp/bitvec.hpp"
#include "amp/estimate.hpp"
#include "amp/oracle.hpp"
#include "amp/seed.hpp"

namespace amp {

// Distinguisher C(x, b, r): gets an input x, a candidate bit b and private
// randomness r, and outputs a bit that is supposed to correlate with whether
// b equals the hidden predicate value.  Calls are counted; the counter is
// shared across copies so all consumers draw on one budget.
class Distinguisher {
 public:
  Distinguisher() : counter_(std::make_shared<std::atomic<uint64_t>>(0)) {}
  virtual ~Distinguisher() = default;

  int eval(BitVec x, int b, Rng& r) const {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return do_eval(x, b, r);
  }

  uint64_t calls() const { return counter_->load(std::memory_order_relaxed); }
  void reset_calls() const { counter_->store(0, std::memory_order_relaxed); }

 protected:
  virtual int do_eval(BitVec x, int b, Rng& r) const = 0;

 private:
  std::shared_ptr<std::atomic<uint64_t>> counter_;
};

// Wrapper that logs every (x, b) passed to the base distinguisher; used to
// certify that extracted circuits forward their input unchanged.
class CallRecorder : public Distinguisher {
 public:
  explicit CallRecorder(const Distinguisher& base) : base_(base) {}

  std::vector<std::pair<BitVec, int>> log() const {
    std::lock_guard<std::mutex> lk(mu_);
    return log_;
  }
  void clear() {
    std::lock_guard<std::mutex> lk(mu_);
    log_.clear();
  }

 protected:
  int do_eval(BitVec x, int b, Rng& r) const override {
    {
      std::lock_guard<std::mutex> lk(mu_);
      log_.emplace_back(x, b);
    }
    return base_.eval(x, b, r);
  }

 private:
  const Distinguisher& base_;
  mutable std::mutex mu_;
  mutable std::vector<std::pair<BitVec, int>> log_;
};

// C'(x, b, i) = C(x, b, r_i) for m frozen randomness values r_1..r_m derived
// from one seed; r_i is recomputed from (key, i) on demand, never stored.
// m = ceil(100 n / eps^2) when built by the generator.
class FixedRandomnessDistinguisher {
 public:
  FixedRandomnessDistinguisher(const Distinguisher& base, uint32_t m, const SeedPath& seeds)
      : base_(&base), m_(m), key_(seeds.key()) {}

  int eval(BitVec x, int b, uint32_t i) const {  // i in [0, m)
    Rng r(mix64(key_ ^ mix64(i)));
    return base_->eval(x, b, r);
  }

  // (#{i : C'(x,1,i)=1}, #{i : C'(x,0,i)=1}); exactly 2m base calls.
  std::pair<uint32_t, uint32_t> count_pair(BitVec x) const {
    uint32_t c1 = 0, c0 = 0;
    for (uint32_t i = 0; i < m_; ++i) {
      c1 += static_cast<uint32_t>(eval(x, 1, i));
      c0 += static_cast<uint32_t>(eval(x, 0, i));
    }
    return {c1, c0};
  }

  uint32_t m() const { return m_; }
  const Distinguisher& base() const { return *base_; }

 private:
  const Distinguisher* base_;
  uint32_t m_;
  uint64_t key_;
};

// Exact advantage of C' on x as a rational with denominator m:
// Delta_x = Pr_i[C'(x,P(x),i)=1] - Pr_i[C'(x,1-P(x),i)=1].
struct DeltaX {
  int64_t num = 0;
  uint32_t den = 1;
  double value() const { return static_cast<double>(num) / den; }
};

DeltaX delta_x(const FixedRandomnessDistinguisher& cp, const PredicateOracle& p, BitVec x);

// Total preorder on inputs: smaller Delta_x first, ties broken
// lexicographically.  Returns x1 <= x2.
bool order_le(BitVec x1, BitVec x2, const FixedRandomnessDistinguisher& cp, const PredicateOracle& p);

// Per-input frozen counts for the whole domain, shared between the predictor,
// the recognizer and verification.  signed_gap = c1 - c0, negated when the
// generator decided to use the complemented distinguisher; Delta_x of the
// effective distinguisher is (2 P(x) - 1) * signed_gap / m.
struct FrozenTable {
  uint32_t n = 0;
  uint32_t m = 0;
  uint64_t key = 0;
  bool flip = false;
  std::vector<int32_t> signed_gap;  // size 2^n, effective c1 - c0
  std::vector<int32_t> delta_num;   // size 2^n, effective Delta numerator

  int32_t rank_gap(BitVec x) const { return signed_gap[x.v]; }
};

// Membership test for the extracted hard set S* = { x : x <= x* } in the
// generator's Delta-order.  Table-backed: membership consults the frozen
// counts captured during generation and makes no distinguisher calls.
class HardSetRecognizer {
 public:
  HardSetRecognizer() = default;  // full domain

  bool full_domain() const { return full_; }

  int membership(BitVec x) const {
    if (full_) return 1;
    int32_t d = table_->delta_num[x.v];
    if (d != thr_num_) return d < thr_num_ ? 1 : 0;
    return x.v <= x_star_.v ? 1 : 0;
  }

  double density_exact() const;  // |S*| / 2^n by full scan
  BitVec x_star() const { return x_star_; }
  const FrozenTable& table() const { return *table_; }

 private:
  friend struct GenSingle;
  bool full_ = true;
  std::shared_ptr<const FrozenTable> table_;
  BitVec x_star_;
  int32_t thr_num_ = 0;
};

// Predictor Q(x): makes exactly 2m calls to the base distinguisher through
// the frozen wrapper (or none in the fair-coin branch), compares the signed
// gap against the threshold Delta_{x*} and interpolates in between.
class Predictor {
 public:
  int predict(BitVec x, Rng& coin) const;

  // Pr[Q(x) = P(x)] computed from the frozen table, no oracle calls; px is
  // the true predicate value.
  double correct_prob(BitVec x, int px) const;

  bool fair_coin() const { return fair_coin_; }
  uint64_t base_calls_per_prediction() const;
  const FrozenTable* table() const { return table_.get(); }

 private:
  friend struct GenSingle;
  std::shared_ptr<const FixedRandomnessDistinguisher> cp_;
  std::shared_ptr<const FrozenTable> table_;
  int32_t thr_num_ = 1;
  bool fair_coin_ = false;
};

struct GenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenDiagnostics {
  double delta_hat = 0.0;     // initial advantage estimate
  bool fair_coin = false;
  bool flip = false;
  bool strict = false;
  double eps_inner = 0.0;     // eps used for the frozen table (eps/3 if strict)
  uint32_t m = 0;
  uint64_t candidates = 0;    // candidates examined before one satisfied the window
  uint64_t rank = 0;          // |S*| - 1 before strict enlargement
  uint64_t rank_final = 0;    // |S*| - 1 actually used
  double prefix_value = 0.0;  // accepted prefix-sum value (target window [eps/20, eps/10])
  uint64_t table_calls = 0;   // base-distinguisher calls spent building the table
};

struct GenSingleResult {
  Predictor q;
  HardSetRecognizer s;
  double delta = 1.0;
  GenDiagnostics diag;
};

// Extracts (Q, S*, delta) from a distinguisher with advantage >= eps.
// strict_gain runs the construction at eps/3 and enlarges the set, buying the
// stronger prediction bound 1 - delta/2 + eps/4 at the price of a bigger
// frozen sample.  Throws GenError when no candidate satisfies the prefix-sum
// window (diagnostics included) or the domain is too large to tabulate.
GenSingleResult gen_single(const Distinguisher& c, const PredicateOracle& p,
                           double eps, double eta, const SeedPath& seeds,
                           bool strict_gain = false);

struct SingleGuarantees {
  double mu = 0.0;           // exact density of S*
  double delta = 0.0;
  double gap = 0.0;          // exact aggregate distinguishing gap vs P xor S*
  double predict_prob = 0.0; // exact Pr over uniform x of Q(x) = P(x)
  bool mu_ok = false;        // mu >= delta
  bool gap_ok = false;       // gap <= eps
  bool predict_ok = false;   // >= 1 - delta/2 (+ eps/4 when delta < 1 and strict)
};

SingleGuarantees verify_single_guarantees(const GenSingleResult& r, const PredicateOracle& p, double eps);

}  // namespace amp
