#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "amp/estimate.hpp"
#include "amp/monotone.hpp"
#include "amp/seed.hpp"

namespace amp {

using Answer = uint32_t;
inline constexpr Answer kBottom = 0xffffffffu;  // the solver's "give up" value

struct Instance {
  uint64_t payload = 0;
};

// Hidden verifier: solvers never see it; the harness and internally
// simulated posers do.
class Verifier {
 public:
  Verifier() = default;
  explicit Verifier(std::function<int(Answer)> check) : check_(std::move(check)) {}
  int check(Answer y) const { return y == kBottom ? 0 : check_(y); }

 private:
  std::function<int(Answer)> check_;
};

struct Posed {
  Instance inst;
  Verifier gamma;
};

// Non-interactive weakly verifiable puzzle: pose is deterministic in the
// poser randomness pi.
class PuzzlePoser {
 public:
  virtual ~PuzzlePoser() = default;
  virtual Posed pose(uint64_t pi) const = 0;
};

// Toy puzzle: the answer is uniform over answer_space values; with
// probability hint_prob the instance reveals it (payload = answer),
// otherwise payload = answer_space ("no hint").  The honest blind-guess
// success is exactly 1/answer_space.
class GuessingPuzzle : public PuzzlePoser {
 public:
  GuessingPuzzle(uint32_t answer_space, double hint_prob)
      : space_(answer_space), hint_prob_(hint_prob) {}

  Posed pose(uint64_t pi) const override;

  uint32_t answer_space() const { return space_; }
  double hint_prob() const { return hint_prob_; }

 private:
  uint32_t space_;
  double hint_prob_;
};

// Stateful, cloneable solver; round is the 0-based position inside a
// combined interaction.  clone() snapshots the full state — the retry loop
// depends on it.
class PuzzleSolver {
 public:
  virtual ~PuzzleSolver() = default;
  virtual std::unique_ptr<PuzzleSolver> clone() const = 0;
  virtual void reset() {}
  virtual Answer answer(uint32_t round, const Instance& inst, Rng& r) = 0;
};

// Solver for the guessing puzzle that uses a revealed hint with a per-round
// probability and guesses uniformly otherwise.  Stateless, so clone is a
// copy.
class HintPolicySolver : public PuzzleSolver {
 public:
  HintPolicySolver(uint32_t answer_space, std::vector<double> use_hint_prob)
      : space_(answer_space), use_(std::move(use_hint_prob)) {}

  std::unique_ptr<PuzzleSolver> clone() const override {
    return std::make_unique<HintPolicySolver>(*this);
  }

  Answer answer(uint32_t round, const Instance& inst, Rng& r) override {
    double q = round < use_.size() ? use_[round] : 0.0;
    bool has_hint = inst.payload < space_;
    if (has_hint && r.bernoulli(q)) return static_cast<Answer>(inst.payload);
    return static_cast<Answer>(r.below(space_));
  }

 private:
  uint32_t space_;
  std::vector<double> use_;
};

// k copies of the base puzzle; overall success is g applied to the
// per-coordinate verifier outcomes.  Poser randomness pi splits into
// independent per-round values.
class CombinedPoser {
 public:
  CombinedPoser(const PuzzlePoser& base, MonotoneFn g, uint32_t k);

  uint64_t round_pi(uint64_t pi, uint32_t round) const {  // round 0-based
    return mix64(pi ^ mix64(round + 0x51ed270b5fULL));
  }
  Posed pose_round(uint64_t pi, uint32_t round) const {
    return base_->pose(round_pi(pi, round));
  }

  const PuzzlePoser& base() const { return *base_; }
  const MonotoneFn& g() const { return g_; }
  uint32_t k() const { return k_; }

 private:
  const PuzzlePoser* base_;
  MonotoneFn g_;
  uint32_t k_;
};

inline CombinedPoser combine(const PuzzlePoser& base, const MonotoneFn& g, uint32_t k) {
  return CombinedPoser(base, g, k);
}

struct SurplusRecord {
  uint64_t pi_star = 0;
  int b = 0;
  Estimate value;       // conditional success in G_b minus the exact baseline
  double baseline = 0;  // Pr_{u ~ mu_delta^k}[u in G_b], exact
};

// Both surpluses S_{pi*,0} and S_{pi*,1} from one shared trial set; the
// baselines are exact (the trigger decision must not hinge on a sampled
// baseline).  delta is the direct-product hardness parameter.
std::pair<SurplusRecord, SurplusRecord> surplus_pair(
    const PuzzleSolver& c, const CombinedPoser& comb, uint64_t pi_star,
    double delta, double eps, double eta, const SeedPath& seeds);

SurplusRecord surplus(const PuzzleSolver& c, const CombinedPoser& comb,
                      uint64_t pi_star, int b, double delta, double eps,
                      double eta, const SeedPath& seeds);

struct TranscriptEvent {
  enum Kind : uint8_t { kLive = 0, kSimulated = 1 };
  Kind kind;
  uint32_t slot;  // C-side round index, 0-based
  uint64_t pi;    // 0 for the live instance (its randomness is hidden)
};

// The extracted solver: simulates the recursion-fixed rounds, interacts with
// the live puzzle exactly once, then (in the retry branch) re-runs the
// simulated tail from a state snapshot until the simulated outcome vector
// certifies the live answer, or the budget runs out.
class SolverD {
 public:
  Answer solve(const Instance& live, Rng& r);

  bool passthrough() const { return passthrough_; }
  bool degenerate() const { return degenerate_; }  // precondition (A) failed
  uint32_t depth() const { return static_cast<uint32_t>(fixed_prefix_.size()); }
  double eps_final() const { return eps_; }
  uint64_t retry_budget() const { return retry_budget_; }
  uint64_t last_retries() const { return last_retries_; }
  const std::vector<std::pair<uint64_t, int>>& fixed_prefix() const { return fixed_prefix_; }
  const std::vector<std::vector<TranscriptEvent>>& transcripts() const { return transcripts_; }
  void clear_transcripts() { transcripts_.clear(); }

 private:
  friend SolverD gen_puzzle_solver(const PuzzleSolver&, const PuzzlePoser&,
                                   const MonotoneFn&, double, double, uint32_t,
                                   double, const SeedPath&);
  const PuzzlePoser* base_ = nullptr;
  const PuzzleSolver* c_proto_ = nullptr;
  MonotoneFn g_ = MonotoneFn::constant(1, 1);
  std::vector<std::pair<uint64_t, int>> fixed_prefix_;  // (pi*, forced bit)
  double eps_ = 0, delta_ = 0;
  uint64_t retry_budget_ = 0;
  bool passthrough_ = false;
  bool degenerate_ = false;
  uint64_t last_retries_ = 0;
  std::vector<std::vector<TranscriptEvent>> transcripts_;
};

// Surplus-search generator: k = g.arity(); either finds a first-round randomness
// carrying surplus >= (1 - 3/4k) eps and recurses on the restricted
// combiner with (1 - 1/k) eps, or emits the retry solver with budget
// (6k/eps) log(6k/eps).  Candidate count per level is (6k/eps) log(n).
SolverD gen_puzzle_solver(const PuzzleSolver& c, const PuzzlePoser& base,
                          const MonotoneFn& g, double eps, double delta,
                          uint32_t n, double eta, const SeedPath& seeds);

// Success of a plain solver against the combined puzzle.
Estimate measure_success(const PuzzleSolver& proto, const CombinedPoser& comb,
                         double eps, double eta, const SeedPath& seeds);

// Success of the extracted solver against a single base puzzle.
Estimate measure_success(SolverD& d, const PuzzlePoser& base, double eps,
                         double eta, const SeedPath& seeds);

struct NonRewindingReport {
  uint64_t solves = 0;
  uint64_t live_calls = 0;
  uint64_t simulated_calls = 0;
  uint64_t violations = 0;  // extra live touches, slot drift, prefix drift
  bool ok = false;
};

NonRewindingReport check_non_rewinding(const std::vector<std::vector<TranscriptEvent>>& transcripts,
                                       uint32_t expected_slot,
                                       const std::vector<uint64_t>& expected_prefix);
NonRewindingReport check_non_rewinding(const SolverD& d);

}  // namespace amp
