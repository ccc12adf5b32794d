#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "amp/puzzle.hpp"

using namespace amp;

namespace {
constexpr uint32_t kSpace = 4;
constexpr double kHint = 0.3;
constexpr double kDelta = 0.25;
}  // namespace

TEST_CASE("guessing puzzle poses deterministically and hides the answer") {
  GuessingPuzzle puz(kSpace, kHint);
  Posed a = puz.pose(123), b = puz.pose(123);
  CHECK(a.inst.payload == b.inst.payload);
  // The verifier accepts exactly one answer; bottom always fails.
  int accepted = 0;
  for (Answer y = 0; y < kSpace; ++y) accepted += a.gamma.check(y);
  CHECK(accepted == 1);
  CHECK(a.gamma.check(kBottom) == 0);
  // Payload is either a hint (< space) or the no-hint marker.
  CHECK((a.inst.payload <= kSpace));
}

TEST_CASE("hint frequency and blind-guess success match the design") {
  GuessingPuzzle puz(kSpace, kHint);
  Rng r(17);
  uint64_t hints = 0, blind_hits = 0;
  const uint64_t trials = 40000;
  for (uint64_t t = 0; t < trials; ++t) {
    uint64_t pi = r.u64();
    Posed po = puz.pose(pi);
    hints += static_cast<uint64_t>(po.inst.payload < kSpace);
    blind_hits += static_cast<uint64_t>(po.gamma.check(static_cast<Answer>(r.below(kSpace))));
  }
  CHECK(std::abs(static_cast<double>(hints) / trials - kHint) < 0.01);
  CHECK(std::abs(static_cast<double>(blind_hits) / trials - 1.0 / kSpace) < 0.01);
}

TEST_CASE("combined poser derives independent per-round randomness") {
  GuessingPuzzle puz(kSpace, kHint);
  CombinedPoser comb = combine(puz, MonotoneFn::or_k(3), 3);
  CHECK(comb.round_pi(9, 0) != comb.round_pi(9, 1));
  CHECK(comb.round_pi(9, 0) == comb.round_pi(9, 0));
  CHECK(comb.round_pi(9, 0) != comb.round_pi(10, 0));
}

TEST_CASE("surplus baselines are exact combiner compositions") {
  GuessingPuzzle puz(kSpace, kHint);
  MonotoneFn or3 = MonotoneFn::or_k(3);
  CombinedPoser comb = combine(puz, or3, 3);
  HintPolicySolver c(kSpace, {1.0, 1.0, 1.0});
  auto [s0, s1] = surplus_pair(c, comb, 42, kDelta, 0.05, 1e-2, SeedPath(7));
  // G_1 = "or of the other two rounds given round one succeeded" etc.; the
  // baselines are the exact restricted success probabilities at mu_delta.
  CHECK(s1.baseline == or3.restrict_input(0, 1).success_prob_exact(kDelta));
  CHECK(s0.baseline == or3.restrict_input(0, 0).success_prob_exact(kDelta));
  CHECK(s1.baseline == 1.0);        // OR with one success already in hand
  CHECK(s0.baseline == 0.4375);     // 1 - (3/4)^2
  CHECK(s0.b == 0);
  CHECK(s1.b == 1);
  CHECK(s0.pi_star == 42);
}

TEST_CASE("extracted solver beats the base bound and accounts its recursion") {
  GuessingPuzzle puz(kSpace, kHint);
  MonotoneFn or3 = MonotoneFn::or_k(3);
  // The solver uses hints only in round one: its combined success exceeds the
  // all-blind baseline, and the advantage is concentrated where the surplus
  // search can find it.
  HintPolicySolver c(kSpace, {1.0, 0.0, 0.0});
  const double eps = 0.1;
  const uint32_t n = 10;
  SolverD d = gen_puzzle_solver(c, puz, or3, eps, kDelta, n, 1e-2, SeedPath(900));
  CHECK(!d.degenerate());

  // Recursion accounting: every fixed level multiplies eps by (1 - 1/k) at
  // the then-current arity, so eps_final = eps (k - depth) / k.
  const uint32_t k0 = 3;
  REQUIRE(d.depth() <= k0 - 1);
  double want = eps * static_cast<double>(k0 - d.depth()) / k0;
  CHECK(std::abs(d.eps_final() - want) < 1e-12);
  if (!d.passthrough()) {
    double ratio = 6.0 * (k0 - d.depth()) / d.eps_final();
    CHECK(d.retry_budget() == static_cast<uint64_t>(std::ceil(ratio * std::log(ratio))));
  }

  // Measured single-puzzle success clears delta (the blind rate is 0.25 and
  // hints lift it well above).
  Estimate got = measure_success(d, puz, 0.02, 1e-2, SeedPath(901));
  CHECK(got.value >= kDelta + eps / (6.0 * k0) - got.half_width);
}

TEST_CASE("extracted solver touches the live puzzle exactly once per solve") {
  GuessingPuzzle puz(kSpace, kHint);
  HintPolicySolver c(kSpace, {1.0, 0.0, 0.0});
  SolverD d = gen_puzzle_solver(c, puz, MonotoneFn::or_k(3), 0.1, kDelta, 10, 1e-2, SeedPath(902));
  d.clear_transcripts();
  Rng r(5);
  for (int t = 0; t < 200; ++t) {
    Posed live = puz.pose(r.u64());
    (void)d.solve(live.inst, r);
  }
  NonRewindingReport rep = check_non_rewinding(d);
  CHECK(rep.solves == 200);
  CHECK(rep.violations == 0);
  CHECK(rep.live_calls == rep.solves);  // exactly one live touch per solve
  CHECK(rep.ok);
}

TEST_CASE("constant combiners flag the degenerate branch") {
  GuessingPuzzle puz(kSpace, kHint);
  HintPolicySolver c(kSpace, {1.0, 1.0});
  SolverD d = gen_puzzle_solver(c, puz, MonotoneFn::constant(2, 1), 0.1, kDelta, 10, 1e-2, SeedPath(903));
  CHECK(d.degenerate());
}

TEST_CASE("arity-one combiners pass the solver through") {
  GuessingPuzzle puz(kSpace, kHint);
  HintPolicySolver c(kSpace, {1.0});
  SolverD d = gen_puzzle_solver(c, puz, MonotoneFn::or_k(1), 0.1, kDelta, 10, 1e-2, SeedPath(904));
  CHECK(d.passthrough());
  CHECK(d.retry_budget() == 0);
  CHECK(d.depth() == 0);
}
