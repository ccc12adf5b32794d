#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "amp/multi.hpp"
#include "test_common.hpp"

using namespace amp;
using namespace amptest;

namespace {
constexpr uint32_t kN = 8;
constexpr uint32_t kK = 3;
constexpr double kEps = 0.8;
constexpr double kEta = 1e-2;

PredicateOracle make_p(uint64_t seed) {
  Rng r(seed);
  return PredicateOracle::random(kN, r);
}
}  // namespace

TEST_CASE("prefix digests separate prefixes and ignore nothing") {
  Prefix a = {{BitVec(kN, 3), 1}};
  Prefix b = {{BitVec(kN, 3), 0}};
  Prefix c = {{BitVec(kN, 4), 1}};
  CHECK(prefix_digest(a) != prefix_digest(b));
  CHECK(prefix_digest(a) != prefix_digest(c));
  CHECK(prefix_digest(a) == prefix_digest({{BitVec(kN, 3), 1}}));
  CHECK(prefix_digest({}) != prefix_digest(a));
}

TEST_CASE("induced circuit fixes the prefix and forwards the live input") {
  PredicateOracle p = make_p(30);
  FirstSlotOnly ck(p, kK);
  MultiCallRecorder rec(ck);
  Prefix t = {{BitVec(kN, 5), 1}};
  InducedSingle ind(rec, t, p);
  CHECK(ind.slot() == 2);
  Rng r(7);
  ind.eval(BitVec(kN, 9), 1, r);
  auto log = rec.log();
  REQUIRE(log.size() == 1);
  REQUIRE(log[0].size() == kK);
  CHECK(log[0][0] == XPair{BitVec(kN, 5), 1});  // prefix unchanged
  CHECK(log[0][1].x == BitVec(kN, 9));          // live input forwarded at the slot
  CHECK(log[0][1].b == 1);
}

TEST_CASE("recorder toggle drops generation traffic") {
  PredicateOracle p = make_p(31);
  FirstSlotOnly ck(p, kK);
  MultiCallRecorder rec(ck);
  Rng r(8);
  std::vector<XPair> pairs = {{BitVec(kN, 1), 0}, {BitVec(kN, 2), 1}, {BitVec(kN, 3), 0}};
  rec.disable();
  rec.eval(pairs, r);
  CHECK(rec.log().empty());
  rec.enable();
  rec.eval(pairs, r);
  CHECK(rec.log().size() == 1);
}

TEST_CASE("matched seeds give matched hybrid traces and the telescoping identity") {
  PredicateOracle p = make_p(32);
  FirstSlotOnly ck(p, kK);
  SeedPath seeds(200);
  PrefixSetGenerator gs(ck, p, kEps, kEta, seeds.child(0));

  // Same j, same seed: identical outcome objects.
  ExperimentOutcome a = hybrid(1, ck, &gs, p, seeds.child(1));
  ExperimentOutcome b = hybrid(1, ck, &gs, p, seeds.child(1));
  CHECK(a.output == b.output);
  CHECK(a.pairs.size() == b.pairs.size());
  for (size_t i = 0; i < a.pairs.size(); ++i) CHECK(a.pairs[i] == b.pairs[i]);

  // Telescoping: sum of adjacent hybrid differences equals H_0 - H_k, on
  // matched per-trial seeds, exactly.
  const uint64_t trials = 400;
  std::vector<double> h(kK + 1, 0.0);
  for (uint32_t j = 0; j <= kK; ++j) {
    uint64_t hits = 0;
    for (uint64_t t = 0; t < trials; ++t)
      hits += static_cast<uint64_t>(hybrid(j, ck, j ? &gs : nullptr, p, seeds.child(2).child(t)).output);
    h[j] = static_cast<double>(hits) / static_cast<double>(trials);
  }
  double tele = 0.0;
  for (uint32_t j = 0; j < kK; ++j) tele += h[j] - h[j + 1];
  CHECK(std::abs(tele - (h[0] - h[kK])) < 1e-12);
}

TEST_CASE("experiment two randomizes exactly the rounds that land in their hard set") {
  PredicateOracle p = make_p(33);
  FirstSlotOnly ck(p, kK);
  SeedPath seeds(201);
  PrefixSetGenerator gs(ck, p, kEps, kEta, seeds.child(0));
  for (uint64_t t = 0; t < 50; ++t) {
    ExperimentOutcome out = experiment2(ck, gs, p, seeds.child(1).child(t));
    REQUIRE(out.pairs.size() == kK);
    REQUIRE(out.randomized_rounds.size() == kK);
    for (uint32_t i = 0; i < kK; ++i) {
      Prefix t_i(out.pairs.begin(), out.pairs.begin() + i);
      const HardSetRecognizer& s = gs.gen_s(t_i);
      CHECK(static_cast<int>(out.randomized_rounds[i]) == s.membership(out.pairs[i].x));
      if (!out.randomized_rounds[i]) CHECK(out.pairs[i].b == p.peek(out.pairs[i].x));
    }
  }
}

TEST_CASE("prefix set generation is memoized by digest") {
  PredicateOracle p = make_p(34);
  FirstSlotOnly ck(p, kK);
  PrefixSetGenerator gs(ck, p, kEps, kEta, SeedPath(202));
  Prefix t = {{BitVec(kN, 12), 1}};
  auto e1 = gs.gen(t);
  uint64_t misses = gs.cache_misses();
  auto e2 = gs.gen(t);
  CHECK(e1.get() == e2.get());
  CHECK(gs.cache_misses() == misses);
  gs.gen({{BitVec(kN, 13), 1}});
  CHECK(gs.cache_misses() == misses + 1);
}

TEST_CASE("gen_multi extracts a certified single-instance predictor") {
  PredicateOracle p = make_p(35);
  FirstSlotOnly ck(p, kK);
  MultiCallRecorder rec(ck);
  SeedPath seeds(203);
  rec.disable();  // generation traffic is too large to retain
  GenMultiResult g = gen_multi(rec, p, kEps, kEta, seeds);
  rec.enable();

  CHECK(g.slot >= 1);
  CHECK(g.slot <= kK);
  CHECK(g.prefix.size() + 1 == g.slot);
  CHECK(g.delta < 1.0);  // the first-slot leak is a strong induced distinguisher

  // Exhaustive success of the extracted predictor: >= 1 - delta/2.
  uint64_t dom = p.domain_size();
  double acc = 0.0;
  for (uint64_t v = 0; v < dom; ++v) acc += g.q.correct_prob(BitVec(kN, v), p.peek(BitVec(kN, v)));
  acc /= static_cast<double>(dom);
  CHECK(acc >= 1.0 - g.delta / 2.0 - 1e-12);

  // Non-rewinding certificate on live predictions: fixed prefix, fixed slot,
  // live input forwarded unchanged.
  rec.clear();
  Rng coin(9);
  BitVec x(kN, 77);
  g.q.predict(x, coin);
  for (const auto& tuple : rec.log()) {
    REQUIRE(tuple.size() == kK);
    for (size_t i = 0; i < g.prefix.size(); ++i) CHECK(tuple[i] == g.prefix[i]);
    CHECK(tuple[g.slot - 1].x == x);
  }
  CHECK(!rec.log().empty());
}

TEST_CASE("xor wrapper scores a guess against the xor of the candidate bits") {
  PredicateOracle p = make_p(36);
  BackdoorXorAdversary adv(p, kK);
  XorWrap wrap(adv);
  Rng r(1);
  std::vector<XPair> pairs;
  int bxor = 0, pxor = 0;
  Rng pick(2);
  for (uint32_t i = 0; i < kK; ++i) {
    BitVec x = BitVec::random(kN, pick);
    int b = pick.bit();
    pairs.push_back({x, b});
    bxor ^= b;
    pxor ^= p.peek(x);
  }
  CHECK(wrap.eval(pairs, r) == (pxor == bxor ? 1 : 0));
}

TEST_CASE("per-round side channel attacker sits at its closed-form success") {
  PredicateOracle p = make_p(37);
  const double dp = 0.4;
  for (uint32_t k : {1u, 2u, 3u}) {
    NoisySideChannelAdversary adv(p, k, dp);
    SeedPath seeds = SeedPath(300).child(k);
    auto trial = [&](Rng& r) {
      std::vector<BitVec> xs;
      int truth = 0;
      for (uint32_t i = 0; i < k; ++i) {
        xs.push_back(BitVec::random(kN, r));
        truth ^= p.peek(xs.back());
      }
      return adv.guess(xs, r) == truth;
    };
    Estimate e = estimate_probability(trial, 0.01, 1e-3, seeds);
    double want = (1.0 + std::pow(1.0 - dp, k)) / 2.0;
    CHECK(std::abs(e.value - want) <= 2 * e.half_width);
  }
}

TEST_CASE("bound-respecting xor adversaries do not trigger extraction") {
  PredicateOracle p = make_p(38);
  const double dp = 0.4, ep = 0.2;
  NoisySideChannelAdversary adv(p, kK, dp);
  XorBoundReport rep = xor_bound_check(adv, p, dp, ep, 0.02, 1e-2, SeedPath(301));
  CHECK(std::abs(rep.bound - (0.5 + std::pow(1.0 - dp, kK) + ep)) < 1e-12);
  CHECK(rep.respected);
  CHECK(!rep.extraction_run);
}
