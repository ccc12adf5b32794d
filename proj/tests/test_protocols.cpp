#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "amp/amplifier.hpp"
#include "amp/protocol.hpp"
#include "test_common.hpp"

using namespace amp;

TEST_CASE("hiding source identities hold exactly for both channel families") {
  for (double beta : {0.2, 0.5, 0.8}) {
    for (HidingSource src : {HidingSource::binary_noise(beta), HidingSource::erasure(beta)}) {
      CHECK(std::abs(src.max_guess() - (1.0 - beta / 2.0)) < 1e-12);
      CHECK(std::abs(src.hiding_delta() - beta) < 1e-12);
      // Pr[H=1] equals the hiding parameter, and the channel carries no
      // information conditioned on H=1.
      CHECK(std::abs(src.h_prob() - src.hiding_delta()) < 1e-12);
      CHECK(src.guess_given_h1() == 0.5);
    }
  }
}

TEST_CASE("hiding source sampling matches the tabulated joint law") {
  HidingSource src = HidingSource::erasure(0.4);
  Rng r(3);
  const uint64_t trials = 60000;
  std::vector<uint64_t> hits(2 * src.z_size(), 0);
  for (uint64_t t = 0; t < trials; ++t) {
    auto [x, z] = src.sample(r);
    ++hits[static_cast<size_t>(x) * src.z_size() + z];
  }
  for (int x = 0; x < 2; ++x)
    for (uint32_t z = 0; z < src.z_size(); ++z) {
      double got = static_cast<double>(hits[static_cast<size_t>(x) * src.z_size() + z]) / trials;
      CHECK(std::abs(got - src.joint(x, z)) < 0.01);
    }
}

TEST_CASE("reference decoder inverts the extraction protocol on every trial") {
  ReadOnceFormula g = schedule_formula("OAVOA");
  Rng pick(8);
  for (int t = 0; t < 2000; ++t) {
    std::vector<uint8_t> c(g.leaf_count());
    for (auto& b : c) b = static_cast<uint8_t>(pick.bit());
    int b = pick.bit();
    auto [wires, tr] = run_extraction_protocol(g, c, b, SeedPath(1000).child(t));
    (void)wires;
    CHECK(decode_extraction(g, c, tr) == b);
  }
}

TEST_CASE("decoder rejects tampered transcripts") {
  ReadOnceFormula g = schedule_formula("OA");
  std::vector<uint8_t> c(g.leaf_count(), 1);
  auto [wires, tr] = run_extraction_protocol(g, c, 1, SeedPath(77));
  (void)wires;
  REQUIRE(!tr.masks.empty());
  ExtractionTranscript bad = tr;
  bad.masks[0].m1 ^= 1;  // break the published mask pair
  CHECK(decode_extraction(g, c, bad) == -1);
}

TEST_CASE("composed hiding stays under the exact formula bound") {
  ReadOnceFormula g = schedule_formula("OAV");
  HidingSource src = HidingSource::binary_noise(0.5);
  HidingReport rep = hiding_experiment(g, src, 4000, 1e-2, SeedPath(500));
  CHECK(std::abs(rep.p_h1 - 0.5) < 1e-12);
  CHECK(std::abs(rep.p_g_h - g.accept_prob(0.5)) < 1e-12);
  CHECK(std::abs(rep.bound - (1.0 - rep.p_g_h / 2.0)) < 1e-12);
  CHECK(rep.ok);  // posterior decoder stays within the bound + slack
  CHECK(rep.measured.value <= rep.bound + rep.measured.half_width);
}

TEST_CASE("composed binding matches the exact composition") {
  ReadOnceFormula g = schedule_formula("AO");
  BindingReport rep = binding_experiment(g, 0.3, 200000, SeedPath(501));
  CHECK(std::abs(rep.exact_bound - g.accept_prob(0.3)) < 1e-12);
  CHECK(rep.trials == 200000);
  CHECK(rep.ok);
  double rate = static_cast<double>(rep.successes) / static_cast<double>(rep.trials);
  CHECK(std::abs(rate - rep.exact_bound) < 0.01);
}

TEST_CASE("weak commitment honest use verifies; cheats succeed at the stated rates") {
  WeakCommitment weak(0.3, 0.5);
  Rng r(9);
  uint64_t guess_hits = 0, open_hits = 0;
  const uint64_t trials = 50000;
  for (uint64_t t = 0; t < trials; ++t) {
    int b = r.bit();
    auto c = weak.commit(b, r);
    CHECK(weak.check(b, c) == 1);
    guess_hits += static_cast<uint64_t>(weak.cheat_guess(c, r) == b);
    open_hits += static_cast<uint64_t>(weak.cheat_open(r));
  }
  CHECK(std::abs(static_cast<double>(guess_hits) / trials - 0.75) < 0.01);  // 1 - beta/2
  CHECK(std::abs(static_cast<double>(open_hits) / trials - 0.3) < 0.01);    // alpha
}

TEST_CASE("composed commitment round trips and rejects tampering") {
  WeakCommitment weak(0.3, 0.5);
  ReadOnceFormula g = schedule_formula("OA");
  ComposedCommitment comp(weak, g);
  for (int b : {0, 1}) {
    ComposedCommitment::Session s = comp.commit(b, SeedPath(600).child(static_cast<uint64_t>(b)));
    CHECK(s.b == b);
    CHECK(comp.check_open(s) == 1);
    ComposedCommitment::Session bad = s;
    bad.c[0] ^= 1;  // opening must be consistent with the transcript
    CHECK(comp.check_open(bad) == 0);
  }
}

TEST_CASE("information-bound receiver respects the composed bound") {
  Rng r(44);
  PredicateOracle p = PredicateOracle::random(8, r);
  ReductionReport rep = protocol_reduction_demo(p, 0.5, 3, 0.9, /*planted_backdoor=*/false,
                                                1e-2, SeedPath(700));
  CHECK(std::abs(rep.info_bound - (0.5 + std::pow(0.5, 3) / 2.0)) < 1e-12);
  CHECK(!rep.violated);
  CHECK(!rep.extraction_run);
}
