#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "amp/amplifier.hpp"
#include "amp/formula.hpp"

using namespace amp;

TEST_CASE("gadget shape and repelling fixed point") {
  // q -> 1 - (1 - q^2)^2, checked against its gate decomposition.
  for (double q : {0.0, 0.1, 0.3, 0.5, 0.618, 0.9, 1.0}) {
    double a = q * q;                       // AND
    double direct = a + a - a * a;          // OR of the two ANDs
    CHECK(std::abs(valiant_gadget(q) - direct) < 1e-15);
  }
  double fp = valiant_fixed_point();
  CHECK(std::abs(valiant_gadget(fp) - fp) < 1e-12);
  CHECK(std::abs(fp - (std::sqrt(5.0) - 1.0) / 2.0) < 1e-15);
  // Repelling: the gadget moves points away from the fixed point.
  CHECK(valiant_gadget(fp - 0.05) < fp - 0.05);
  CHECK(valiant_gadget(fp + 0.05) > fp + 0.05);
}

TEST_CASE("schedule composition matches the materialized formula") {
  for (const char* sched : {"A", "O", "V", "OA", "VVA", "OAVOA"}) {
    ReadOnceFormula f = schedule_formula(sched);
    CHECK(f.read_once());
    for (double p : {0.05, 0.3, 0.5, 0.7, 0.95}) {
      CHECK(std::abs(f.accept_prob(p) - schedule_accept_prob(sched, p)) < 1e-12);
    }
  }
  CHECK(schedule_formula("A").leaf_count() == 2);
  CHECK(schedule_formula("V").leaf_count() == 4);
  CHECK(schedule_formula("AV").leaf_count() == 8);
}

TEST_CASE("schedule accept probability matches full truth-table enumeration") {
  // Independent oracle: evaluate the materialized tree on all 2^k leaf words.
  for (const char* sched : {"OA", "VA", "AOV"}) {
    ReadOnceFormula f = schedule_formula(sched);
    uint64_t k = f.leaf_count();
    REQUIRE(k <= 20);
    for (double p : {0.25, 0.5, 0.618}) {
      double direct = 0.0;
      for (uint64_t w = 0; w < (uint64_t{1} << k); ++w) {
        std::vector<uint8_t> bits(k);
        double mass = 1.0;
        for (uint64_t i = 0; i < k; ++i) {
          bits[i] = (w >> i) & 1;
          mass *= bits[i] ? p : (1.0 - p);
        }
        if (f.eval(bits)) direct += mass;
      }
      CHECK(std::abs(f.accept_prob(p) - direct) < 1e-10);
    }
  }
}

TEST_CASE("amplifier moves a straddling gap past the dyadic targets exactly") {
  AmplifierPlan plan = build_amplifier(0.3, 0.5, 10);
  CHECK(plan.exact_checked);
  CHECK(plan.alpha_ok);  // exact rational alpha_out < 2^-10, zero tolerance
  CHECK(plan.beta_ok);   // exact rational beta_out  > 1 - 2^-10, zero tolerance
  CHECK(plan.alpha_out < std::pow(2.0, -10));
  CHECK(plan.beta_out > 1.0 - std::pow(2.0, -10));
  CHECK(plan.k >= 4);

  // The double composition agrees with the schedule semantics.
  CHECK(std::abs(plan.alpha_out - schedule_accept_prob(plan.schedule, 0.3)) < 1e-12);
  CHECK(std::abs(plan.beta_out - schedule_accept_prob(plan.schedule, 0.5)) < 1e-12);

  if (plan.materialized) {
    CHECK(plan.formula.read_once());
    CHECK(plan.formula.leaf_count() == plan.k);
    CHECK(std::abs(plan.formula.accept_prob(0.3) - plan.alpha_out) < 1e-12);
  }
}

TEST_CASE("amplifier handles gaps on either side of the fixed point") {
  // Both endpoints below the fixed point: pre-balancing must lift them.
  // The narrow low gap needs ~2^20 leaves, past the default budget; skip the
  // exact pass (exact_cap=1) to keep the check cheap.
  AmplifierPlan low = build_amplifier(0.1, 0.2, 6, uint64_t{1} << 22, 1);
  CHECK(low.alpha_out < std::pow(2.0, -6));
  CHECK(low.beta_out > 1.0 - std::pow(2.0, -6));
  // Both above.
  AmplifierPlan high = build_amplifier(0.8, 0.9, 6);
  CHECK(high.alpha_out < std::pow(2.0, -6));
  CHECK(high.beta_out > 1.0 - std::pow(2.0, -6));
}

TEST_CASE("amplifier reports failure with diagnostics when the leaf cap binds") {
  CHECK_THROWS_AS(build_amplifier(0.499, 0.501, 30, /*max_k=*/64), AmplifierError);
}

TEST_CASE("exact decimal strings are only produced under the exact cap") {
  AmplifierPlan p = build_amplifier(0.3, 0.5, 4, 1000000, /*exact_cap=*/1);
  CHECK(!p.exact_checked);
  CHECK(p.alpha_out_exact.empty());
  AmplifierPlan q = build_amplifier(0.3, 0.5, 4);
  CHECK(q.exact_checked);
  CHECK(!q.alpha_out_exact.empty());
  // Exact decimal agrees with the double composition to double precision.
  CHECK(std::abs(std::stod(q.alpha_out_exact) - q.alpha_out) < 1e-9);
  CHECK(std::abs(std::stod(q.beta_out_exact) - q.beta_out) < 1e-9);
}
