#pragma once

#include <cstdint>
#include <functional>

#include "amp/seed.hpp"

namespace amp {

// Point estimate of a probability with a two-sided Hoeffding guarantee:
// |value - truth| <= half_width with probability >= confidence.
// exact == true means the value was computed by full enumeration and the
// guarantee holds with certainty (half_width is then an upper bound only).
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
  double confidence = 0.0;
  uint64_t samples = 0;
  bool exact = false;
};

// Samples needed so the empirical mean of i.i.d. {0,1} trials is within eps
// of the truth except with probability eta.  Throws std::invalid_argument
// unless 0 < eps < 1 and 0 < eta < 1.
uint64_t chernoff_samples(double eps, double eta);

// Monte Carlo estimate of Pr[trial = true].  Trial i receives the stream of
// seeds.child(i), so the result is independent of jobs and of scheduling.
Estimate estimate_probability(const std::function<bool(Rng&)>& trial,
                              double eps, double eta,
                              const SeedPath& seeds, int jobs = 1);

// Deterministic parallel map-reduce over [0, count): each index is handed
// its own derived seed; per-chunk integer tallies are summed in index order.
uint64_t count_successes(const std::function<bool(Rng&)>& trial,
                         uint64_t count, const SeedPath& seeds, int jobs);

}  // namespace amp
