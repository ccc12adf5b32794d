#include "amp/estimate.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace amp {

uint64_t chernoff_samples(double eps, double eta) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("chernoff_samples: eps must be in (0,1)");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("chernoff_samples: eta must be in (0,1)");
  return static_cast<uint64_t>(std::ceil(std::log(2.0 / eta) / (2.0 * eps * eps)));
}

uint64_t count_successes(const std::function<bool(Rng&)>& trial,
                         uint64_t count, const SeedPath& seeds, int jobs) {
  if (jobs < 1) jobs = 1;
  if (jobs == 1 || count < 1024) {
    uint64_t hits = 0;
    for (uint64_t i = 0; i < count; ++i) {
      Rng r = seeds.child(i).stream();
      hits += trial(r) ? 1 : 0;
    }
    return hits;
  }
  std::vector<uint64_t> part(static_cast<size_t>(jobs), 0);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(jobs));
  uint64_t chunk = (count + static_cast<uint64_t>(jobs) - 1) / static_cast<uint64_t>(jobs);
  for (int t = 0; t < jobs; ++t) {
    uint64_t lo = chunk * static_cast<uint64_t>(t);
    uint64_t hi = std::min(count, lo + chunk);
    threads.emplace_back([&, t, lo, hi] {
      uint64_t hits = 0;
      for (uint64_t i = lo; i < hi; ++i) {
        Rng r = seeds.child(i).stream();
        hits += trial(r) ? 1 : 0;
      }
      part[static_cast<size_t>(t)] = hits;
    });
  }
  for (auto& th : threads) th.join();
  uint64_t total = 0;
  for (uint64_t h : part) total += h;  // fixed order: identical result for any jobs
  return total;
}

Estimate estimate_probability(const std::function<bool(Rng&)>& trial,
                              double eps, double eta,
                              const SeedPath& seeds, int jobs) {
  uint64_t m = chernoff_samples(eps, eta);
  uint64_t hits = count_successes(trial, m, seeds, jobs);
  Estimate e;
  e.value = static_cast<double>(hits) / static_cast<double>(m);
  e.half_width = eps;
  e.confidence = 1.0 - eta;
  e.samples = m;
  return e;
}

}  // namespace amp
