#pragma once

#include <cstdint>
#include <vector>

#include "amp/oracle.hpp"
#include "amp/seed.hpp"

namespace amp {

// Tabulated pair sampler: a leakage function f and the predicate P on the
// same n-bit domain.  The adversary's view of one round is f(x); the bit fed
// to the extractor is P(x) (or a coin when the round is randomized).
struct PairSource {
  uint32_t n = 0;
  uint32_t range = 0;             // f maps into 0..range-1
  std::vector<uint32_t> f;        // size 2^n
  const PredicateOracle* p = nullptr;
};

enum class ExtractionSets {
  kAll,      // every round randomized (density-1 hard sets)
  kNone,     // no round randomized (empty sets)
  kDensity,  // round i randomized iff x_i falls in a fixed set of density delta'
};

struct ExtractionReport {
  uint32_t k = 0, m_bits = 0;
  uint64_t matrix_seed = 0;            // recorded; rows of the binary hash
  std::vector<uint32_t> matrix_rows;   // m_bits rows, k bits each

  // Exact statistical distance between (view, extracted bits) and
  // (view, uniform), enumerated over range^k views and 2^k bit vectors.
  double distance = 0.0;
  double min_entropy = 0.0;            // worst-case H_inf(b | view), bits
  double lhl_bound = 0.0;              // 0.5 * sqrt(2^m / 2^H_inf)
  bool distance_ok = false;            // distance <= lhl_bound (or <= 2^-m slack for kAll)

  double sets_threshold = 0.0;         // (delta' - 1/(4n)) * k
  double landing_meet_prob = 0.0;      // exact Pr[#randomized rounds >= threshold]
  double expected_landing = 0.0;       // exact E[#randomized rounds]
};

// Desk-scale extraction demonstration: k independent rounds, each
// contributing one bit that is uniform when the round lands in its hard set
// and P(x_i) otherwise; a seeded random-binary-matrix (XOR-universal) hash
// compresses the k bits to m_bits.  All distributions are enumerated
// exactly, so the reported distance is not an estimate.  The reference bound
// is the leftover-hash bound at these toy parameters, not an asymptotic one.
// Throws std::invalid_argument when range^k * 2^k exceeds the enumeration
// cap or the source is not tabulated.
ExtractionReport extraction_experiment(const PairSource& src, uint32_t k,
                                       uint32_t m_bits, double delta_prime,
                                       ExtractionSets mode, const SeedPath& seeds);

}  // namespace amp
