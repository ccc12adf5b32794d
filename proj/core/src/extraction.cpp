#include "amp/extraction.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace amp {

ExtractionReport extraction_experiment(const PairSource& src, uint32_t k,
                                       uint32_t m_bits, double delta_prime,
                                       ExtractionSets mode, const SeedPath& seeds) {
  if (!src.p || src.f.size() != (uint64_t{1} << src.n) || src.range == 0)
    throw std::invalid_argument("extraction_experiment: source must be tabulated");
  if (k < 1 || k > 16 || m_bits > k)
    throw std::invalid_argument("extraction_experiment: need 1 <= k <= 16 and m_bits <= k");
  double views = std::pow(static_cast<double>(src.range), static_cast<double>(k));
  if (views * std::ldexp(1.0, static_cast<int>(k)) > 1e9)
    throw std::invalid_argument("extraction_experiment: range^k * 2^k exceeds the enumeration cap");

  const uint64_t dom = uint64_t{1} << src.n;
  const uint64_t n_views = static_cast<uint64_t>(views);

  ExtractionReport rep;
  rep.k = k;
  rep.m_bits = m_bits;

  // Seeded binary hash matrix, rows recorded for replay.
  SeedPath mseed = seeds.child(0);
  rep.matrix_seed = mseed.key();
  Rng mr = mseed.stream();
  rep.matrix_rows.resize(m_bits);
  for (auto& row : rep.matrix_rows)
    row = static_cast<uint32_t>(mr.below(uint64_t{1} << k));

  // The hard set for kDensity mode: the lexicographically first
  // ceil(delta' * 2^n) inputs; density is then exactly that fraction.
  uint64_t set_size = static_cast<uint64_t>(std::ceil(delta_prime * static_cast<double>(dom)));

  // Per view value v: Pr[f(x)=v], Pr[round randomized | v], Pr[b=1 | v].
  std::vector<double> pv(src.range, 0.0), prand(src.range, 0.0), pb1(src.range, 0.0);
  for (uint64_t x = 0; x < dom; ++x) {
    uint32_t v = src.f[x];
    pv[v] += 1.0;
    bool in_set = mode == ExtractionSets::kAll ||
                  (mode == ExtractionSets::kDensity && x < set_size);
    if (in_set) {
      prand[v] += 1.0;
      pb1[v] += 0.5;
    } else {
      pb1[v] += src.p->peek(BitVec(src.n, x));
    }
  }
  double land_total = 0.0;
  for (uint32_t v = 0; v < src.range; ++v) {
    if (pv[v] == 0.0) continue;
    prand[v] /= pv[v];
    pb1[v] /= pv[v];
    pv[v] /= static_cast<double>(dom);
    land_total += pv[v] * prand[v];
  }
  rep.expected_landing = land_total * k;

  // Worst-case min-entropy of the k source bits given the view.
  double per_round_best = 0.0;  // max over v of max(pb1, 1-pb1)
  for (uint32_t v = 0; v < src.range; ++v) {
    if (pv[v] == 0.0) continue;
    per_round_best = std::max(per_round_best, std::max(pb1[v], 1.0 - pb1[v]));
  }
  rep.min_entropy = -static_cast<double>(k) * std::log2(per_round_best);
  rep.lhl_bound = 0.5 * std::sqrt(std::ldexp(1.0, static_cast<int>(m_bits)) /
                                  std::exp2(rep.min_entropy));

  // Exact statistical distance: enumerate view tuples, then the 2^k bit
  // vectors; extracted value e = M b over GF(2).
  const uint64_t nbits = uint64_t{1} << k;
  const uint64_t mout = uint64_t{1} << m_bits;
  std::vector<double> edist(mout);
  double distance = 0.0;
  std::vector<uint32_t> vt(k, 0);
  for (uint64_t vi = 0; vi < n_views; ++vi) {
    // decode view tuple in base `range`
    uint64_t tmp = vi;
    double pview = 1.0;
    for (uint32_t j = 0; j < k; ++j) {
      vt[j] = static_cast<uint32_t>(tmp % src.range);
      tmp /= src.range;
      pview *= pv[vt[j]];
    }
    if (pview == 0.0) continue;
    std::fill(edist.begin(), edist.end(), 0.0);
    for (uint64_t b = 0; b < nbits; ++b) {
      double pb = 1.0;
      for (uint32_t j = 0; j < k; ++j) {
        double q = pb1[vt[j]];
        pb *= (b >> j) & 1 ? q : 1.0 - q;
      }
      if (pb == 0.0) continue;
      uint64_t e = 0;
      for (uint32_t row = 0; row < m_bits; ++row)
        e |= static_cast<uint64_t>(std::popcount(rep.matrix_rows[row] & static_cast<uint32_t>(b)) & 1)
             << row;
      edist[e] += pb;
    }
    double d = 0.0;
    double unif = 1.0 / static_cast<double>(mout);
    for (uint64_t e = 0; e < mout; ++e) d += std::abs(edist[e] - unif);
    distance += pview * 0.5 * d;
  }
  rep.distance = m_bits == 0 ? 0.0 : distance;
  rep.distance_ok = rep.distance <= rep.lhl_bound + 1e-12;

  rep.sets_threshold = (delta_prime - 1.0 / (4.0 * src.n)) * k;

  // Exact Pr[#randomized rounds >= threshold]: rounds are i.i.d., so the
  // count is Binomial(k, land_total).
  {
    std::vector<double> pmf(k + 1, 0.0);
    pmf[0] = 1.0;
    for (uint32_t i = 0; i < k; ++i)
      for (uint32_t c = i + 1; c-- > 0;) {
        pmf[c + 1] += pmf[c] * land_total;
        pmf[c] *= 1.0 - land_total;
      }
    double meet = 0.0;
    for (uint32_t c = 0; c <= k; ++c)
      if (static_cast<double>(c) >= rep.sets_threshold) meet += pmf[c];
    rep.landing_meet_prob = meet;
  }
  return rep;
}

}  // namespace amp
