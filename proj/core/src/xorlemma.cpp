#include "amp/xorlemma.hpp"

#include <cmath>

namespace amp {

XorBoundReport xor_bound_check(const XorAdversary& adv, const PredicateOracle& p,
                               double delta_prime, double eps_prime,
                               double measure_eps, double eta, const SeedPath& seeds,
                               double gen_eps) {
  XorBoundReport rep;
  const uint32_t k = adv.k();
  const uint32_t n = p.n();

  rep.bound = k == 1 ? 1.0 - delta_prime / 2.0 + eps_prime
                     : 0.5 + std::pow(1.0 - delta_prime, static_cast<double>(k)) + eps_prime;

  const XorAdversary* a = &adv;
  const PredicateOracle* pp = &p;
  rep.success = estimate_probability(
      [a, pp, n, k](Rng& r) {
        std::vector<BitVec> xs;
        xs.reserve(k);
        int truth = 0;
        for (uint32_t i = 0; i < k; ++i) {
          BitVec x = BitVec::random(n, r);
          xs.push_back(x);
          truth ^= pp->eval(x);
        }
        return a->guess(xs, r) == truth;
      },
      measure_eps, eta, seeds.child(0));

  rep.respected = rep.success.value <= rep.bound + rep.success.half_width;
  if (rep.respected) return rep;

  // Bound violated: run the extraction and verify the witness exhaustively.
  rep.extraction_run = true;
  if (gen_eps <= 0.0) {
    // The violation margin is the advantage the wrapper carries; stay a bit
    // below it so the generator's precondition holds.
    gen_eps = std::max(0.05, 0.8 * (rep.success.value - rep.bound + eps_prime));
    gen_eps = std::min(gen_eps, 0.95);
  }
  XorWrap wrap(adv);
  GenMultiResult g = gen_multi(wrap, p, gen_eps, eta, seeds.child(1));
  rep.extracted_delta = g.delta;
  double correct = 0.0;
  const uint64_t dom = p.domain_size();
  for (uint64_t v = 0; v < dom; ++v) {
    BitVec x(n, v);
    correct += g.q.correct_prob(x, p.peek(x));
  }
  rep.extracted_predict_prob = correct / static_cast<double>(dom);
  rep.extraction_ok = rep.extracted_predict_prob >= 1.0 - delta_prime / 2.0 - 1e-12;
  return rep;
}

}  // namespace amp
