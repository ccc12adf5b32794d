#include "amp/multi.hpp"

#include <cmath>

namespace amp {

uint64_t prefix_digest(const Prefix& t) {
  // FNV-1a over (x.v, b); empty prefix hashes to the offset basis.
  uint64_t h = 1469598103934665603ULL;
  auto mixin = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (const XPair& p : t) {
    mixin(p.x.v);
    mixin(static_cast<uint64_t>(p.b));
  }
  return h;
}

std::shared_ptr<const PrefixSetGenerator::Entry> PrefixSetGenerator::gen(const Prefix& t) {
  uint64_t d = prefix_digest(t);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(d);
    if (it != cache_.end()) return it->second;
  }
  auto entry = std::make_shared<Entry>();
  entry->circuit = std::make_shared<InducedSingle>(*ck_, t, *p_);
  double eps_inner = eps_ / (4.0 * ck_->k());
  entry->gen = gen_single(*entry->circuit, *p_, eps_inner, eta_, seeds_.child(d));
  std::lock_guard<std::mutex> lk(mu_);
  auto [it, inserted] = cache_.emplace(d, entry);
  if (inserted) ++misses_;
  return it->second;
}

ExperimentOutcome hybrid(uint32_t j, const MultiDistinguisher& ck,
                         PrefixSetGenerator* gs, const PredicateOracle& p,
                         const SeedPath& seeds) {
  const uint32_t k = ck.k();
  ExperimentOutcome out;
  out.randomized_rounds.assign(k, 0);
  out.pairs.reserve(k);
  for (uint32_t i = 1; i <= k; ++i) {
    SeedPath rs = seeds.child(i);
    Rng xr = rs.child(0).stream();
    BitVec xi = BitVec::random(p.n(), xr);
    int bi;
    if (i <= j) {
      const HardSetRecognizer& s = gs->gen_s(out.pairs);
      out.set_densities.push_back(s.density_exact());
      if (s.membership(xi)) {
        Rng coin = rs.child(1).stream();
        bi = coin.bit();
        out.randomized_rounds[i - 1] = 1;
      } else {
        bi = p.eval(xi);
      }
    } else {
      bi = p.eval(xi);
    }
    out.pairs.push_back({xi, bi});
  }
  Rng r = seeds.child(0).stream();
  out.output = ck.eval(out.pairs, r);
  return out;
}

GenMultiResult gen_multi(const MultiDistinguisher& ck, const PredicateOracle& p,
                         double eps, double eta, const SeedPath& seeds,
                         PrefixSetGenerator* gs, bool strict_final) {
  const uint32_t k = ck.k();
  const uint32_t n = p.n();
  const uint32_t ell = static_cast<uint32_t>(std::ceil(static_cast<double>(n) * k / eps));
  const double eta_inner = eta / (ell + 1.0);

  PrefixSetGenerator local(ck, p, eps, eta_inner, seeds.child(1));
  if (!gs) gs = &local;

  GenMultiResult best;
  bool have = false;
  for (uint32_t it = 0; it < ell; ++it) {
    SeedPath its = seeds.child(2).child(it);
    Rng pick = its.child(0).stream();
    uint32_t i = 1 + static_cast<uint32_t>(pick.below(k));

    // Simulate Experiment 2 through round i-1 to obtain the prefix.
    Prefix t;
    for (uint32_t r = 1; r < i; ++r) {
      SeedPath rs = its.child(r);
      Rng xr = rs.child(0).stream();
      BitVec xr_val = BitVec::random(n, xr);
      const HardSetRecognizer& s = gs->gen_s(t);
      int br;
      if (s.membership(xr_val)) {
        Rng coin = rs.child(1).stream();
        br = coin.bit();
      } else {
        br = p.eval(xr_val);
      }
      t.push_back({xr_val, br});
    }

    auto entry = gs->gen(t);
    if (!have || entry->gen.delta < best.delta) {
      have = true;
      best.q = entry->gen.q;
      best.entry = entry;
      best.prefix = t;
      best.slot = i;
      best.delta = entry->gen.delta;
      best.best_iteration = it;
      best.diag = entry->gen.diag;
    }
  }
  best.iterations = ell;

  if (strict_final && !best.q.fair_coin()) {
    // Re-run the winning prefix with the strict-gain construction; the
    // accuracy parameter stays eps/4k, so the prediction bound becomes
    // 1 - delta/2 + eps/16k.
    auto entry = std::make_shared<PrefixSetGenerator::Entry>();
    entry->circuit = std::make_shared<InducedSingle>(ck, best.prefix, p);
    double eps_inner = eps / (4.0 * k);
    entry->gen = gen_single(*entry->circuit, p, eps_inner, eta_inner,
                            seeds.child(3).child(prefix_digest(best.prefix)),
                            /*strict_gain=*/true);
    best.q = entry->gen.q;
    best.entry = entry;
    best.delta = entry->gen.delta;
    best.diag = entry->gen.diag;
  }
  return best;
}

}  // namespace amp
