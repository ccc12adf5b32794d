#include <benchmark/benchmark.h>

#include "amp/amplifier.hpp"
#include "amp/estimate.hpp"
#include "amp/formula.hpp"
#include "amp/oracle.hpp"
#include "amp/single.hpp"

using namespace amp;

namespace {

// Per-eval cost of the read-once evaluator; leaf count is the argument.
void BM_FormulaEval(benchmark::State& state) {
  std::string sched;
  uint64_t leaves = 1;
  while (leaves < static_cast<uint64_t>(state.range(0))) {
    sched += (sched.size() % 3 == 2) ? 'V' : (sched.size() % 2 ? 'A' : 'O');
    leaves = schedule_formula(sched).leaf_count();
  }
  ReadOnceFormula f = schedule_formula(sched);
  std::vector<uint8_t> bits(f.leaf_count());
  Rng r(1);
  for (auto& b : bits) b = static_cast<uint8_t>(r.bit());
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.eval(bits));
  }
  state.SetItemsProcessed(state.iterations() * f.leaf_count());
}
BENCHMARK(BM_FormulaEval)->Arg(16)->Arg(256)->Arg(4096);

void BM_AcceptProb(benchmark::State& state) {
  ReadOnceFormula f = schedule_formula("OAVOAVOA");
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.accept_prob(0.37));
  }
}
BENCHMARK(BM_AcceptProb);

void BM_EstimateProbability(benchmark::State& state) {
  auto trial = [](Rng& r) { return r.bernoulli(0.3); };
  SeedPath seeds(5);
  double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_probability(trial, eps, 1e-2, seeds));
  }
}
BENCHMARK(BM_EstimateProbability)->Arg(20)->Arg(50);

// Advantage-table construction, the hot loop of every extraction.
void BM_FrozenCounts(benchmark::State& state) {
  uint32_t n = static_cast<uint32_t>(state.range(0));
  Rng init(2);
  PredicateOracle p = PredicateOracle::random(n, init);
  class Planted : public Distinguisher {
   public:
    explicit Planted(const PredicateOracle& p) : p_(&p) {}

   protected:
    int do_eval(BitVec x, int b, Rng& r) const override {
      if (x.v & 1) return r.bit();
      return b == p_->peek(x) ? 1 : 0;
    }

   private:
    const PredicateOracle* p_;
  } c(p);
  FixedRandomnessDistinguisher cp(c, 512, SeedPath(3));
  for (auto _ : state) {
    uint32_t acc = 0;
    for (uint64_t v = 0; v < p.domain_size(); ++v) {
      auto [c1, c0] = cp.count_pair(BitVec(n, v));
      acc += c1 - c0;
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * p.domain_size() * 2 * cp.m());
}
BENCHMARK(BM_FrozenCounts)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BuildAmplifier(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_amplifier(0.3, 0.5, static_cast<uint32_t>(state.range(0))));
  }
}
BENCHMARK(BM_BuildAmplifier)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
