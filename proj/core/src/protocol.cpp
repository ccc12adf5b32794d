#include "amp/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "amp/xorlemma.hpp"

namespace amp {

HidingSource::HidingSource(std::vector<double> p0, std::vector<double> p1)
    : p0_(std::move(p0)), p1_(std::move(p1)) {
  if (p0_.size() != p1_.size() || p0_.empty())
    throw std::invalid_argument("HidingSource: tables must be non-empty and equal-sized");
  double total = 0.0;
  for (size_t z = 0; z < p0_.size(); ++z) total += p0_[z] + p1_[z];
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("HidingSource: joint masses must sum to 1");
}

HidingSource HidingSource::binary_noise(double beta) {
  double same = (1.0 - beta / 2.0) / 2.0, diff = beta / 4.0;
  // z in {0,1}
  return HidingSource({same, diff}, {diff, same});
}

HidingSource HidingSource::erasure(double beta) {
  // z in {0, 1, 2=erased}; X uniform
  double keep = (1.0 - beta) / 2.0, er = beta / 2.0;
  return HidingSource({keep, 0.0, er}, {0.0, keep, er});
}

double HidingSource::max_guess() const {
  double s = 0.0;
  for (size_t z = 0; z < p0_.size(); ++z) s += std::max(p0_[z], p1_[z]);
  return s;
}

double HidingSource::h_prob() const {
  double s = 0.0;
  for (size_t z = 0; z < p0_.size(); ++z) s += std::min(p0_[z], p1_[z]);
  return 2.0 * s;
}

double HidingSource::guess_given_h1() const {
  // Conditioned on H=1 the posterior of X is uniform at every z with
  // min > 0, so any guess is correct with probability exactly 1/2.
  double ph1 = h_prob();
  if (ph1 == 0.0) return 0.0;
  double correct = 0.0;
  for (size_t z = 0; z < p0_.size(); ++z) {
    double mn = std::min(p0_[z], p1_[z]);
    if (mn == 0.0) continue;
    // Pr[H=1, Z=z] = 2 mn; the optimal guess at z picks the majority bit,
    // correct with mass mn of the 2 mn.
    correct += mn;
  }
  return correct / ph1;
}

std::pair<int, uint32_t> HidingSource::sample(Rng& r) const {
  double u = r.real();
  for (size_t z = 0; z < p0_.size(); ++z) {
    if (u < p0_[z]) return {0, static_cast<uint32_t>(z)};
    u -= p0_[z];
    if (u < p1_[z]) return {1, static_cast<uint32_t>(z)};
    u -= p1_[z];
  }
  return {1, static_cast<uint32_t>(p0_.size() - 1)};
}

uint32_t HidingSource::sample_z_given_x(int x, Rng& r) const {
  const auto& p = x ? p1_ : p0_;
  double norm = 0.0;
  for (double v : p) norm += v;
  double u = r.real() * norm;
  for (size_t z = 0; z < p.size(); ++z) {
    if (u < p[z]) return static_cast<uint32_t>(z);
    u -= p[z];
  }
  return static_cast<uint32_t>(p.size() - 1);
}

double HidingSource::posterior_x1(uint32_t z) const {
  double t = p0_[z] + p1_[z];
  return t == 0.0 ? 0.5 : p1_[z] / t;
}

double HidingSource::likelihood(uint32_t z, int x) const {
  const auto& p = x ? p1_ : p0_;
  double norm = 0.0;
  for (double v : p) norm += v;
  return norm == 0.0 ? 0.0 : p[z] / norm;
}

std::pair<std::vector<uint8_t>, ExtractionTranscript> run_extraction_protocol(
    const ReadOnceFormula& g, const std::vector<uint8_t>& c, int b, const SeedPath& seeds) {
  if (c.size() != g.leaf_count())
    throw std::invalid_argument("run_extraction_protocol: |c| != leaf count");
  std::vector<uint8_t> wires(g.node_count());
  ExtractionTranscript tr;
  Rng fresh = seeds.stream();
  for (uint32_t id = 0; id < g.node_count(); ++id) {
    switch (g.kind(id)) {
      case ReadOnceFormula::kLeaf:
        wires[id] = c[g.leaf_index(id)] & 1;
        break;
      case ReadOnceFormula::kOr:
        // OR gates cost no message: the wire is the XOR of the children.
        wires[id] = wires[g.left(id)] ^ wires[g.right(id)];
        break;
      case ReadOnceFormula::kAnd: {
        uint8_t cl = static_cast<uint8_t>(fresh.bit());
        wires[id] = cl;
        tr.masks.push_back({id, cl ^ wires[g.left(id)], cl ^ wires[g.right(id)]});
        break;
      }
    }
  }
  tr.final_msg = b ^ wires.back();
  return {std::move(wires), std::move(tr)};
}

int decode_extraction(const ReadOnceFormula& g, const std::vector<uint8_t>& c,
                      const ExtractionTranscript& tr) {
  std::unordered_map<uint32_t, const ExtractionTranscript::Mask*> masks;
  for (const auto& m : tr.masks) masks[m.node] = &m;
  std::vector<uint8_t> wires(g.node_count());
  for (uint32_t id = 0; id < g.node_count(); ++id) {
    switch (g.kind(id)) {
      case ReadOnceFormula::kLeaf:
        wires[id] = c[g.leaf_index(id)] & 1;
        break;
      case ReadOnceFormula::kOr:
        wires[id] = wires[g.left(id)] ^ wires[g.right(id)];
        break;
      case ReadOnceFormula::kAnd: {
        auto it = masks.find(id);
        if (it == masks.end()) return -1;
        uint8_t cl = static_cast<uint8_t>(it->second->m1 ^ wires[g.left(id)]);
        if ((it->second->m2 ^ wires[g.right(id)]) != cl) return -1;
        wires[id] = cl;
        break;
      }
    }
  }
  return tr.final_msg ^ wires.back();
}

double posterior_b1(const ReadOnceFormula& g, const HidingSource& source,
                    const std::vector<uint32_t>& zs, const ExtractionTranscript& tr) {
  // Likelihood propagation: L_id(v) = Pr[subtree's z's and masks | wire=v].
  std::unordered_map<uint32_t, const ExtractionTranscript::Mask*> masks;
  for (const auto& m : tr.masks) masks[m.node] = &m;
  std::vector<std::array<double, 2>> lk(g.node_count());
  for (uint32_t id = 0; id < g.node_count(); ++id) {
    switch (g.kind(id)) {
      case ReadOnceFormula::kLeaf: {
        uint32_t z = zs[g.leaf_index(id)];
        lk[id] = {source.likelihood(z, 0), source.likelihood(z, 1)};
        break;
      }
      case ReadOnceFormula::kOr: {
        const auto &a = lk[g.left(id)], &b = lk[g.right(id)];
        lk[id] = {a[0] * b[0] + a[1] * b[1], a[0] * b[1] + a[1] * b[0]};
        break;
      }
      case ReadOnceFormula::kAnd: {
        const auto &a = lk[g.left(id)], &b = lk[g.right(id)];
        const auto* m = masks.at(id);
        // wire = v forces left = v ^ m1, right = v ^ m2
        lk[id] = {a[m->m1] * b[m->m2], a[1 ^ m->m1] * b[1 ^ m->m2]};
        break;
      }
    }
  }
  // b = final_msg ^ root wire, b prior uniform
  double l1 = lk.back()[tr.final_msg ^ 1];
  double l0 = lk.back()[tr.final_msg ^ 0];
  double t = l0 + l1;
  return t == 0.0 ? 0.5 : l1 / t;
}

HidingReport hiding_experiment(const ReadOnceFormula& g, const HidingSource& source,
                               uint64_t trials, double eta, const SeedPath& seeds) {
  HidingReport rep;
  rep.p_h1 = source.h_prob();
  rep.p_g_h = g.accept_prob(rep.p_h1);
  rep.bound = 1.0 - rep.p_g_h / 2.0;

  const uint64_t k = g.leaf_count();
  uint64_t hits = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    SeedPath ts = seeds.child(t);
    Rng r = ts.child(0).stream();
    std::vector<uint8_t> c(k);
    std::vector<uint32_t> zs(k);
    for (uint64_t i = 0; i < k; ++i) {
      auto [x, z] = source.sample(r);
      c[i] = static_cast<uint8_t>(x);
      zs[i] = z;
    }
    int b = r.bit();
    auto [wires, tr] = run_extraction_protocol(g, c, b, ts.child(1));
    double pb1 = posterior_b1(g, source, zs, tr);
    int guess = pb1 > 0.5 ? 1 : (pb1 < 0.5 ? 0 : r.bit());
    hits += static_cast<uint64_t>(guess == b);
  }
  double half = std::sqrt(std::log(2.0 / eta) / (2.0 * static_cast<double>(trials)));
  rep.measured = Estimate{static_cast<double>(hits) / trials, half, 1.0 - eta, trials, false};
  rep.ok = rep.measured.value <= rep.bound + half;
  return rep;
}

BindingReport binding_experiment(const ReadOnceFormula& g, double alpha,
                                 uint64_t trials, const SeedPath& seeds) {
  BindingReport rep;
  rep.exact_bound = g.accept_prob(alpha);
  rep.trials = trials;
  for (uint64_t t = 0; t < trials; ++t) {
    Rng r = seeds.child(t).stream();
    // read-once: each leaf is inspected at most once, so drawing on demand
    // samples the i.i.d. pattern faithfully
    int win = g.eval_lazy([&r, alpha](uint32_t) { return r.bernoulli(alpha); });
    rep.successes += static_cast<uint64_t>(win);
  }
  double rate = static_cast<double>(rep.successes) / static_cast<double>(trials);
  double slack = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * static_cast<double>(trials)));
  rep.ok = rate <= rep.exact_bound + slack;
  return rep;
}

WeakCommitment::Commitment WeakCommitment::commit(int b, Rng& r) const {
  Commitment c;
  c.b = b & 1;
  c.z = src_.sample_z_given_x(c.b, r);
  c.tau = r.u64();
  return c;
}

int WeakCommitment::check(int b, const Commitment& c) const {
  // The transcript must be consistent with the claimed bit: an erased z is
  // consistent with both, otherwise it must match.
  if (c.z == 2) return (b & 1) == c.b;
  return c.z == static_cast<uint32_t>(b & 1) && (b & 1) == c.b;
}

int WeakCommitment::cheat_guess(const Commitment& c, Rng& r) const {
  return c.z == 2 ? r.bit() : static_cast<int>(c.z);
}

ComposedCommitment::Session ComposedCommitment::commit(int b, const SeedPath& seeds) const {
  Session s;
  s.b = b & 1;
  const uint64_t k = g_->leaf_count();
  Rng r = seeds.child(0).stream();
  s.c.resize(k);
  s.rounds.reserve(k);
  for (uint64_t i = 0; i < k; ++i) {
    s.c[i] = static_cast<uint8_t>(r.bit());
    s.rounds.push_back(weak_->commit(s.c[i], r));
  }
  auto [wires, tr] = run_extraction_protocol(*g_, s.c, s.b, seeds.child(1));
  s.tr = std::move(tr);
  return s;
}

int ComposedCommitment::check_open(const Session& s) const {
  if (s.c.size() != g_->leaf_count() || s.rounds.size() != s.c.size()) return 0;
  for (size_t i = 0; i < s.c.size(); ++i)
    if (!weak_->check(s.c[i], s.rounds[i])) return 0;
  int b = decode_extraction(*g_, s.c, s.tr);
  return b == s.b ? 1 : 0;
}

namespace {

// Honest-but-unbounded receiver of the weak XOR protocol: reads the bit when
// the round's side information reveals x, flips a coin otherwise — achieving
// the information bound exactly.
class ErasureXorAdversary : public XorAdversary {
 public:
  ErasureXorAdversary(const PredicateOracle& p, uint32_t k, double beta)
      : p_(&p), k_(k), beta_(beta) {}
  uint32_t k() const override { return k_; }

 protected:
  int do_guess(const std::vector<BitVec>& xs, Rng& r) const override {
    int acc = 0;
    for (const BitVec& x : xs)
      acc ^= r.bernoulli(beta_) ? r.bit() : p_->peek(x);  // planted, uncounted
    return acc;
  }

 private:
  const PredicateOracle* p_;
  uint32_t k_;
  double beta_;
};

}  // namespace

namespace {

// Planted cheat with input-dependent leak quality: inputs fall into three
// strata — a coin, a weak read (advantage 0.3), an exact read — in
// proportions 1/8, 1/8, 6/8.  Per-coordinate correlation is 0.7875, so the
// XOR guess succeeds with (1 + 0.7875^k)/2, far above the information bound,
// while the induced per-input advantages span several scales, which is what
// the prefix-sum windows (strict ones included) need on a small domain.
class StrataBackdoorAdversary : public XorAdversary {
 public:
  StrataBackdoorAdversary(const PredicateOracle& p, uint32_t k) : p_(&p), k_(k) {}
  uint32_t k() const override { return k_; }

 protected:
  int do_guess(const std::vector<BitVec>& xs, Rng& r) const override {
    int acc = 0;
    for (const BitVec& x : xs) {
      switch (x.v & 7) {
        case 0: acc ^= r.bit(); break;  // planted cheat, reads are uncounted
        case 1: acc ^= p_->peek(x) ^ (r.bernoulli(0.35) ? 1 : 0); break;
        default: acc ^= p_->peek(x); break;
      }
    }
    return acc;
  }

 private:
  const PredicateOracle* p_;
  uint32_t k_;
};

}  // namespace

ReductionReport protocol_reduction_demo(const PredicateOracle& p, double beta,
                                        uint32_t k, double eps, bool planted_backdoor,
                                        double eta, const SeedPath& seeds) {
  ReductionReport rep;
  rep.info_bound = 0.5 + 0.5 * std::pow(1.0 - beta, static_cast<double>(k));
  // Fixed trigger margin, well above the +-0.01 measurement width; tying it
  // to eps would demand a near-perfect adversary, whose saturated advantage
  // table has no rank inside the strict prefix-sum window at this scale.
  rep.margin = 0.05;

  std::unique_ptr<XorAdversary> adv;
  if (planted_backdoor)
    adv = std::make_unique<StrataBackdoorAdversary>(p, k);
  else
    adv = std::make_unique<ErasureXorAdversary>(p, k, beta);

  const uint32_t n = p.n();
  const XorAdversary* a = adv.get();
  const PredicateOracle* pp = &p;
  Estimate meas = estimate_probability(
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
      0.01, eta, seeds.child(0));
  rep.measured = meas.value;
  rep.violated = rep.measured > rep.info_bound + rep.margin;
  if (!rep.violated) return rep;  // no extraction obligation

  rep.extraction_run = true;
  XorWrap wrap(*adv);
  MultiCallRecorder recorder(wrap);
  recorder.disable();  // generation alone makes ~1e8 calls; log predicts only
  GenMultiResult g = gen_multi(recorder, p, eps, eta, seeds.child(1),
                               /*gs=*/nullptr, /*strict_final=*/true);
  recorder.enable();
  rep.delta = g.delta;
  rep.predict_bound = std::min(1.0, 1.0 - g.delta / 2.0 + eps / (48.0 * k));

  double correct = 0.0;
  const uint64_t dom = p.domain_size();
  for (uint64_t v = 0; v < dom; ++v) {
    BitVec x(n, v);
    correct += g.q.correct_prob(x, p.peek(x));
  }
  rep.predict_prob = correct / static_cast<double>(dom);
  rep.predict_ok = rep.predict_prob >= rep.predict_bound - 1e-12;

  // Certificate: a handful of live predictions must touch the base circuit
  // at the recorded slot with the recorded prefix, live input unchanged.
  recorder.clear();
  bool cert = true;
  Rng coin = seeds.child(2).stream();
  for (int t = 0; t < 3 && cert; ++t) {
    BitVec x = BitVec::random(n, coin);
    if (g.q.fair_coin()) break;
    g.q.predict(x, coin);
    auto log = recorder.log();
    if (log.empty()) cert = false;
    for (const auto& pairs : log) {
      if (pairs.size() != k || g.slot > pairs.size()) { cert = false; break; }
      for (size_t j = 0; j + 1 < g.slot; ++j)
        if (!(pairs[j] == g.prefix[j])) { cert = false; break; }
      if (!(pairs[g.slot - 1].x == x)) { cert = false; break; }
    }
    recorder.clear();
  }
  rep.non_rewinding_ok = cert;
  return rep;
}

}  // namespace amp
