#include "amp/amplifier.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <sstream>
#include <vector>

namespace amp {

double valiant_gadget(double q) {
  double t = 1.0 - q * q;
  return 1.0 - t * t;
}

double valiant_fixed_point() { return (std::sqrt(5.0) - 1.0) / 2.0; }

namespace {

double apply_op(char op, double q) {
  switch (op) {
    case 'O': return 2.0 * q - q * q;
    case 'A': return q * q;
    default:  return valiant_gadget(q);
  }
}

uint64_t op_cost(char op) { return op == 'V' ? 4 : 2; }

// Pre-balance: cheapest O/A sequence (ties: larger margin) putting
// alpha' < p* - margin and beta' > p* + margin.  Exhaustive over short
// sequences; fine because each layer at least doubles the leaf count, so
// useful sequences are short.
bool prebalance(double alpha, double beta, double margin,
                std::string& best, double& a_out, double& b_out) {
  const double pstar = valiant_fixed_point();
  bool found = false;
  double best_margin = -1.0;
  for (uint32_t len = 0; len <= 12 && !found; ++len) {
    for (uint64_t bits = 0; bits < (uint64_t{1} << len); ++bits) {
      double a = alpha, b = beta;
      std::string seq;
      for (uint32_t i = 0; i < len; ++i) {
        char op = (bits >> i) & 1 ? 'A' : 'O';
        a = apply_op(op, a);
        b = apply_op(op, b);
        seq.push_back(op);
      }
      double m = std::min(pstar - a, b - pstar);
      if (m >= margin && m > best_margin) {
        best_margin = m;
        best = seq;
        a_out = a;
        b_out = b;
        found = true;
      }
    }
  }
  return found;
}

namespace mp = boost::multiprecision;

// Dyadic rational q = num / 2^exp with 0 <= q <= 1.  The schedule only ever
// squares and complements, so every intermediate stays dyadic when the input
// is a double.
struct Dyadic {
  mp::cpp_int num;
  uint64_t exp = 0;

  static Dyadic from_double(double v) {
    Dyadic d;
    int e = 0;
    double frac = std::frexp(v, &e);  // v = frac * 2^e, frac in [0.5, 1)
    int64_t scaled = static_cast<int64_t>(std::ldexp(frac, 53));
    d.num = scaled;
    int64_t shift = 53 - e;
    if (shift < 0) { d.num <<= static_cast<uint64_t>(-shift); shift = 0; }
    d.exp = static_cast<uint64_t>(shift);
    d.normalize();
    return d;
  }

  void normalize() {
    while (exp > 0 && !mp::bit_test(num, 0)) { num >>= 1; --exp; }
  }

  Dyadic times(const Dyadic& o) const {
    Dyadic r;
    r.num = num * o.num;
    r.exp = exp + o.exp;
    r.normalize();
    return r;
  }

  Dyadic one_minus() const {
    Dyadic r;
    r.num = (mp::cpp_int{1} << exp) - num;
    r.exp = exp;
    r.normalize();
    return r;
  }

  // compares against 2^-n
  bool less_than_pow2(uint32_t n) const {
    // num / 2^exp < 2^-n  <=>  num * 2^n < 2^exp
    return (num << n) < (mp::cpp_int{1} << exp);
  }

  std::string decimal(int digits) const {
    mp::cpp_int scaled = num * mp::pow(mp::cpp_int{10}, static_cast<unsigned>(digits));
    scaled >>= exp;
    std::string s = scaled.str();
    while (static_cast<int>(s.size()) <= digits) s.insert(s.begin(), '0');
    s.insert(s.size() - static_cast<size_t>(digits), ".");
    return s;
  }
};

Dyadic apply_op_exact(char op, const Dyadic& q) {
  switch (op) {
    case 'O': {  // 1 - (1-q)^2
      Dyadic c = q.one_minus();
      return c.times(c).one_minus();
    }
    case 'A': return q.times(q);
    default: {  // 1 - (1 - q^2)^2
      Dyadic s = q.times(q).one_minus();
      return s.times(s).one_minus();
    }
  }
}

}  // namespace

double schedule_accept_prob(const std::string& schedule, double p) {
  double q = p;
  for (char op : schedule) q = apply_op(op, q);
  return q;
}

ReadOnceFormula schedule_formula(const std::string& schedule) {
  ReadOnceFormula::Builder b;
  // recursive emit: layer index L means "composition of layers 0..L-1"
  auto emit = [&](auto&& self, size_t layers) -> uint32_t {
    if (layers == 0) return b.add_leaf();
    char op = schedule[layers - 1];  // outermost layer last in the string
    if (op == 'V') {
      uint32_t a1 = b.add_gate(ReadOnceFormula::kAnd, self(self, layers - 1), self(self, layers - 1));
      uint32_t a2 = b.add_gate(ReadOnceFormula::kAnd, self(self, layers - 1), self(self, layers - 1));
      return b.add_gate(ReadOnceFormula::kOr, a1, a2);
    }
    auto kind = op == 'A' ? ReadOnceFormula::kAnd : ReadOnceFormula::kOr;
    return b.add_gate(kind, self(self, layers - 1), self(self, layers - 1));
  };
  emit(emit, schedule.size());
  return std::move(b).take();
}

AmplifierPlan build_amplifier(double alpha, double beta, uint32_t n_target,
                              uint64_t max_k, uint64_t exact_cap) {
  if (!(alpha > 0.0 && alpha < beta && beta < 1.0))
    throw AmplifierError("build_amplifier: need 0 < alpha < beta < 1");
  if (n_target < 1 || n_target > 40)
    throw AmplifierError("build_amplifier: n_target out of range [1,40]");

  const double pstar = valiant_fixed_point();
  // Target slightly inside 2^-n so the double-driven schedule choice leaves
  // headroom for the exact comparison.
  const double tgt = 0.90 * std::ldexp(1.0, -static_cast<int>(n_target));

  std::string schedule;
  double a = alpha, b = beta;
  uint64_t k = 1;
  auto push = [&](char op) {
    schedule.push_back(op);
    a = apply_op(op, a);
    b = apply_op(op, b);
    k *= op_cost(op);
    if (k > max_k) {
      std::ostringstream oss;
      oss << "build_amplifier: leaf budget exceeded (k=" << k << " > max_k=" << max_k
          << ") at layer " << schedule.size() << " with alpha=" << a << " beta=" << b
          << "; inputs alpha=" << alpha << " beta=" << beta << " n_target=" << n_target;
      throw AmplifierError(oss.str());
    }
  };

  // (i) pre-balance to straddle the fixed point
  {
    std::string pre;
    double pa = 0, pb = 0;
    double margin = 0.04;
    if (!prebalance(alpha, beta, margin, pre, pa, pb) &&
        !prebalance(alpha, beta, margin = 0.005, pre, pa, pb)) {
      std::ostringstream oss;
      oss << "build_amplifier: could not straddle fixed point p*=" << pstar
          << " from alpha=" << alpha << " beta=" << beta
          << " with <=12 pre-balance layers; gap too small";
      throw AmplifierError(oss.str());
    }
    for (char op : pre) push(op);
  }

  // (ii) gadget layers until both ends are far from p*
  while (a > 0.01 || b < 0.99) {
    double before_gap = b - a;
    push('V');
    if (b - a <= before_gap && (a > 0.01 || b < 0.99)) {
      std::ostringstream oss;
      oss << "build_amplifier: gadget stopped widening the gap (alpha=" << a
          << " beta=" << b << " after " << schedule.size() << " layers)";
      throw AmplifierError(oss.str());
    }
  }

  // (iii) towers: fix whichever side is further from its target, measured
  // multiplicatively; squaring one side only doubles the other's defect.
  // The false-accept side gets a much deeper target: a couple of extra
  // squarings make observed double-openings vanishingly rare at Monte Carlo
  // scale, for a small constant factor in leaves.
  const double tgt_a = tgt * 1e-4;
  while (a >= tgt_a || (1.0 - b) >= tgt) {
    if (a / tgt_a >= (1.0 - b) / tgt) push('A'); else push('O');
  }

  AmplifierPlan plan;
  plan.schedule = schedule;
  plan.k = k;
  plan.alpha_out = a;
  plan.beta_out = b;

  if (k <= exact_cap) {
    Dyadic da = Dyadic::from_double(alpha), db = Dyadic::from_double(beta);
    for (char op : schedule) {
      da = apply_op_exact(op, da);
      db = apply_op_exact(op, db);
    }
    plan.exact_checked = true;
    plan.alpha_ok = da.less_than_pow2(n_target);
    plan.beta_ok = db.one_minus().less_than_pow2(n_target);
    plan.alpha_out_exact = da.decimal(30);
    plan.beta_out_exact = db.decimal(30);
  }
  if (k <= exact_cap || k <= (uint64_t{1} << 20)) {
    plan.formula = schedule_formula(schedule);
    plan.materialized = true;
  }
  return plan;
}

}  // namespace amp
