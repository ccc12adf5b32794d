#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "amp/formula.hpp"

namespace amp {

// Gadget q -> 1 - (1-q^2)^2 = OR(AND(q,q), AND(q,q)); its interior fixed
// point p* = (sqrt(5)-1)/2 is repelling, which is what pulls a straddling
// pair (alpha, beta) apart.
double valiant_gadget(double q);
double valiant_fixed_point();

struct AmplifierPlan {
  // Layer schedule applied innermost-first: 'O' = OR pair, 'A' = AND pair,
  // 'V' = Valiant gadget (4 copies).
  std::string schedule;
  uint64_t k = 1;  // leaf count
  double alpha_out = 0.0, beta_out = 0.0;  // double composition
  // Exact dyadic-rational composition, only when k <= exact_cap.
  bool exact_checked = false;
  bool alpha_ok = false;  // exact alpha_out <  2^-n_target
  bool beta_ok = false;   // exact beta_out  > 1 - 2^-n_target
  std::string alpha_out_exact, beta_out_exact;  // decimal strings, ~30 digits
  ReadOnceFormula formula;
  bool materialized = false;
};

struct AmplifierError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Builds a read-once monotone formula moving the gap (alpha, beta),
// 0 < alpha < beta < 1, to (< 2^-n_target, > 1 - 2^-n_target):
// pre-balancing AND/OR layers straddle the gadget fixed point, gadget layers
// blow the gap open, and final AND/OR towers push past the targets.  Throws
// AmplifierError with diagnostics if more than max_k leaves would be needed.
AmplifierPlan build_amplifier(double alpha, double beta, uint32_t n_target,
                              uint64_t max_k = 1000000,
                              uint64_t exact_cap = (uint64_t{1} << 16));

// Composition of a schedule at leaf probability p, innermost layer first.
double schedule_accept_prob(const std::string& schedule, double p);

// Materializes the tree realizing a schedule (outermost layer at the root).
ReadOnceFormula schedule_formula(const std::string& schedule);

}  // namespace amp
