#pragma once

#include "opo/montecarlo.hpp"

namespace opo {

// Everything needed for the closed-form rate accounting; mirrors SimConfig so
// predictions and simulations can share one configuration.
struct LossBudget {
  OpticalChain chain;
  double p_out = 0.30199517204020161; // cavity escape, 10^(-0.52)
  double eta1 = 0.021;
  double eta2 = 0.078;
  double dark1_cps = 600.0;
  double dark2_prob_per_ns = 8.0e-6;
  double dead1_us = 30.0;
  double dead2_us = 10.0;
  double after_pulse_prob = 0.008;
  double after_pulse_decay_us = 10.0;
  double gate_width_ns = 50.0;
  double delta_nu_mhz = 117.0;
  double pump_mw = 1.6;

  static LossBudget paper_default();
  void validate() const;

  static LossBudget from_sim(const SimConfig& cfg, double pump_mw);
  SimConfig to_sim() const;
};

struct ArmLosses {
  double db1 = 0.0;
  double db2 = 0.0;
  double survival1 = 0.0; // p_out folded in
  double survival2 = 0.0;
};
ArmLosses arm_losses(const LossBudget& b);

struct RatePrediction {
  double generated_hz = 0.0;  // pairs/s inside the filter window
  double singles1_cps = 0.0;  // registered, dead-time and after-pulse included
  double singles2_cps = 0.0;  // registered clicks on the gated channel
  double coincidences_cps = 0.0;
  double coincidences_ideal_cps = 0.0; // no dead time, used for brightness
  double gate_capture = 0.0;  // Laplace mass inside the coincidence gate
  double brightness = 0.0;    // pairs/(s*MHz*mW), efficiency-corrected
  double mu = 0.0;            // pairs per coherence time
};
RatePrediction predict_rates(double pairs_hz, const LossBudget& b);

// Inverts predict_rates' singles1 exactly (dead time and after-pulse factor
// included) so the forward/backward round trip closes.
double infer_generated(double singles1_cps, double dark1_cps, const LossBudget& b);

struct AccidentalBreakdown {
  double detector_noise_hz_per_ns = 0.0;
  double after_pulse_hz_per_ns = 0.0;
  double independent_pairs_hz_per_ns = 0.0;
  double total_hz_per_ns = 0.0;
};
AccidentalBreakdown accidental_budget(const RatePrediction& rates, const LossBudget& b,
                                      double pairs_hz);

} // namespace opo
