#include "opo/budget.hpp"

#include <cmath>

#include "opo/error.hpp"

namespace opo {

LossBudget LossBudget::paper_default() {
  LossBudget b;
  b.chain = OpticalChain::paper_default();
  return b;
}

void LossBudget::validate() const {
  chain.validate();
  if (eta1 < 0 || eta1 > 1 || eta2 < 0 || eta2 > 1) throw_config("efficiencies must be in [0,1]");
  if (p_out < 0 || p_out > 1) throw_config("escape probability must be in [0,1]");
  if (dark1_cps < 0 || dark2_prob_per_ns < 0) throw_config("dark rates must be >= 0");
  if (dead1_us < 0 || dead2_us < 0) throw_config("dead times must be >= 0");
  if (!(gate_width_ns > 0) || !(delta_nu_mhz > 0) || !(pump_mw > 0)) {
    throw_config("gate width, bandwidth and pump power must be positive");
  }
}

LossBudget LossBudget::from_sim(const SimConfig& cfg, double pump_mw) {
  LossBudget b;
  b.chain = cfg.chain;
  b.p_out = cfg.cavity_escape;
  b.eta1 = cfg.detector1.efficiency;
  b.eta2 = cfg.detector2.efficiency;
  b.dark1_cps = cfg.detector1.dark_rate_cps;
  b.dark2_prob_per_ns = cfg.detector2.dark_prob_per_ns;
  b.dead1_us = cfg.detector1.dead_time_us;
  b.dead2_us = cfg.detector2.dead_time_us;
  b.after_pulse_prob = cfg.detector1.after_pulse_prob;
  b.after_pulse_decay_us = cfg.detector1.after_pulse_decay_us;
  b.gate_width_ns = cfg.detector2.gate_width_ns;
  b.delta_nu_mhz = cfg.delta_nu_mhz;
  b.pump_mw = pump_mw;
  return b;
}

SimConfig LossBudget::to_sim() const {
  SimConfig cfg;
  cfg.chain = chain;
  cfg.cavity_escape = p_out;
  cfg.delta_nu_mhz = delta_nu_mhz;
  cfg.detector1 = DetectorSpec::paper_free_running();
  cfg.detector1.efficiency = eta1;
  cfg.detector1.dark_rate_cps = dark1_cps;
  cfg.detector1.dead_time_us = dead1_us;
  cfg.detector1.after_pulse_prob = after_pulse_prob;
  cfg.detector1.after_pulse_decay_us = after_pulse_decay_us;
  cfg.detector2 = DetectorSpec::paper_gated();
  cfg.detector2.efficiency = eta2;
  cfg.detector2.dark_prob_per_ns = dark2_prob_per_ns;
  cfg.detector2.dead_time_us = dead2_us;
  cfg.detector2.gate_width_ns = gate_width_ns;
  return cfg;
}

ArmLosses arm_losses(const LossBudget& b) {
  b.validate();
  ArmLosses a;
  a.db1 = b.chain.arm_db(1);
  a.db2 = b.chain.arm_db(2);
  a.survival1 = b.chain.survival(1, b.p_out);
  a.survival2 = b.chain.survival(2, b.p_out);
  return a;
}

namespace {

// Multiplicative excess from after-pulses that survive the dead time.
double after_pulse_factor(const LossBudget& b) {
  if (b.after_pulse_prob <= 0) return 1.0;
  return 1.0 + b.after_pulse_prob * std::exp(-b.dead1_us / b.after_pulse_decay_us);
}

} // namespace

RatePrediction predict_rates(double pairs_hz, const LossBudget& b) {
  b.validate();
  if (pairs_hz < 0) throw_domain("pair rate must be >= 0");
  const ArmLosses a = arm_losses(b);
  const double p1 = a.survival1 * b.eta1;
  const double p2 = a.survival2 * b.eta2;

  RatePrediction r;
  r.generated_hz = pairs_hz;

  // Channel 1: photons + darks, after-pulse excess, non-paralyzable dead time.
  const double raw1 = pairs_hz * p1 + b.dark1_cps;
  const double in1 = raw1 * after_pulse_factor(b);
  const double tau1 = b.dead1_us * 1e-6;
  r.singles1_cps = in1 / (1.0 + in1 * tau1);
  const double d1 = 1.0 / (1.0 + in1 * tau1); // survival of any given ch1 event

  // The partner photon must land inside the +/- w/2 gate; delays are Laplace
  // with mean |dt| = 1/(2 pi dnu).
  const double scale_ns = 1e9 / (2.0 * M_PI * b.delta_nu_mhz * 1e6);
  r.gate_capture = 1.0 - std::exp(-0.5 * b.gate_width_ns / scale_ns);

  const double trigger_real = pairs_hz * p1 * d1; // registered real ch1 photons
  const double triggers_total = r.singles1_cps;
  const double coinc_pre = trigger_real * p2 * r.gate_capture;
  const double acc_per_gate =
      b.gate_width_ns * (pairs_hz * p2 * 1e-9 + b.dark2_prob_per_ns);
  const double in2 = coinc_pre + triggers_total * acc_per_gate;
  const double tau2 = b.dead2_us * 1e-6;
  const double d2 = 1.0 / (1.0 + in2 * tau2);
  r.singles2_cps = in2 * d2;
  r.coincidences_cps = coinc_pre * d2;
  r.coincidences_ideal_cps = pairs_hz * p1 * p2 * r.gate_capture;

  r.brightness = r.coincidences_ideal_cps / (b.eta1 * b.eta2 * b.delta_nu_mhz * b.pump_mw);
  r.mu = pairs_hz / (M_PI * b.delta_nu_mhz * 1e6); // R * tau_coh
  return r;
}

double infer_generated(double singles1_cps, double dark1_cps, const LossBudget& b) {
  b.validate();
  const double tau1 = b.dead1_us * 1e-6;
  if (!(singles1_cps * tau1 < 1.0)) throw_domain("singles rate saturates the dead time");
  const double in1 = singles1_cps / (1.0 - singles1_cps * tau1);
  const double raw1 = in1 / after_pulse_factor(b);
  if (!(raw1 > dark1_cps)) throw_domain("singles do not exceed the dark rate");
  const ArmLosses a = arm_losses(b);
  return (raw1 - dark1_cps) / (a.survival1 * b.eta1);
}

AccidentalBreakdown accidental_budget(const RatePrediction& rates, const LossBudget& b,
                                      double pairs_hz) {
  b.validate();
  const ArmLosses a = arm_losses(b);
  const double p1 = a.survival1 * b.eta1;
  const double p2 = a.survival2 * b.eta2;
  const double in1 = (pairs_hz * p1 + b.dark1_cps) * after_pulse_factor(b);
  const double d1 = 1.0 / (1.0 + in1 * b.dead1_us * 1e-6);

  const double real1 = pairs_hz * p1 * d1;           // Hz
  const double dark1 = b.dark1_cps * d1;             // Hz
  const double s2_density = pairs_hz * p2 * 1e-9;    // per ns
  const double d2_density = b.dark2_prob_per_ns;     // per ns
  const double ap_rate = (real1 + dark1) * b.after_pulse_prob *
                         std::exp(-b.dead1_us / b.after_pulse_decay_us);

  AccidentalBreakdown out;
  out.detector_noise_hz_per_ns =
      dark1 * s2_density + real1 * d2_density + dark1 * d2_density;
  out.independent_pairs_hz_per_ns = real1 * s2_density;
  out.after_pulse_hz_per_ns = ap_rate * (s2_density + d2_density);
  out.total_hz_per_ns = out.detector_noise_hz_per_ns + out.independent_pairs_hz_per_ns +
                        out.after_pulse_hz_per_ns;
  (void)rates;
  return out;
}

} // namespace opo
