#pragma once

#include <cstdint>
#include <string>

#include "opo/budget.hpp"
#include "opo/cavity.hpp"
#include "opo/montecarlo.hpp"
#include "opo/spdc.hpp"

namespace opo {

// Flat, fully-defaulted run configuration shared by the CLI, the simulator
// and the budget. Text format: one `key = value` per line, `#` comments.
struct RunConfig {
  // resonator
  double length_cm = 3.6;
  double r1 = 0.85;
  double r2 = 0.85;
  // Calibrated against the measured finesse of 15.4 (the quoted 0.06 dB/cm
  // estimate gives 14.8); see loss_from_finesse.
  double alpha_db_per_cm = 0.049616342069;

  // quasi-phase matching / pump
  double qpm_period_um = 16.6;
  double qpm_temp_c = 128.6;
  double pump_nm = 780.027;
  double pump_mw = 1.6;
  double pump_linewidth_hz = 1e5;

  // dispersion calibration targets
  double target_fsr_ghz = 1.8;
  double target_tuning_pm_per_c = 44.5;

  // simulation
  double pair_rate_hz = 6.6e6;
  double delta_nu_mhz = 117.0;
  double duration_s = 100.0;
  std::uint64_t seed = 42;
  double slab_s = 10.0;

  // chain stages as "label:dB,label:dB,..."
  std::string chain_arm1 = "silicon-filter:0.4,fibre-coupling:5.2,10pm-filter:2.8,lock-penalty:2.4";
  std::string chain_arm2 = "silicon-filter:0.4,fibre-coupling:5.2,10pm-filter:3.8,lock-penalty:2.4";
  double cavity_escape = 0.30199517204020161;

  // detectors
  double det1_efficiency = 0.021;
  double det1_dark_cps = 600.0;
  double det1_dead_us = 30.0;
  double det1_afterpulse_prob = 0.008;
  double det1_afterpulse_decay_us = 10.0;
  double det2_efficiency = 0.078;
  double det2_dark_per_ns = 8.0e-6;
  double det2_dead_us = 10.0;
  double det2_gate_ns = 50.0;
  double det2_gate_center_ns = 0.0;

  // folded Franson interferometer
  double franson_enabled = 0.0;
  double franson_delay_ns = 10.0;
  double franson_v_net = 0.95;
  double franson_phase_rad = 0.0;
  double franson_gate_ns = 50.0;

  // analysis
  double hist_bin_ns = 0.263;
  double hist_span_ns = 20.0;
  double franson_window_ns = 1.2;

  // lock
  double lock_setpoint_frac = 0.575;
  double lock_drift_c_per_min = 0.005;

  static RunConfig paper_default() { return RunConfig{}; }
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  std::string serialize() const;
  std::uint64_t hash() const; // FNV-1a over serialize()

  // Derived module configurations.
  SimConfig sim() const;
  LossBudget budget() const;
  ResonatorSpec resonator() const; // dispersion calibrated to the targets
  QpmSpec qpm() const;
  PumpSpec pump() const;
};

} // namespace opo
