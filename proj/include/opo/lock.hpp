#pragma once

#include <cstdint>
#include <vector>

namespace opo {

// Side-of-fringe PID temperature lock. Counts feed back on the heater; the
// setpoint sits at 10^(-2.4/10) ~ 0.575 of the fringe peak.
struct LockState {
  double setpoint_cps = 0.0;       // counts/s
  double peak_cps = 0.0;
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double heater_c = 0.0;           // current heater command, degC
  double integrator = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
  double integrator_limit = 0.05;  // degC equivalent anti-windup clamp
  double stability_bound_c = 1e-3;
};

// One PID update from a counts/s measurement; returns the new heater command.
// Non-finite measurements are rejected and leave the state unchanged.
double lock_step(LockState& state, double measured_cps, double dt_s);

struct LockPlant {
  double thermal_tau_s = 5.0;        // first-order heater -> sample lag
  double fringe_period_c = 0.3283;   // temperature distance between fringes
  double fringe_fwhm_c = 0.021318;   // period / finesse, linewidth in temperature
  double peak_cps = 3400.0;
  double drift_c_per_min = 0.0;
  double t_resonance_c = 128.6;      // fringe maximum at t = 0
};

struct LockTrace {
  std::vector<double> time_s;
  std::vector<double> temp_c;        // actual sample temperature
  std::vector<double> detuning_c;    // sample temperature minus (drifting) lock target
  std::vector<double> counts_cps;
  double settle_time_s = 0.0;
  double max_excursion_c = 0.0;      // max |detuning - mean| after settling
  double mean_counts_cps = 0.0;      // after settling
};

// Airy-shaped fringe signal vs sample temperature.
double fringe_counts(const LockPlant& plant, double temp_c, double drift_offset_c = 0.0);

// Closed-loop simulation with sqrt(N) counting noise; deterministic per seed.
LockTrace lock_run(LockState state, const LockPlant& plant, double duration_s, double dt_s,
                   std::uint64_t seed);

} // namespace opo
