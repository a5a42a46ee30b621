#include "opo/lock.hpp"

#include <algorithm>
#include <cmath>

#include "opo/error.hpp"
#include "opo/rng.hpp"

namespace opo {

double lock_step(LockState& state, double measured_cps, double dt_s) {
  if (!(dt_s > 0)) throw_domain("lock_step needs dt > 0");
  if (!std::isfinite(measured_cps)) return state.heater_c; // reject, state unchanged

  const double scale = state.peak_cps > 0 ? state.peak_cps : 1.0;
  const double error = (measured_cps - state.setpoint_cps) / scale;
  state.integrator += error * dt_s;
  state.integrator = std::clamp(state.integrator,
                                -state.integrator_limit / std::max(state.ki, 1e-12),
                                state.integrator_limit / std::max(state.ki, 1e-12));
  double derivative = 0.0;
  if (state.has_prev) derivative = (error - state.prev_error) / dt_s;
  state.prev_error = error;
  state.has_prev = true;

  // Lock point on the rising flank: counts above setpoint means the sample sits
  // too close to the fringe peak, so the heater backs off.
  const double u = state.kp * error + state.ki * state.integrator + state.kd * derivative;
  state.heater_c -= u;
  return state.heater_c;
}

double fringe_counts(const LockPlant& plant, double temp_c, double drift_offset_c) {
  const double x = (temp_c - drift_offset_c - plant.t_resonance_c) / plant.fringe_period_c;
  const double finesse = plant.fringe_period_c / plant.fringe_fwhm_c;
  const double coef = 4.0 * finesse * finesse / (M_PI * M_PI);
  const double s = std::sin(M_PI * x);
  return plant.peak_cps / (1.0 + coef * s * s);
}

LockTrace lock_run(LockState state, const LockPlant& plant, double duration_s, double dt_s,
                   std::uint64_t seed) {
  if (!(dt_s > 0) || duration_s < 0) throw_domain("lock_run needs dt > 0 and duration >= 0");
  Rng rng(seed);
  LockTrace trace;

  // Start on the flank below resonance where counts rise with temperature.
  const double frac = state.peak_cps > 0 ? state.setpoint_cps / state.peak_cps : 0.575;
  const double finesse = plant.fringe_period_c / plant.fringe_fwhm_c;
  const double coef = 4.0 * finesse * finesse / (M_PI * M_PI);
  const double s2 = (1.0 / frac - 1.0) / coef;
  const double lock_offset = -plant.fringe_period_c / M_PI * std::asin(std::sqrt(s2));

  double temp = plant.t_resonance_c + lock_offset; // start at the nominal lock point
  state.heater_c = temp;
  const int steps = static_cast<int>(std::llround(duration_s / dt_s));
  trace.time_s.reserve(static_cast<size_t>(steps));
  const double settle = std::min(0.3 * duration_s, 60.0);

  for (int i = 0; i < steps; ++i) {
    const double t = i * dt_s;
    const double drift = plant.drift_c_per_min * t / 60.0;
    // Counting measurement over dt.
    const double mean_counts = fringe_counts(plant, temp, drift) * dt_s;
    const double measured = static_cast<double>(rng.poisson(mean_counts)) / dt_s;
    lock_step(state, measured, dt_s);
    // First-order thermal plant.
    temp += (state.heater_c - temp) * (1.0 - std::exp(-dt_s / plant.thermal_tau_s));

    trace.time_s.push_back(t);
    trace.temp_c.push_back(temp);
    trace.detuning_c.push_back(temp - drift - (plant.t_resonance_c + lock_offset));
    trace.counts_cps.push_back(measured);
  }

  trace.settle_time_s = settle;
  double sum_det = 0.0, sum_counts = 0.0;
  int n_settled = 0;
  for (size_t i = 0; i < trace.time_s.size(); ++i) {
    if (trace.time_s[i] < settle) continue;
    sum_det += trace.detuning_c[i];
    sum_counts += trace.counts_cps[i];
    ++n_settled;
  }
  if (n_settled > 0) {
    const double mean_det = sum_det / n_settled;
    trace.mean_counts_cps = sum_counts / n_settled;
    double max_exc = 0.0;
    for (size_t i = 0; i < trace.time_s.size(); ++i) {
      if (trace.time_s[i] < settle) continue;
      max_exc = std::max(max_exc, std::abs(trace.detuning_c[i] - mean_det));
    }
    trace.max_excursion_c = max_exc;
  }
  return trace;
}

} // namespace opo
