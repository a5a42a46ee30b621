#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "opo/lock.hpp"

using namespace opo;

namespace {
LockState tuned_state(const LockPlant& plant) {
  LockState st;
  st.peak_cps = plant.peak_cps;
  st.setpoint_cps = 0.575 * plant.peak_cps;
  st.kp = 0.001;
  st.ki = 0.0001;
  st.kd = 0.0;
  return st;
}
} // namespace

TEST_CASE("fringe shape") {
  LockPlant plant;
  const double peak = fringe_counts(plant, plant.t_resonance_c);
  CHECK(peak == doctest::Approx(plant.peak_cps).epsilon(1e-9));
  // Half maximum at half the FWHM off resonance.
  const double half = fringe_counts(plant, plant.t_resonance_c + 0.5 * plant.fringe_fwhm_c);
  CHECK(half == doctest::Approx(0.5 * plant.peak_cps).epsilon(0.02));
  // Periodic in the fringe period.
  const double next = fringe_counts(plant, plant.t_resonance_c + plant.fringe_period_c);
  CHECK(next == doctest::Approx(peak).epsilon(1e-6));
  // Drift offset shifts the fringe.
  CHECK(fringe_counts(plant, plant.t_resonance_c + 0.01, 0.01) ==
        doctest::Approx(peak).epsilon(1e-6));
}

TEST_CASE("lock_step sign and rejection of bad samples") {
  LockPlant plant;
  LockState st = tuned_state(plant);
  const double h0 = st.heater_c;
  // Counts above setpoint (too close to the peak on a side-of-fringe lock):
  // the controller must push away, counts below must pull back, with opposite signs.
  LockState a = st;
  const double up = lock_step(a, st.setpoint_cps * 1.1, 0.2);
  LockState b = st;
  const double dn = lock_step(b, st.setpoint_cps * 0.9, 0.2);
  CHECK((up - h0) * (dn - h0) < 0.0);

  LockState c = st;
  const double keep = lock_step(c, std::numeric_limits<double>::quiet_NaN(), 0.2);
  CHECK(keep == h0);
  CHECK(c.integrator == st.integrator);
}

TEST_CASE("integrator anti-windup clamp") {
  LockPlant plant;
  LockState st = tuned_state(plant);
  for (int i = 0; i < 100000; ++i) lock_step(st, 0.0, 0.2);
  CHECK(std::abs(st.ki * st.integrator) <= st.integrator_limit + 1e-12);
}

TEST_CASE("closed loop holds the fringe under drift") {
  LockPlant plant;
  plant.drift_c_per_min = 0.005;
  LockState st = tuned_state(plant);
  const LockTrace tr = lock_run(st, plant, 180.0, 0.2, 7);
  CHECK(tr.max_excursion_c < st.stability_bound_c);
  CHECK(tr.mean_counts_cps == doctest::Approx(0.575 * plant.peak_cps).epsilon(0.02));
  CHECK(tr.settle_time_s < 60.0);
  REQUIRE(tr.time_s.size() == tr.temp_c.size());
  REQUIRE(tr.time_s.size() == tr.counts_cps.size());
}

TEST_CASE("lock_run is deterministic per seed") {
  LockPlant plant;
  plant.drift_c_per_min = 0.005;
  LockState st = tuned_state(plant);
  const LockTrace a = lock_run(st, plant, 30.0, 0.2, 11);
  const LockTrace b = lock_run(st, plant, 30.0, 0.2, 11);
  const LockTrace c = lock_run(st, plant, 30.0, 0.2, 12);
  REQUIRE(a.counts_cps.size() == b.counts_cps.size());
  CHECK(a.counts_cps == b.counts_cps);
  CHECK(a.counts_cps != c.counts_cps);
}
