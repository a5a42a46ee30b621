#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opo/budget.hpp"
#include "opo/error.hpp"

using namespace opo;

TEST_CASE("itemized arm losses") {
  const LossBudget b = LossBudget::paper_default();
  const ArmLosses a = arm_losses(b);
  CHECK(a.db1 == doctest::Approx(10.8).epsilon(1e-12));
  CHECK(a.db2 == doctest::Approx(11.8).epsilon(1e-12));
  CHECK(a.survival1 == doctest::Approx(b.p_out * std::pow(10.0, -1.08)).epsilon(1e-12));
  CHECK(a.survival2 == doctest::Approx(0.02).epsilon(0.01)); // ~2% end to end
}

TEST_CASE("rate prediction matches the frozen closed forms") {
  const LossBudget b = LossBudget::paper_default();
  const RatePrediction r = predict_rates(6.6e6, b);
  CHECK(r.generated_hz == doctest::Approx(6.6e6));
  CHECK(r.singles1_cps == doctest::Approx(3637.52843542693).epsilon(1e-9));
  CHECK(r.coincidences_cps == doctest::Approx(4.826572012038427).epsilon(1e-9));
  CHECK(r.mu == doctest::Approx(0.017955942297547167).epsilon(1e-9));
  CHECK(r.brightness == doctest::Approx(17.670062539691283).epsilon(1e-9));
  CHECK(r.gate_capture > 0.999); // 50 ns gate swallows the Laplace peak
  CHECK(r.coincidences_ideal_cps > r.coincidences_cps);
}

TEST_CASE("paper headline numbers sit inside the quoted tolerances") {
  const LossBudget b = LossBudget::paper_default();
  const RatePrediction r = predict_rates(6.6e6, b);
  CHECK(std::abs(r.singles1_cps - 3400.0) / 3400.0 < 0.10);
  CHECK(std::abs(r.coincidences_cps - 5.2) / 5.2 < 0.15);
  CHECK(std::abs(r.mu - 0.02) / 0.02 < 0.25);
  CHECK(std::abs(r.brightness - 17.0) / 17.0 < 0.10);
}

TEST_CASE("forward/backward inversion closes") {
  const LossBudget b = LossBudget::paper_default();
  for (double pairs : {1.0e5, 6.6e6, 5.0e7}) {
    const RatePrediction r = predict_rates(pairs, b);
    const double back = infer_generated(r.singles1_cps, b.dark1_cps, b);
    CHECK(back == doctest::Approx(pairs).epsilon(1e-9));
  }
}

TEST_CASE("measured singles imply a generation rate near the quoted one") {
  const LossBudget b = LossBudget::paper_default();
  const double inferred = infer_generated(3400.0, 600.0, b);
  // Strict reading of the documented chain: within 25% of the quoted 6.6e6.
  CHECK(std::abs(inferred - 6.6e6) / 6.6e6 < 0.25);
}

TEST_CASE("accidental budget breakdown") {
  const LossBudget b = LossBudget::paper_default();
  const RatePrediction r = predict_rates(6.6e6, b);
  const AccidentalBreakdown a = accidental_budget(r, b, 6.6e6);
  CHECK(a.detector_noise_hz_per_ns == doctest::Approx(0.0345790688682246).epsilon(1e-9));
  CHECK(a.independent_pairs_hz_per_ns == doctest::Approx(0.03185797186966272).epsilon(1e-9));
  CHECK(a.total_hz_per_ns == doctest::Approx(a.detector_noise_hz_per_ns +
                                             a.after_pulse_hz_per_ns +
                                             a.independent_pairs_hz_per_ns).epsilon(1e-12));
  // Within the quoted factors of the measured densities.
  const double f1 = a.detector_noise_hz_per_ns / 0.047;
  const double f2 = a.independent_pairs_hz_per_ns / 0.034;
  CHECK(f1 > 1.0 / 1.5);
  CHECK(f1 < 1.5);
  CHECK(f2 > 1.0 / 1.3);
  CHECK(f2 < 1.3);
}

TEST_CASE("sim config round trip") {
  const LossBudget b = LossBudget::paper_default();
  const SimConfig s = b.to_sim();
  const LossBudget back = LossBudget::from_sim(s, b.pump_mw);
  CHECK(back.eta1 == doctest::Approx(b.eta1));
  CHECK(back.eta2 == doctest::Approx(b.eta2));
  CHECK(back.gate_width_ns == doctest::Approx(b.gate_width_ns));
  CHECK(arm_losses(back).db1 == doctest::Approx(10.8));
  CHECK(arm_losses(back).db2 == doctest::Approx(11.8));
}

TEST_CASE("validation rejects nonsense") {
  LossBudget b = LossBudget::paper_default();
  b.eta1 = 1.5;
  CHECK_THROWS_AS(b.validate(), Error);
  b = LossBudget::paper_default();
  b.p_out = -0.1;
  CHECK_THROWS_AS(b.validate(), Error);
  b = LossBudget::paper_default();
  CHECK_THROWS_AS(predict_rates(-1.0, b), Error);
}
