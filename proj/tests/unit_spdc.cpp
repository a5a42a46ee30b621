#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opo/error.hpp"
#include "opo/spdc.hpp"
#include "opo/units.hpp"

using namespace opo;

namespace {
ResonatorSpec paper_resonator() {
  ResonatorSpec r;
  r.alpha_db_per_cm = 0.049616342069;
  r.dispersion = calibrate(SellmeierModel::default_lithium_niobate_e(), r.length_cm, 1.8, 44.5);
  return r;
}

QpmSpec calibrated_qpm(const ResonatorSpec& r, const PumpSpec& p) {
  QpmSpec q;
  calibrate_qpm(q, r.dispersion, p);
  return q;
}
} // namespace

TEST_CASE("idler wavelength from energy conservation") {
  PumpSpec pump;
  CHECK(idler_wavelength_nm(pump, pump.degeneracy_nm()) ==
        doctest::Approx(pump.degeneracy_nm()).epsilon(1e-12));
  const double ls = 1559.5;
  const double li = idler_wavelength_nm(pump, ls);
  // 1/lambda_p = 1/lambda_s + 1/lambda_i must close exactly.
  CHECK(1.0 / pump.wavelength_nm ==
        doctest::Approx(1.0 / ls + 1.0 / li).epsilon(1e-12));
  CHECK(li > pump.degeneracy_nm());
  CHECK_THROWS_AS(idler_wavelength_nm(pump, pump.wavelength_nm), Error);
}

TEST_CASE("calibrated qpm has zero mismatch at degeneracy") {
  const ResonatorSpec r = paper_resonator();
  PumpSpec pump;
  const QpmSpec q = calibrated_qpm(r, pump);
  const double db0 = phase_mismatch(q, r.dispersion, pump, pump.degeneracy_nm(), q.phase_match_temp_c);
  CHECK(std::abs(db0) < 1e-6);
  CHECK(spdc_envelope(q, r.dispersion, pump, pump.degeneracy_nm(), q.phase_match_temp_c) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // Envelope is bounded and decays away from degeneracy.
  const double far = spdc_envelope(q, r.dispersion, pump, 1450.0, q.phase_match_temp_c);
  CHECK(far >= 0.0);
  CHECK(far < 1.0);
}

TEST_CASE("envelope is symmetric in signal/idler exchange") {
  const ResonatorSpec r = paper_resonator();
  PumpSpec pump;
  const QpmSpec q = calibrated_qpm(r, pump);
  const double ls = 1500.0;
  const double li = idler_wavelength_nm(pump, ls);
  const double a = spdc_envelope(q, r.dispersion, pump, ls, q.phase_match_temp_c);
  const double b = spdc_envelope(q, r.dispersion, pump, li, q.phase_match_temp_c);
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("cluster spectrum structure") {
  const ResonatorSpec r = paper_resonator();
  PumpSpec pump;
  const QpmSpec q = calibrated_qpm(r, pump);
  const ClusterSpectrum cs =
      cluster_spectrum(r, q, pump, q.phase_match_temp_c, 1559.0, 1561.2, 0.5, 2000);
  REQUIRE(cs.freq_thz.size() == cs.weight.size());
  REQUIRE(cs.freq_thz.size() >= 2);
  for (std::size_t i = 1; i < cs.freq_thz.size(); ++i) CHECK(cs.freq_thz[i] > cs.freq_thz[i - 1]);
  double wmax = 0.0;
  for (double w : cs.weight) {
    CHECK(w >= 0.0);
    wmax = std::max(wmax, w);
  }
  CHECK(wmax > 0.0);
  REQUIRE(!cs.clusters.empty());
  for (const auto& c : cs.clusters) {
    CHECK(c.hi_thz >= c.lo_thz); // single-point clusters collapse to zero width
    CHECK(c.lo_thz >= cs.freq_thz.front());
    CHECK(c.hi_thz <= cs.freq_thz.back());
  }
}

TEST_CASE("gm diagram combs straddle degeneracy") {
  const ResonatorSpec r = paper_resonator();
  PumpSpec pump;
  const GMDiagram gm = gm_diagram(r, pump, 128.6, 1559.5, 1560.5);
  REQUIRE(!gm.signal.freqs_thz.empty());
  CHECK(gm.detuning_mhz.size() == gm.signal.freqs_thz.size());
  CHECK(gm.fwhm_mhz == doctest::Approx(1800.0 / 15.4).epsilon(0.01));
  // Detunings are defined modulo the idler comb, so they live within half an FSR.
  for (double d : gm.detuning_mhz) CHECK(std::abs(d) <= 0.5 * 1800.0 * 1.01);
}

TEST_CASE("double resonance recurs at the mode-hop period") {
  const ResonatorSpec r = paper_resonator();
  PumpSpec pump;
  const QpmSpec q = calibrated_qpm(r, pump);
  const DoubleResonanceResult a = find_double_resonance(r, q, pump, 128.6, 0.35);
  CHECK(a.metric > 0.5); // near-perfect joint transmission exists in the scan
  // Metric at the optimum beats a detuned quarter-period point.
  const double detuned =
      double_resonance_metric(r, q, pump, a.temperature_c + 0.082, 1559.5, 1561.5);
  CHECK(a.metric > detuned);
}
