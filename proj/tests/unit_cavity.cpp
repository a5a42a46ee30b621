#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "opo/cavity.hpp"
#include "opo/error.hpp"
#include "opo/units.hpp"

using namespace opo;

namespace {
ResonatorSpec paper_resonator() {
  ResonatorSpec r;
  r.alpha_db_per_cm = 0.049616342069; // calibrated to finesse 15.4
  r.dispersion = calibrate(SellmeierModel::default_lithium_niobate_e(), r.length_cm, 1.8, 44.5);
  return r;
}
} // namespace

TEST_CASE("finesse relation") {
  CHECK(finesse_from_rho(0.8157499250724067) == doctest::Approx(15.4).epsilon(1e-9));
  const ResonatorSpec r = paper_resonator();
  CHECK(finesse(r) == doctest::Approx(15.4).epsilon(1e-6));
  // Quoted loss estimate of 0.06 dB/cm gives a visibly lower finesse.
  ResonatorSpec r6 = r;
  r6.alpha_db_per_cm = 0.06;
  CHECK(finesse(r6) == doctest::Approx(14.7733).epsilon(1e-4));
}

TEST_CASE("loss_from_finesse inverts finesse") {
  const double alpha = loss_from_finesse(15.4, 0.85, 0.85, 3.6);
  CHECK(alpha == doctest::Approx(0.049616342069).epsilon(1e-8));
  CHECK_THROWS_AS(loss_from_finesse(25.0, 0.85, 0.85, 3.6), Error); // above lossless bound
}

TEST_CASE("escape probability") {
  // Lossless symmetric cavity: sqrt(1)(1-R)/(1-R^2) = 1/(1+R).
  CHECK(escape_probability(1.0, 0.85) == doctest::Approx(1.0 / 1.85).epsilon(1e-12));
  CHECK(escape_probability(0.9515, 0.85) == doctest::Approx(0.42302539435).epsilon(1e-9));
  CHECK_THROWS_AS(escape_probability(0.0, 0.85), Error);
  CHECK_THROWS_AS(escape_probability(1.2, 0.85), Error);
  CHECK_THROWS_AS(escape_probability(0.95, 1.0), Error);
}

TEST_CASE("transmission peaks are unit-normalized only for lossless symmetric cavities") {
  const ResonatorSpec r = paper_resonator();
  const ModeComb comb = mode_comb(r, 128.6, 1559.95, 1560.05);
  REQUIRE(comb.freqs_thz.size() >= 4);
  for (double nu : comb.freqs_thz) {
    const double t = transmission(r, nu, 128.6);
    CHECK(t > 0.0);
    CHECK(t <= 1.0);
    // Peak value from the Airy formula at resonance.
    const double rho = std::sqrt(r.r1 * r.r2) * r.t_pass();
    const double tpk = (1 - r.r1) * (1 - r.r2) * r.t_pass() / ((1 - rho) * (1 - rho));
    CHECK(t == doctest::Approx(tpk).epsilon(1e-5));
  }
}

TEST_CASE("mode comb spacing matches the calibrated FSR") {
  const ResonatorSpec r = paper_resonator();
  const ModeComb comb = mode_comb(r, 128.6, 1559.5, 1560.5);
  // 1 nm at 1560 nm is 123.19 GHz; at 1.8 GHz spacing that is 68-69 modes.
  CHECK(comb.freqs_thz.size() >= 68);
  CHECK(comb.freqs_thz.size() <= 70);
  for (double g : comb.fsr_ghz) CHECK(g == doctest::Approx(1.8).epsilon(5e-3));
  CHECK(comb.fwhm_mhz == doctest::Approx(1800.0 / 15.4).epsilon(1e-2));
}

TEST_CASE("mirror curve interpolation and override") {
  const std::string path = "mirror_curve_test.txt";
  {
    std::ofstream out(path);
    out << "# wavelength_nm transmittance\n";
    out << "1500 0.20\n1600 0.10\n";
  }
  const MirrorCurve mc = MirrorCurve::load(path);
  CHECK(mc.at(1500.0) == doctest::Approx(0.80));
  CHECK(mc.at(1550.0) == doctest::Approx(0.85));
  CHECK(mc.at(1600.0) == doctest::Approx(0.90));
  // Clamped outside the tabulated range.
  CHECK(mc.at(1400.0) == doctest::Approx(0.80));

  ResonatorSpec r = paper_resonator();
  r.mirror_curve = mc;
  CHECK(r.reflectivity(1550.0) == doctest::Approx(0.85));
}

TEST_CASE("validation rejects nonphysical resonators") {
  ResonatorSpec r = paper_resonator();
  r.r1 = 1.2;
  CHECK_THROWS_AS(r.validate(), Error);
  r = paper_resonator();
  r.length_cm = -1.0;
  CHECK_THROWS_AS(r.validate(), Error);
  r = paper_resonator();
  r.alpha_db_per_cm = -0.1;
  CHECK_THROWS_AS(r.validate(), Error);
}
