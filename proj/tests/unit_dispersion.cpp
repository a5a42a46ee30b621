#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "opo/dispersion.hpp"
#include "opo/error.hpp"
#include "opo/units.hpp"

using namespace opo;

TEST_CASE("bulk Sellmeier reproduces reference values") {
  const auto m = SellmeierModel::default_lithium_niobate_e();
  // Independently evaluated from the published coefficient set.
  CHECK(m.index(1.560, 128.6) == doctest::Approx(2.142146672435).epsilon(1e-9));
  CHECK(m.index(0.780027, 128.6) == doctest::Approx(2.183479605157).epsilon(1e-9));
  CHECK(m.index(1.560, 24.5) == doctest::Approx(2.137574755149).epsilon(1e-9));
  CHECK(m.index(1.0, 100.0) == doctest::Approx(2.162860352543).epsilon(1e-9));
}

TEST_CASE("bulk Sellmeier rejects out-of-range input") {
  const auto m = SellmeierModel::default_lithium_niobate_e();
  CHECK_THROWS_AS(m.index(0.2, 100.0), Error);
  CHECK_THROWS_AS(m.index(1.5, 500.0), Error);
}

TEST_CASE("model file round trip") {
  const std::string path = "sellmeier_test_model.txt";
  {
    std::ofstream out(path);
    out << "name test\n";
    out << "coeffs 5.35583 0.100473 0.20692 100.0 11.34927 1.5334e-2 "
           "4.629e-7 3.862e-8 -0.89e-8 2.657e-5\n";
    out << "lambda_um 0.4 5.0\n";
    out << "temp_c 20 250\n";
  }
  const auto m = SellmeierModel::load(path);
  CHECK(m.name == "test");
  CHECK(m.index(1.560, 128.6) ==
        doctest::Approx(SellmeierModel::default_lithium_niobate_e().index(1.560, 128.6)));
  CHECK_THROWS_AS(SellmeierModel::load("no_such_file.txt"), Error);
}

TEST_CASE("calibration hits the FSR target") {
  const auto bulk = SellmeierModel::default_lithium_niobate_e();
  const auto wg = calibrate(bulk, 3.6, 1.8, 44.5);
  const double ng = wg.group_index(1560.0, 128.6);
  const double fsr_ghz = kSpeedOfLight / (2.0 * ng * 0.036) / 1e9;
  CHECK(fsr_ghz == doctest::Approx(1.8).epsilon(1e-6));
  // Linear delta-n shifts the group index without touching curvature much.
  CHECK(wg.delta_n_slope == doctest::Approx(-0.08068671).epsilon(1e-4));
}

TEST_CASE("calibration hits the tuning target") {
  const auto wg = calibrate(SellmeierModel::default_lithium_niobate_e(), 3.6, 1.8, 44.5);
  // Resonance condition: lambda_res tracks n/m; d(lambda)/dT = lambda (dn/dT)/n_g.
  const double dn_dt = wg.dn_dt(1560.0, 128.6);
  const double ng = wg.group_index(1560.0, 128.6);
  const double tuning_pm_per_c = 1560.0e-9 * dn_dt / ng * 1e12;
  CHECK(tuning_pm_per_c == doctest::Approx(44.5).epsilon(1e-4));
  CHECK(wg.thermo_scale == doctest::Approx(1.30921591).epsilon(1e-4));
}

TEST_CASE("group index from finite differences is consistent") {
  const auto wg = calibrate(SellmeierModel::default_lithium_niobate_e(), 3.6, 1.8, 44.5);
  const double lam = 1540.0;
  const double h = 0.01; // nm
  const double n0 = wg.index(lam - h, 128.6), n1 = wg.index(lam + h, 128.6);
  const double ng_fd = wg.index(lam, 128.6) - lam * (n1 - n0) / (2.0 * h);
  CHECK(wg.group_index(lam, 128.6) == doctest::Approx(ng_fd).epsilon(1e-6));
}
