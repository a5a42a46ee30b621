#pragma once

#include <string>
#include <vector>

namespace opo {

// Temperature-dependent Sellmeier form
//   n^2 = a1 + b1 f + (a2 + b2 f)/(l^2 - (a3 + b3 f)^2) + (a4 + b4 f)/(l^2 - a5^2) - a6 l^2
// with l the vacuum wavelength in um and f = (T - 24.5)(T + 570.82), T in degC.
struct SellmeierModel {
  std::string name;
  std::vector<double> coeffs; // a1 a2 a3 a4 a5 a6 b1 b2 b3 b4
  double lambda_min_um = 0.4;
  double lambda_max_um = 5.0;
  double temp_min_c = 20.0;
  double temp_max_c = 250.0;

  double index(double lambda_um, double temp_c) const; // bulk n(lambda, T), range-checked

  // Built-in default: congruent lithium niobate, extraordinary ray.
  static SellmeierModel default_lithium_niobate_e();
  // Schema: "name <id>", "coeffs <10 numbers>", "lambda_um <min> <max>", "temp_c <min> <max>".
  static SellmeierModel load(const std::string& path);
};

// Bulk Sellmeier plus a waveguide effective-index correction and a thermo-optic
// scale, calibrated against the measured cavity FSR and temperature tuning rate.
struct WaveguideIndexModel {
  SellmeierModel bulk = SellmeierModel::default_lithium_niobate_e();
  // delta_n(lambda) = offset + slope * (lambda_um - lambda_ref_um).
  double delta_n_offset = 0.0;
  double delta_n_slope = 0.0; // per um; a linear term shifts the group index by a constant
  double lambda_ref_um = 1.560;
  double thermo_scale = 1.0;  // scales dn/dT about temp_ref_c
  double temp_ref_c = 128.6;

  // Calibration targets.
  double target_group_index = 0.0;        // n_g at lambda_ref (0 = not calibrated)
  double target_tuning_pm_per_c = 0.0;    // resonance drift at lambda_ref

  double index(double lambda_nm, double temp_c) const;       // n_eff(lambda, T)
  double group_index(double lambda_nm, double temp_c) const; // n - lambda dn/dlambda
  double dn_dt(double lambda_nm, double temp_c) const;
};

// Fixes delta_n_slope so that n_g(lambda_ref) = c / (2 L fsr) and thermo_scale so
// that the resonance-wavelength drift at lambda_ref equals tuning_pm_per_c.
WaveguideIndexModel calibrate(const SellmeierModel& bulk, double length_cm,
                              double fsr_ghz, double tuning_pm_per_c,
                              double lambda_ref_nm = 1560.0, double temp_ref_c = 128.6);

} // namespace opo
