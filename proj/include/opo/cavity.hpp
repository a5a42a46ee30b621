#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opo/dispersion.hpp"

namespace opo {

// Optional measured mirror curve: wavelength nm -> power reflectivity, linear interpolation.
struct MirrorCurve {
  std::vector<double> lambda_nm;
  std::vector<double> reflectivity;
  double at(double lam_nm) const;
  static MirrorCurve load(const std::string& path); // two columns: wavelength_nm transmittance
};

struct ResonatorSpec {
  double length_cm = 3.6;
  double r1 = 0.85;
  double r2 = 0.85;
  double alpha_db_per_cm = 0.06;
  WaveguideIndexModel dispersion;
  std::optional<MirrorCurve> mirror_curve; // overrides r1=r2 when present

  void validate() const;
  double t_pass() const; // single-pass power transmission 10^(-alpha L / 10)
  double reflectivity(double lambda_nm) const;
};

struct ModeComb {
  std::vector<double> freqs_thz;   // strictly increasing
  std::vector<double> fsr_ghz;     // size-1 fewer, local spacing
  double fwhm_mhz = 0.0;
  double temperature_c = 0.0;
};

// Airy transmittance in [0, 1] at optical frequency nu (THz).
double transmission(const ResonatorSpec& spec, double nu_thz, double temp_c);

// F = pi sqrt(rho) / (1 - rho), rho = sqrt(R1 R2) t_pass.
double finesse(const ResonatorSpec& spec);
double finesse_from_rho(double rho);

// Inverts the finesse relation for the single-pass transmission, returns alpha in dB/cm.
double loss_from_finesse(double f, double r1, double r2, double length_cm);

// Eq.-style per-face escape probability: sqrt(t)(1-R) / (1 - (t R)^2), with t the
// single-pass power transmission and R the exiting face's reflectivity.
double escape_probability(double t_pass, double r_face);
double escape_probability(const ResonatorSpec& spec, int face = 1);

// All transmission maxima inside the wavelength band [lo, hi] nm, located to <= 1 MHz.
ModeComb mode_comb(const ResonatorSpec& spec, double temp_c, double band_lo_nm, double band_hi_nm);

} // namespace opo
