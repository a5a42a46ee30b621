#pragma once

#include <cmath>

namespace opo {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

// Wavelength (nm, vacuum) <-> frequency (THz).
inline double wavelength_nm_to_thz(double lambda_nm) {
  return kSpeedOfLight / (lambda_nm * 1e-9) / 1e12;
}
inline double thz_to_wavelength_nm(double nu_thz) {
  return kSpeedOfLight / (nu_thz * 1e12) / 1e-9;
}

// Small-bandwidth conversion about a carrier: dnu = c * dlambda / lambda^2.
inline double bandwidth_pm_to_mhz(double dlambda_pm, double lambda_nm) {
  const double lam = lambda_nm * 1e-9;
  return kSpeedOfLight * (dlambda_pm * 1e-12) / (lam * lam) / 1e6;
}
inline double bandwidth_mhz_to_pm(double dnu_mhz, double lambda_nm) {
  const double lam = lambda_nm * 1e-9;
  return (dnu_mhz * 1e6) * lam * lam / kSpeedOfLight / 1e-12;
}

inline double db_to_transmission(double db) { return std::pow(10.0, -db / 10.0); }
inline double transmission_to_db(double t) { return -10.0 * std::log10(t); }

} // namespace opo
