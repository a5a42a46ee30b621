#include "opo/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "opo/error.hpp"
#include "opo/units.hpp"

namespace opo {

double MirrorCurve::at(double lam_nm) const {
  if (lambda_nm.empty()) throw_config("empty mirror curve");
  if (lam_nm <= lambda_nm.front()) return reflectivity.front();
  if (lam_nm >= lambda_nm.back()) return reflectivity.back();
  const auto it = std::upper_bound(lambda_nm.begin(), lambda_nm.end(), lam_nm);
  const size_t i = static_cast<size_t>(it - lambda_nm.begin());
  const double w = (lam_nm - lambda_nm[i - 1]) / (lambda_nm[i] - lambda_nm[i - 1]);
  return reflectivity[i - 1] * (1.0 - w) + reflectivity[i] * w;
}

MirrorCurve MirrorCurve::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open mirror curve file: " + path);
  MirrorCurve c;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double lam, trans;
    if (ss >> lam >> trans) {
      c.lambda_nm.push_back(lam);
      c.reflectivity.push_back(1.0 - trans);
    }
  }
  if (c.lambda_nm.size() < 2) throw_io("mirror curve needs at least two samples: " + path);
  if (!std::is_sorted(c.lambda_nm.begin(), c.lambda_nm.end()))
    throw_io("mirror curve wavelengths must increase: " + path);
  return c;
}

void ResonatorSpec::validate() const {
  if (!(length_cm > 0)) throw_config("resonator length must be positive");
  if (!(r1 > 0 && r1 < 1 && r2 > 0 && r2 < 1)) throw_config("mirror reflectivities must be in (0,1)");
  if (alpha_db_per_cm < 0) throw_config("propagation loss must be >= 0");
}

double ResonatorSpec::t_pass() const { return db_to_transmission(alpha_db_per_cm * length_cm); }

double ResonatorSpec::reflectivity(double lambda_nm) const {
  if (mirror_curve) return mirror_curve->at(lambda_nm);
  return r1;
}

double transmission(const ResonatorSpec& spec, double nu_thz, double temp_c) {
  spec.validate();
  const double lam_nm = thz_to_wavelength_nm(nu_thz);
  const double n = spec.dispersion.index(lam_nm, temp_c);
  const double t = spec.t_pass();
  double ra = spec.r1, rb = spec.r2;
  if (spec.mirror_curve) ra = rb = spec.mirror_curve->at(lam_nm);
  const double rho = std::sqrt(ra * rb) * t;
  if (rho >= 1.0) throw_model("round-trip factor >= 1 (gain not supported)");
  // Round-trip phase; Airy transmittance normalized by the lossless unit peak.
  const double phi = 4.0 * M_PI * n * (spec.length_cm * 1e-2) * (nu_thz * 1e12) / kSpeedOfLight;
  const double s = std::sin(phi / 2.0);
  const double num = (1.0 - ra) * (1.0 - rb) * t;
  const double den = (1.0 - rho) * (1.0 - rho) + 4.0 * rho * s * s;
  return num / den;
}

double finesse_from_rho(double rho) {
  if (rho >= 1.0) throw_model("round-trip factor >= 1 (gain not supported)");
  if (rho <= 0.0) throw_model("round-trip factor must be positive");
  return M_PI * std::sqrt(rho) / (1.0 - rho);
}

double finesse(const ResonatorSpec& spec) {
  spec.validate();
  return finesse_from_rho(std::sqrt(spec.r1 * spec.r2) * spec.t_pass());
}

double loss_from_finesse(double f, double r1, double r2, double length_cm) {
  if (!(f > 0)) throw_config("finesse must be positive");
  const double rm = std::sqrt(r1 * r2);
  if (f > finesse_from_rho(rm)) {
    throw_model("finesse " + std::to_string(f) + " exceeds the lossless-cavity value " +
                std::to_string(finesse_from_rho(rm)) + " for the given mirrors");
  }
  // Solve pi sqrt(rho)/(1-rho) = f for rho by bisection; monotone increasing.
  double lo = 1e-12, hi = rm;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (finesse_from_rho(mid) < f ? lo : hi) = mid;
  }
  const double rho = 0.5 * (lo + hi);
  const double t_pass = rho / rm;
  return transmission_to_db(t_pass) / length_cm;
}

double escape_probability(double t_pass, double r_face) {
  if (!(t_pass > 0.0 && t_pass <= 1.0)) throw_config("t_pass must be in (0,1]");
  if (!(r_face > 0.0 && r_face < 1.0)) throw_config("face reflectivity must be in (0,1)");
  if (t_pass * r_face >= 1.0) throw_model("t_pass * R >= 1 (gain not supported)");
  const double tr = t_pass * r_face;
  return std::sqrt(t_pass) * (1.0 - r_face) / (1.0 - tr * tr);
}

double escape_probability(const ResonatorSpec& spec, int face) {
  spec.validate();
  return escape_probability(spec.t_pass(), face == 2 ? spec.r2 : spec.r1);
}

namespace {

// Golden-section maximum refinement on [a, b].
double golden_max(const ResonatorSpec& spec, double temp_c, double a, double b, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = transmission(spec, c, temp_c);
  double fd = transmission(spec, d, temp_c);
  while (b - a > tol) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = transmission(spec, c, temp_c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = transmission(spec, d, temp_c);
    }
  }
  return 0.5 * (a + b);
}

} // namespace

ModeComb mode_comb(const ResonatorSpec& spec, double temp_c, double band_lo_nm, double band_hi_nm) {
  spec.validate();
  ModeComb comb;
  comb.temperature_c = temp_c;
  if (band_lo_nm >= band_hi_nm) return comb; // empty band, not an error

  const double nu_lo = wavelength_nm_to_thz(band_hi_nm);
  const double nu_hi = wavelength_nm_to_thz(band_lo_nm);
  const double lam_mid = 0.5 * (band_lo_nm + band_hi_nm);
  const double ng = spec.dispersion.group_index(lam_mid, temp_c);
  const double fsr_thz = kSpeedOfLight / (2.0 * ng * spec.length_cm * 1e-2) / 1e12;
  const double step = fsr_thz / 20.0;
  const double tol = 1e-7; // THz; locates peaks to 0.1 MHz

  double prev2 = transmission(spec, nu_lo, temp_c);
  double prev1 = transmission(spec, nu_lo + step, temp_c);
  for (double nu = nu_lo + 2.0 * step; nu <= nu_hi + step; nu += step) {
    const double cur = transmission(spec, std::min(nu, nu_hi), temp_c);
    if (prev1 >= prev2 && prev1 >= cur) {
      const double a = std::min(nu, nu_hi) - 2.0 * step;
      const double b = std::min(nu, nu_hi);
      const double peak = golden_max(spec, temp_c, a, b, tol);
      if (peak >= nu_lo && peak <= nu_hi &&
          (comb.freqs_thz.empty() || peak - comb.freqs_thz.back() > fsr_thz / 4.0)) {
        comb.freqs_thz.push_back(peak);
      }
    }
    prev2 = prev1;
    prev1 = cur;
  }
  for (size_t i = 1; i < comb.freqs_thz.size(); ++i) {
    comb.fsr_ghz.push_back((comb.freqs_thz[i] - comb.freqs_thz[i - 1]) * 1e3);
  }
  comb.fwhm_mhz = fsr_thz * 1e6 / finesse(spec);
  return comb;
}

} // namespace opo
