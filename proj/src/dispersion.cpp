#include "opo/dispersion.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "opo/error.hpp"
#include "opo/units.hpp"

namespace opo {

double SellmeierModel::index(double lambda_um, double temp_c) const {
  if (lambda_um < lambda_min_um || lambda_um > lambda_max_um) {
    throw_domain("wavelength " + std::to_string(lambda_um) + " um outside Sellmeier validity [" +
                 std::to_string(lambda_min_um) + ", " + std::to_string(lambda_max_um) + "] um");
  }
  if (temp_c < temp_min_c || temp_c > temp_max_c) {
    throw_domain("temperature " + std::to_string(temp_c) + " C outside Sellmeier validity [" +
                 std::to_string(temp_min_c) + ", " + std::to_string(temp_max_c) + "] C");
  }
  const auto& a = coeffs;
  const double f = (temp_c - 24.5) * (temp_c + 570.82);
  const double l2 = lambda_um * lambda_um;
  const double res1 = a[2] + a[8] * f;
  const double n2 = a[0] + a[6] * f + (a[1] + a[7] * f) / (l2 - res1 * res1) +
                    (a[3] + a[9] * f) / (l2 - a[4] * a[4]) - a[5] * l2;
  if (!(n2 > 1.0) || !std::isfinite(n2)) {
    throw_model("Sellmeier evaluation gave non-physical n^2 = " + std::to_string(n2));
  }
  return std::sqrt(n2);
}

SellmeierModel SellmeierModel::default_lithium_niobate_e() {
  SellmeierModel m;
  m.name = "congruent-LiNbO3-extraordinary";
  // Jundt, Opt. Lett. 22, 1553 (1997): a1..a6 then b1..b4.
  m.coeffs = {5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2,
              4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5};
  m.lambda_min_um = 0.4;
  m.lambda_max_um = 5.0;
  m.temp_min_c = 20.0;
  m.temp_max_c = 250.0;
  return m;
}

SellmeierModel SellmeierModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open Sellmeier file: " + path);
  SellmeierModel m;
  m.coeffs.clear();
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "name") {
      ss >> m.name;
    } else if (key == "coeffs") {
      double v;
      while (ss >> v) m.coeffs.push_back(v);
    } else if (key == "lambda_um") {
      if (!(ss >> m.lambda_min_um >> m.lambda_max_um)) throw_io("bad lambda_um line in " + path);
    } else if (key == "temp_c") {
      if (!(ss >> m.temp_min_c >> m.temp_max_c)) throw_io("bad temp_c line in " + path);
    } else {
      throw_io("unknown key '" + key + "' in Sellmeier file " + path);
    }
  }
  if (m.coeffs.size() != 10) {
    throw_io("Sellmeier file " + path + " must provide exactly 10 coefficients, got " +
             std::to_string(m.coeffs.size()));
  }
  return m;
}

double WaveguideIndexModel::index(double lambda_nm, double temp_c) const {
  const double lam_um = lambda_nm * 1e-3;
  const double t_eff = temp_ref_c + thermo_scale * (temp_c - temp_ref_c);
  return bulk.index(lam_um, t_eff) + delta_n_offset + delta_n_slope * (lam_um - lambda_ref_um);
}

double WaveguideIndexModel::group_index(double lambda_nm, double temp_c) const {
  // Central difference with one Richardson step; truncation well under 1e-6 relative.
  const double h = lambda_nm * 1e-4;
  if (lambda_nm - 2.0 * h < bulk.lambda_min_um * 1e3 || lambda_nm + 2.0 * h > bulk.lambda_max_um * 1e3) {
    throw_domain("wavelength too close to validity edge for group-index derivative");
  }
  auto d = [&](double step) {
    return (index(lambda_nm + step, temp_c) - index(lambda_nm - step, temp_c)) / (2.0 * step);
  };
  const double d1 = d(h);
  const double d2 = d(h / 2.0);
  const double dn_dlam = (4.0 * d2 - d1) / 3.0; // per nm
  return index(lambda_nm, temp_c) - lambda_nm * dn_dlam;
}

double WaveguideIndexModel::dn_dt(double lambda_nm, double temp_c) const {
  const double h = 1e-2;
  return (index(lambda_nm, temp_c + h) - index(lambda_nm, temp_c - h)) / (2.0 * h);
}

WaveguideIndexModel calibrate(const SellmeierModel& bulk, double length_cm, double fsr_ghz,
                              double tuning_pm_per_c, double lambda_ref_nm, double temp_ref_c) {
  WaveguideIndexModel m;
  m.bulk = bulk;
  m.lambda_ref_um = lambda_ref_nm * 1e-3;
  m.temp_ref_c = temp_ref_c;
  m.target_group_index = kSpeedOfLight / (2.0 * length_cm * 1e-2 * fsr_ghz * 1e9);
  m.target_tuning_pm_per_c = tuning_pm_per_c;

  // A linear-in-lambda delta_n shifts n_g by the constant -slope * lambda_ref,
  // leaving n(lambda_ref) untouched.
  const double ng_bulk = m.group_index(lambda_ref_nm, temp_ref_c);
  m.delta_n_slope = -(m.target_group_index - ng_bulk) / m.lambda_ref_um;

  // Resonance drift for fixed mode number: dlam/dT = lambda * (dn/dT) / n_g.
  const double ng = m.group_index(lambda_ref_nm, temp_ref_c);
  const double nt_required = (tuning_pm_per_c * 1e-12 / (lambda_ref_nm * 1e-9)) * ng;
  const double nt_bulk = m.dn_dt(lambda_ref_nm, temp_ref_c);
  m.thermo_scale = nt_required / nt_bulk;
  return m;
}

} // namespace opo
