#include "opo/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opo/error.hpp"
#include "opo/units.hpp"

namespace opo {

double PumpSpec::frequency_thz() const { return wavelength_nm_to_thz(wavelength_nm); }

double idler_wavelength_nm(const PumpSpec& pump, double lambda_s_nm) {
  const double inv = 1.0 / pump.wavelength_nm - 1.0 / lambda_s_nm;
  if (!(inv > 0.0)) throw_domain("signal wavelength implies non-positive idler frequency");
  return 1.0 / inv;
}

double phase_mismatch(const QpmSpec& qpm, const WaveguideIndexModel& disp, const PumpSpec& pump,
                      double lambda_s_nm, double temp_c) {
  const double lambda_i_nm = idler_wavelength_nm(pump, lambda_s_nm);
  const double np = disp.index(pump.wavelength_nm, temp_c);
  const double ns = disp.index(lambda_s_nm, temp_c);
  const double ni = disp.index(lambda_i_nm, temp_c);
  const double two_pi = 2.0 * M_PI;
  const double beta_p = two_pi * np / (pump.wavelength_nm * 1e-9);
  const double beta_s = two_pi * ns / (lambda_s_nm * 1e-9);
  const double beta_i = two_pi * ni / (lambda_i_nm * 1e-9);
  const double grating = two_pi / (qpm.poling_period_um * 1e-6);
  return beta_p - beta_s - beta_i - grating + qpm.mismatch_offset;
}

void calibrate_qpm(QpmSpec& qpm, const WaveguideIndexModel& disp, const PumpSpec& pump) {
  qpm.mismatch_offset = 0.0;
  qpm.mismatch_offset =
      -phase_mismatch(qpm, disp, pump, pump.degeneracy_nm(), qpm.phase_match_temp_c);
}

double spdc_envelope(const QpmSpec& qpm, const WaveguideIndexModel& disp, const PumpSpec& pump,
                     double lambda_s_nm, double temp_c) {
  const double x = phase_mismatch(qpm, disp, pump, lambda_s_nm, temp_c) * qpm.length_cm * 1e-2 / 2.0;
  if (std::abs(x) < 1e-12) return 1.0;
  const double s = std::sin(x) / x;
  return s * s;
}

namespace {

double airy_normalized(const ResonatorSpec& res, double nu_thz, double temp_c) {
  // transmission() has peak value (1-R1)(1-R2) t / (1-rho)^2; normalize to unit peak.
  const double t = res.t_pass();
  const double rho = std::sqrt(res.r1 * res.r2) * t;
  const double peak = (1.0 - res.r1) * (1.0 - res.r2) * t / ((1.0 - rho) * (1.0 - rho));
  return transmission(res, nu_thz, temp_c) / peak;
}

} // namespace

ClusterSpectrum cluster_spectrum(const ResonatorSpec& res, const QpmSpec& qpm, const PumpSpec& pump,
                                 double temp_c, double band_lo_nm, double band_hi_nm,
                                 double cluster_threshold, int grid_points) {
  if (band_lo_nm >= band_hi_nm) throw_domain("empty wavelength band for cluster spectrum");
  const double nu_p = pump.frequency_thz();
  const double nu_lo = wavelength_nm_to_thz(band_hi_nm);
  const double nu_hi = wavelength_nm_to_thz(band_lo_nm);
  if (grid_points <= 0) {
    // Resolve cavity lines: >= 8 samples per FWHM.
    const double fwhm_thz = 117e6 * 1e-12;
    grid_points = static_cast<int>(std::ceil((nu_hi - nu_lo) / (fwhm_thz / 8.0))) + 1;
    grid_points = std::min(grid_points, 4'000'000);
  }

  ClusterSpectrum cs;
  cs.temperature_c = temp_c;
  cs.threshold = cluster_threshold;
  cs.freq_thz.resize(static_cast<size_t>(grid_points));
  cs.weight.resize(static_cast<size_t>(grid_points));
  const double dnu = (nu_hi - nu_lo) / (grid_points - 1);
  double wmax = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double nu_s = nu_lo + i * dnu;
    const double lam_s = thz_to_wavelength_nm(nu_s);
    const double env = spdc_envelope(qpm, res.dispersion, pump, lam_s, temp_c);
    const double w = env * airy_normalized(res, nu_s, temp_c) *
                     airy_normalized(res, nu_p - nu_s, temp_c);
    cs.freq_thz[static_cast<size_t>(i)] = nu_s;
    cs.weight[static_cast<size_t>(i)] = w;
    wmax = std::max(wmax, w);
  }

  // Clusters: maximal intervals with weight above threshold * max.
  const double level = cluster_threshold * wmax;
  bool inside = false;
  ClusterInterval cur;
  for (size_t i = 0; i < cs.weight.size(); ++i) {
    if (cs.weight[i] > level && !inside) {
      inside = true;
      cur.lo_thz = cs.freq_thz[i];
    } else if (cs.weight[i] <= level && inside) {
      inside = false;
      cur.hi_thz = cs.freq_thz[i - 1];
      cs.clusters.push_back(cur);
    }
  }
  if (inside) {
    cur.hi_thz = cs.freq_thz.back();
    cs.clusters.push_back(cur);
  }
  return cs;
}

GMDiagram gm_diagram(const ResonatorSpec& res, const PumpSpec& pump, double temp_c,
                     double band_lo_nm, double band_hi_nm) {
  GMDiagram gm;
  gm.signal = mode_comb(res, temp_c, band_lo_nm, band_hi_nm);
  const double nu_p = pump.frequency_thz();
  // Partner band mirrored through nu_p / 2.
  const double m_lo = thz_to_wavelength_nm(nu_p - wavelength_nm_to_thz(band_lo_nm));
  const double m_hi = thz_to_wavelength_nm(nu_p - wavelength_nm_to_thz(band_hi_nm));
  gm.idler = mode_comb(res, temp_c, std::min(m_lo, m_hi) - 0.05, std::max(m_lo, m_hi) + 0.05);
  gm.fwhm_mhz = gm.signal.fwhm_mhz;

  gm.detuning_mhz.reserve(gm.signal.freqs_thz.size());
  for (double nu_s : gm.signal.freqs_thz) {
    const double target = nu_p - nu_s;
    double best = std::numeric_limits<double>::infinity();
    const auto& idler = gm.idler.freqs_thz;
    const auto it = std::lower_bound(idler.begin(), idler.end(), target);
    if (it != idler.end()) best = std::min(best, *it - target);
    if (it != idler.begin()) {
      const double d = *(it - 1) - target;
      if (std::abs(d) < std::abs(best)) best = d;
    }
    gm.detuning_mhz.push_back(std::isfinite(best) ? best * 1e6 : 0.0);
  }
  return gm;
}

double double_resonance_metric(const ResonatorSpec& res, const QpmSpec& qpm, const PumpSpec& pump,
                               double temp_c, double filter_signal_nm, double filter_idler_nm,
                               double window_pm) {
  const double nu_p = pump.frequency_thz();
  double metric = 0.0;
  for (double center : {filter_signal_nm, filter_idler_nm}) {
    const double half_nm = window_pm * 0.5e-3;
    const double nu_lo = wavelength_nm_to_thz(center + half_nm);
    const double nu_hi = wavelength_nm_to_thz(center - half_nm);
    const int n = 257;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double nu_s = nu_lo + (nu_hi - nu_lo) * i / (n - 1);
      const double lam_s = thz_to_wavelength_nm(nu_s);
      const double w = spdc_envelope(qpm, res.dispersion, pump, lam_s, temp_c) *
                       airy_normalized(res, nu_s, temp_c) *
                       airy_normalized(res, nu_p - nu_s, temp_c);
      best = std::max(best, w);
    }
    metric += 0.5 * best;
  }
  return metric;
}

DoubleResonanceResult find_double_resonance(const ResonatorSpec& res, const QpmSpec& qpm,
                                            const PumpSpec& pump, double t0_c, double range_c,
                                            double filter_signal_nm, double filter_idler_nm) {
  if (range_c < 0) throw_domain("temperature range must be >= 0");
  auto metric = [&](double t) {
    return double_resonance_metric(res, qpm, pump, t, filter_signal_nm, filter_idler_nm);
  };
  if (range_c == 0.0) return {t0_c, metric(t0_c)};

  const double lo = t0_c - range_c / 2.0;
  const double hi = t0_c + range_c / 2.0;
  const int n = std::max(3, static_cast<int>(std::ceil(range_c / 0.005)) + 1);
  double best_t = lo, best_m = -1.0;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    const double m = metric(t);
    if (m > best_m) { best_m = m; best_t = t; }
  }
  if (best_m < 1e-6) {
    throw_model("no double resonance found in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                "] C; best metric " + std::to_string(best_m));
  }
  // Golden-section refinement around the best grid point.
  const double step = (hi - lo) / (n - 1);
  double a = std::max(lo, best_t - step), b = std::min(hi, best_t + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = metric(c), fd = metric(d);
  while (b - a > 1e-4) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = metric(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = metric(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, metric(t)};
}

} // namespace opo
