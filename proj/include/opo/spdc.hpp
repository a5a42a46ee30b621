#pragma once

#include <string>
#include <vector>

#include "opo/cavity.hpp"

namespace opo {

struct QpmSpec {
  double poling_period_um = 16.6;
  double phase_match_temp_c = 128.6;
  double length_cm = 3.6;               // shared with the resonator
  std::string interaction = "type-I eee";
  double mismatch_offset = 0.0;         // rad/m, fixed by calibrate_qpm
};

struct PumpSpec {
  double wavelength_nm = 780.027;
  double power_mw = 1.6;
  double linewidth_hz = 1e5;

  double frequency_thz() const;
  double degeneracy_nm() const { return 2.0 * wavelength_nm; }
};

struct ClusterInterval {
  double lo_thz = 0.0;
  double hi_thz = 0.0;
};

struct ClusterSpectrum {
  std::vector<double> freq_thz;   // signal-frequency grid, increasing
  std::vector<double> weight;     // >= 0
  double temperature_c = 0.0;
  double threshold = 0.0;         // cluster extraction level (fraction of max in band)
  std::vector<ClusterInterval> clusters;
};

struct GMDiagram {
  ModeComb signal;                 // modes in the requested band
  ModeComb idler;                  // partner comb, frequencies on the idler axis
  std::vector<double> detuning_mhz; // per signal mode: nu_p - nu_s minus nearest idler mode
  double fwhm_mhz = 0.0;
};

// Idler wavelength implied by energy conservation omega_p = omega_s + omega_i.
double idler_wavelength_nm(const PumpSpec& pump, double lambda_s_nm);

// Delta_beta = beta_p - beta_s - beta_i - 2 pi / period + offset, rad/m.
double phase_mismatch(const QpmSpec& qpm, const WaveguideIndexModel& disp, const PumpSpec& pump,
                      double lambda_s_nm, double temp_c);

// Fixes the constant mismatch offset so Delta_beta = 0 at degeneracy at the
// phase-match temperature.
void calibrate_qpm(QpmSpec& qpm, const WaveguideIndexModel& disp, const PumpSpec& pump);

// sinc^2(Delta_beta L / 2), peak-normalized.
double spdc_envelope(const QpmSpec& qpm, const WaveguideIndexModel& disp, const PumpSpec& pump,
                     double lambda_s_nm, double temp_c);

// weight(nu_s) = envelope * Airy(nu_s) * Airy(nu_p - nu_s), Airy peak-normalized.
ClusterSpectrum cluster_spectrum(const ResonatorSpec& res, const QpmSpec& qpm, const PumpSpec& pump,
                                 double temp_c, double band_lo_nm, double band_hi_nm,
                                 double cluster_threshold = 0.5, int grid_points = 0);

GMDiagram gm_diagram(const ResonatorSpec& res, const PumpSpec& pump, double temp_c,
                     double band_lo_nm, double band_hi_nm);

// Double-resonance figure of merit at the two filter wavelengths: the best joint
// signal/idler cavity transmission achievable inside each 10-pm filter window.
double double_resonance_metric(const ResonatorSpec& res, const QpmSpec& qpm, const PumpSpec& pump,
                               double temp_c, double filter_signal_nm, double filter_idler_nm,
                               double window_pm = 10.0);

struct DoubleResonanceResult {
  double temperature_c = 0.0;
  double metric = 0.0;
};

// Scans [t0 - range/2, t0 + range/2] at <= 0.005 C step, refines to 1e-4 C.
DoubleResonanceResult find_double_resonance(const ResonatorSpec& res, const QpmSpec& qpm,
                                            const PumpSpec& pump, double t0_c, double range_c,
                                            double filter_signal_nm = 1559.5,
                                            double filter_idler_nm = 1561.5);

} // namespace opo
