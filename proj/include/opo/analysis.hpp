#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace opo {

// Fixed-width histogram over [lo_ns, lo_ns + bins * bin_ns), half-open bins.
struct Histogram {
  double lo_ns = 0.0;
  double bin_ns = 0.263;
  std::vector<double> counts;

  static Histogram from_delays(const std::vector<double>& delays_ns, double lo_ns,
                               double hi_ns, double bin_ns = 0.263);

  double center_ns(std::size_t i) const { return lo_ns + (double(i) + 0.5) * bin_ns; }
  double total() const;
  Histogram rebin(std::size_t factor) const;
};

struct G2Fit {
  double amplitude = 0.0;      // counts per bin at the peak, above baseline
  double baseline = 0.0;       // counts per bin
  double t0_ns = 0.0;
  double delta_nu_mhz = 0.0;   // signal/idler mode bandwidth from the decay constant
  double amplitude_err = 0.0;
  double baseline_err = 0.0;
  double t0_err_ns = 0.0;
  double delta_nu_err_mhz = 0.0;
  double log_likelihood = 0.0;
  std::size_t n_bins = 0;
};

// Poisson maximum-likelihood fit of baseline + amplitude * exp(-2*pi*dnu*|t - t0|).
// Throws ErrorKind::Fit when no peak stands clear of the baseline.
G2Fit fit_g2(const Histogram& h);

struct CoherenceTimes {
  double t_coherence_ns = 0.0;  // Wigner 1.39 / (2 pi dnu)
  double tau_exp_ns = 0.0;      // 1 / (pi dnu), double-sided exponential width
};
CoherenceTimes coherence_times(double delta_nu_mhz);

// Centroided local maxima above frac * global max (after light smoothing).
std::vector<double> find_peaks(const Histogram& h, double frac = 0.3);

// Integral of counts over [center - width/2, center + width/2] with fractional
// edge bins prorated.
double window_counts(const Histogram& h, double center_ns, double width_ns);

struct FringePoint {
  double phase_rad = 0.0;
  double counts = 0.0;       // coincidences in the scan window
  double accidentals = 0.0;  // estimated accidental share of `counts`
};

// Runs `measure` at each phase and collects the fringe.
std::vector<FringePoint> fringe_scan(const std::vector<double>& phases_rad,
                                     const std::function<FringePoint(double)>& measure);

struct VisibilityFit {
  double visibility = 0.0;
  double visibility_err = 0.0;      // from Poisson weights
  double visibility_err_scatter = 0.0;  // from residual scatter
  double mean_counts = 0.0;
  double phase0_rad = 0.0;
};

// Linear least squares of a0 + a1 cos(phi) + a2 sin(phi); V = |a1,a2| / a0.
VisibilityFit fit_visibility(const std::vector<FringePoint>& points);

// Net visibility after removing a flat accidental floor from the fringe.
double subtract_accidentals(double v_raw, double mean_counts, double mean_accidentals);

struct BellResult {
  double visibility = 0.0;
  double threshold = 0.0;   // 1/sqrt(2)
  double n_sigma = 0.0;     // (V - threshold) / sigma
  bool violated = false;    // n_sigma > 2
};
BellResult bell_check(double visibility, double visibility_err);

} // namespace opo
