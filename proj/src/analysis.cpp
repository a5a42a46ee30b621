#include "opo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "opo/error.hpp"

namespace opo {

Histogram Histogram::from_delays(const std::vector<double>& delays_ns, double lo_ns,
                                 double hi_ns, double bin_ns) {
  if (!(hi_ns > lo_ns) || !(bin_ns > 0)) throw_config("histogram range/bin invalid");
  Histogram h;
  h.lo_ns = lo_ns;
  h.bin_ns = bin_ns;
  h.counts.assign(static_cast<std::size_t>(std::ceil((hi_ns - lo_ns) / bin_ns)), 0.0);
  for (double d : delays_ns) {
    if (d < lo_ns) continue;
    const auto i = static_cast<std::size_t>((d - lo_ns) / bin_ns);
    if (i < h.counts.size()) h.counts[i] += 1.0;
  }
  return h;
}

double Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

Histogram Histogram::rebin(std::size_t factor) const {
  if (factor == 0) throw_config("rebin factor must be >= 1");
  Histogram out;
  out.lo_ns = lo_ns;
  out.bin_ns = bin_ns * double(factor);
  out.counts.assign((counts.size() + factor - 1) / factor, 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) out.counts[i / factor] += counts[i];
  return out;
}

namespace {

// Generic Nelder-Mead minimizer, adequate for our 4-parameter likelihoods.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, const std::vector<double>& step,
                                int max_iter = 4000, double ftol = 1e-10) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> sx(n + 1, x0);
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i < n; ++i) sx[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) fx[i] = f(sx[i]);

  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<std::size_t> ord(n + 1);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
    const std::size_t best = ord[0], worst = ord[n], second = ord[n - 1];
    if (std::abs(fx[worst] - fx[best]) <= ftol * (std::abs(fx[best]) + ftol)) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += sx[i][j] / double(n);
    }
    auto blend = [&](double alpha) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + alpha * (sx[worst][j] - centroid[j]);
      return p;
    };
    auto reflect = blend(-1.0);
    const double fr = f(reflect);
    if (fr < fx[best]) {
      auto expand = blend(-2.0);
      const double fe = f(expand);
      if (fe < fr) { sx[worst] = expand; fx[worst] = fe; }
      else { sx[worst] = reflect; fx[worst] = fr; }
    } else if (fr < fx[second]) {
      sx[worst] = reflect; fx[worst] = fr;
    } else {
      auto contract = blend(0.5);
      const double fc = f(contract);
      if (fc < fx[worst]) { sx[worst] = contract; fx[worst] = fc; }
      else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j) sx[i][j] = 0.5 * (sx[i][j] + sx[best][j]);
          fx[i] = f(sx[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= sx.size() - 1; ++i)
    if (fx[i] < fx[best]) best = i;
  return sx[best];
}

// Gauss-Jordan inverse with partial pivoting; throws on singular matrices.
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) throw_fit("information matrix is singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) { a[col][j] /= d; inv[col][j] /= d; }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double m = a[r][col];
      for (std::size_t j = 0; j < n; ++j) { a[r][j] -= m * a[col][j]; inv[r][j] -= m * inv[col][j]; }
    }
  }
  return inv;
}

} // namespace

G2Fit fit_g2(const Histogram& h) {
  const std::size_t n = h.counts.size();
  if (n < 16) throw_fit("histogram too short for a g2 fit");

  // Baseline from the outer quarters, peak from the raw maximum.
  double base = 0.0;
  std::size_t nb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n / 8 || i >= n - n / 8) { base += h.counts[i]; ++nb; }
  }
  base = nb ? base / double(nb) : 0.0;
  const auto peak_it = std::max_element(h.counts.begin(), h.counts.end());
  const double peak = *peak_it;
  if (!(peak > 3.0 * std::max(base, 1.0))) throw_fit("no detectable coincidence peak");
  const double t0_init = h.center_ns(std::size_t(peak_it - h.counts.begin()));

  // Half-max width as a decay-rate seed.
  const double half = base + 0.5 * (peak - base);
  std::size_t l = std::size_t(peak_it - h.counts.begin()), r = l;
  while (l > 0 && h.counts[l] > half) --l;
  while (r + 1 < n && h.counts[r] > half) ++r;
  const double fwhm_ns = std::max(h.bin_ns, double(r - l) * h.bin_ns);
  const double dnu_init = std::log(2.0) / (M_PI * fwhm_ns * 1e-9) / 1e6; // MHz

  auto model = [&](const std::vector<double>& p, double t) {
    const double rate = 2.0 * M_PI * std::abs(p[3]) * 1e6 * 1e-9; // 1/ns
    return std::abs(p[1]) + std::abs(p[0]) * std::exp(-rate * std::abs(t - p[2]));
  };
  auto nll = [&](const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::max(model(p, h.center_ns(i)), 1e-12);
      s += m - h.counts[i] * std::log(m);
    }
    return s;
  };

  std::vector<double> p0 = {peak - base, std::max(base, 0.1), t0_init, dnu_init};
  std::vector<double> step = {0.2 * p0[0] + 1.0, 0.2 * p0[1] + 0.1, h.bin_ns, 0.2 * dnu_init};
  auto p = nelder_mead(nll, p0, step);
  p = nelder_mead(nll, p, {0.02 * std::abs(p[0]) + 0.1, 0.02 * std::abs(p[1]) + 0.01,
                           0.1 * h.bin_ns, 0.02 * std::abs(p[3])});
  for (int k : {0, 1, 3}) p[k] = std::abs(p[k]);

  // Errors from the observed information matrix (numerical Hessian of the NLL).
  std::vector<double> hstep = {0.01 * p[0] + 1e-3, 0.01 * p[1] + 1e-3, 0.05 * h.bin_ns,
                               0.01 * p[3] + 1e-3};
  std::vector<std::vector<double>> hess(4, std::vector<double>(4, 0.0));
  const double f0 = nll(p);
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      auto at = [&](double da, double db) {
        auto q = p;
        q[a] += da;
        q[b] += db;
        return nll(q);
      };
      double v;
      if (a == b) {
        v = (at(hstep[a], 0) - 2.0 * f0 + at(-hstep[a], 0)) / (hstep[a] * hstep[a]);
      } else {
        v = (at(hstep[a], hstep[b]) - at(hstep[a], -hstep[b]) - at(-hstep[a], hstep[b]) +
             at(-hstep[a], -hstep[b])) /
            (4.0 * hstep[a] * hstep[b]);
      }
      hess[a][b] = hess[b][a] = v;
    }
  }
  auto cov = invert(hess);
  auto err = [&](int i) { return cov[i][i] > 0 ? std::sqrt(cov[i][i]) : 0.0; };

  G2Fit fit;
  fit.amplitude = p[0];
  fit.baseline = p[1];
  fit.t0_ns = p[2];
  fit.delta_nu_mhz = p[3];
  fit.amplitude_err = err(0);
  fit.baseline_err = err(1);
  fit.t0_err_ns = err(2);
  fit.delta_nu_err_mhz = err(3);
  fit.log_likelihood = -f0;
  fit.n_bins = n;
  return fit;
}

CoherenceTimes coherence_times(double delta_nu_mhz) {
  if (!(delta_nu_mhz > 0)) throw_domain("bandwidth must be positive");
  const double dnu_hz = delta_nu_mhz * 1e6;
  CoherenceTimes ct;
  ct.t_coherence_ns = 1.39 / (2.0 * M_PI * dnu_hz) * 1e9;
  ct.tau_exp_ns = 1.0 / (M_PI * dnu_hz) * 1e9;
  return ct;
}

std::vector<double> find_peaks(const Histogram& h, double frac) {
  const std::size_t n = h.counts.size();
  // Smooth over +-3 bins so shot noise on broad peaks does not split them.
  std::vector<double> sm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0, w = 0.0;
    const std::size_t lo = i >= 3 ? i - 3 : 0;
    const std::size_t hi = std::min(i + 3, n - 1);
    for (std::size_t j = lo; j <= hi; ++j) { s += h.counts[j]; w += 1.0; }
    sm[i] = s / w;
  }
  const double cut = frac * *std::max_element(sm.begin(), sm.end());
  // Local maxima above the cut, then merge neighbours that are not separated
  // by a trough (prominence test) or sit closer than 7 bins apart.
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (sm[i] < cut || sm[i] < sm[i - 1] || sm[i] < sm[i + 1]) continue;
    if (!idx.empty()) {
      const std::size_t prev = idx.back();
      double trough = sm[prev];
      for (std::size_t j = prev; j <= i; ++j) trough = std::min(trough, sm[j]);
      const double lesser = std::min(sm[prev], sm[i]);
      if (i - prev < 7 || trough > 0.5 * lesser) {
        if (sm[i] > sm[prev]) idx.back() = i;
        continue;
      }
    }
    idx.push_back(i);
  }
  std::vector<double> out;
  for (std::size_t i : idx) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = (i >= 3 ? i - 3 : 0); j <= std::min(i + 3, n - 1); ++j) {
      num += h.counts[j] * h.center_ns(j);
      den += h.counts[j];
    }
    out.push_back(den > 0 ? num / den : h.center_ns(i));
  }
  return out;
}

double window_counts(const Histogram& h, double center_ns, double width_ns) {
  const double a = center_ns - 0.5 * width_ns;
  const double b = center_ns + 0.5 * width_ns;
  double s = 0.0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double lo = h.lo_ns + double(i) * h.bin_ns;
    const double hi = lo + h.bin_ns;
    const double ov = std::min(hi, b) - std::max(lo, a);
    if (ov > 0) s += h.counts[i] * ov / h.bin_ns;
  }
  return s;
}

std::vector<FringePoint> fringe_scan(const std::vector<double>& phases_rad,
                                     const std::function<FringePoint(double)>& measure) {
  std::vector<FringePoint> out;
  out.reserve(phases_rad.size());
  for (double phi : phases_rad) {
    FringePoint p = measure(phi);
    p.phase_rad = phi;
    out.push_back(p);
  }
  return out;
}

VisibilityFit fit_visibility(const std::vector<FringePoint>& points) {
  if (points.size() < 4) throw_fit("need at least 4 fringe points");
  // Unweighted normal equations for c = a0 + a1 cos(phi) + a2 sin(phi);
  // weighting by observed counts biases the contrast upward at deep minima.
  double ata[3][3] = {};
  double atb[3] = {};
  for (const auto& pt : points) {
    const double basis[3] = {1.0, std::cos(pt.phase_rad), std::sin(pt.phase_rad)};
    for (int i = 0; i < 3; ++i) {
      atb[i] += basis[i] * pt.counts;
      for (int j = 0; j < 3; ++j) ata[i][j] += basis[i] * basis[j];
    }
  }
  std::vector<std::vector<double>> m(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = ata[i][j];
  auto ginv = invert(m); // (X^T X)^-1
  double a[3];
  for (int i = 0; i < 3; ++i) {
    a[i] = 0.0;
    for (int j = 0; j < 3; ++j) a[i] += ginv[i][j] * atb[j];
  }
  if (!(a[0] > 0)) throw_fit("fringe mean is not positive");
  const double amp = std::hypot(a[1], a[2]);
  const double v = amp / a[0];

  // Parameter covariance with Poisson variances taken from the fitted model:
  // cov = G X^T diag(sigma^2) X G, G = (X^T X)^-1.
  double xsx[3][3] = {};
  double chi2 = 0.0;
  for (const auto& pt : points) {
    const double basis[3] = {1.0, std::cos(pt.phase_rad), std::sin(pt.phase_rad)};
    const double model = a[0] + a[1] * basis[1] + a[2] * basis[2];
    const double var = std::max(model, 1.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) xsx[i][j] += basis[i] * basis[j] * var;
    chi2 += (pt.counts - model) * (pt.counts - model) / var;
  }
  std::vector<std::vector<double>> cov(3, std::vector<double>(3, 0.0));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += ginv[i][k] * xsx[k][l] * ginv[l][j];
      cov[i][j] = s;
    }
  }
  const double dof = double(points.size()) - 3.0;
  const double scale2 = dof > 0 ? std::max(chi2 / dof, 0.0) : 1.0;

  // Delta method: V = sqrt(a1^2+a2^2)/a0.
  const double g[3] = {-v / a[0], a[1] / (amp * a[0] + 1e-300), a[2] / (amp * a[0] + 1e-300)};
  double var = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) var += g[i] * cov[i][j] * g[j];
  var = std::max(var, 0.0);

  VisibilityFit out;
  out.visibility = v;
  out.visibility_err = std::sqrt(var);
  out.visibility_err_scatter = std::sqrt(var * scale2);
  out.mean_counts = a[0];
  out.phase0_rad = std::atan2(-a[2], a[1]);
  return out;
}

double subtract_accidentals(double v_raw, double mean_counts, double mean_accidentals) {
  if (!(mean_counts > mean_accidentals)) throw_domain("accidentals exceed the fringe mean");
  return v_raw * mean_counts / (mean_counts - mean_accidentals);
}

BellResult bell_check(double visibility, double visibility_err) {
  BellResult r;
  r.visibility = visibility;
  r.threshold = 1.0 / std::sqrt(2.0);
  r.n_sigma = visibility_err > 0 ? (visibility - r.threshold) / visibility_err
                                 : std::numeric_limits<double>::infinity();
  r.violated = r.n_sigma > 2.0;
  return r;
}

} // namespace opo
