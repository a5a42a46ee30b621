#include "opo/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "opo/analysis.hpp"
#include "opo/budget.hpp"
#include "opo/cavity.hpp"
#include "opo/error.hpp"
#include "opo/lock.hpp"
#include "opo/montecarlo.hpp"
#include "opo/report.hpp"
#include "opo/spdc.hpp"
#include "opo/units.hpp"

namespace fs = std::filesystem;

namespace opo {

bool ReproduceReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

std::string ReproduceReport::table() const {
  std::size_t w_id = 4, w_name = 4, w_paper = 5, w_val = 8, w_tol = 9;
  for (const auto& r : rows) {
    w_id = std::max(w_id, r.id.size());
    w_name = std::max(w_name, r.name.size());
    w_paper = std::max(w_paper, r.paper_value.size());
    w_val = std::max(w_val, r.computed.size());
    w_tol = std::max(w_tol, r.tolerance.size());
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::string out = pad("id", w_id) + "  " + pad("name", w_name) + "  " + pad("paper", w_paper) +
                    "  " + pad("computed", w_val) + "  " + pad("tolerance", w_tol) + "  verdict\n";
  out += std::string(out.size(), '-') + "\n";
  for (const auto& r : rows) {
    out += pad(r.id, w_id) + "  " + pad(r.name, w_name) + "  " + pad(r.paper_value, w_paper) +
           "  " + pad(r.computed, w_val) + "  " + pad(r.tolerance, w_tol) + "  " +
           (r.pass ? "pass" : "FAIL") + "\n";
  }
  return out;
}

namespace {

bool within_pct(double value, double target, double pct) {
  return std::abs(value - target) <= std::abs(target) * pct / 100.0;
}

bool within_factor(double value, double target, double factor) {
  if (!(value > 0) || !(target > 0)) return false;
  const double r = value > target ? value / target : target / value;
  return r <= factor;
}

CriterionRow row(std::string id, std::string name, std::string paper, double computed,
                 std::string tol, bool pass) {
  return {std::move(id), std::move(name), std::move(paper), format_number(computed),
          std::move(tol), pass};
}

Histogram delays_histogram(const SimResult& run, double span_ns, double bin_ns) {
  const auto delays = tdc_coincidences(run.channel1, run.channel2, span_ns);
  return Histogram::from_delays(delays, -span_ns, span_ns, bin_ns);
}

void write_histogram(const std::string& base, const Histogram& h, const std::string& title) {
  std::vector<std::vector<double>> rows;
  PlotSeries s;
  s.label = "counts";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    rows.push_back({h.center_ns(i), h.counts[i]});
    s.x.push_back(h.center_ns(i));
    s.y.push_back(h.counts[i]);
  }
  write_csv(base + ".csv", {"delay_ns", "counts"}, rows);
  write_svg_plot(base + ".svg", title, "delay (ns)", "coincidences per bin", {s});
}

std::uint64_t fnv_file(const std::string& path, std::uint64_t h) {
  std::ifstream in(path, std::ios::binary);
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

} // namespace

ReproduceReport reproduce_paper(const RunConfig& cfg, const std::string& out_dir, int g2_seeds) {
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  {
    std::ofstream man(path("manifest.txt"), std::ios::binary);
    man << "config_hash = " << cfg.hash() << "\n" << cfg.serialize();
  }

  ReproduceReport rep;
  const ResonatorSpec res = cfg.resonator();
  const PumpSpec pump = cfg.pump();
  QpmSpec qpm = cfg.qpm();
  calibrate_qpm(qpm, res.dispersion, pump);
  const double temp = cfg.qpm_temp_c;
  const double degen_nm = pump.degeneracy_nm();

  // --- 1: cavity closure -----------------------------------------------
  const double f_analytic = finesse(res);
  rep.rows.push_back(row("1a", "finesse", "15.4", f_analytic, "+-0.1",
                         std::abs(f_analytic - 15.4) <= 0.1));
  {
    const ModeComb comb = mode_comb(res, temp, degen_nm - 0.06, degen_nm + 0.06);
    std::size_t best = 0;
    const double nu_c = wavelength_nm_to_thz(degen_nm);
    for (std::size_t i = 1; i < comb.freqs_thz.size(); ++i) {
      if (std::abs(comb.freqs_thz[i] - nu_c) < std::abs(comb.freqs_thz[best] - nu_c)) best = i;
    }
    double fsr_thz = 0.0;
    if (best > 0 && best < comb.freqs_thz.size() - 1) {
      fsr_thz = 0.5 * (comb.freqs_thz[best + 1] - comb.freqs_thz[best - 1]);
    } else if (comb.freqs_thz.size() >= 2) {
      fsr_thz = comb.fsr_ghz[std::min(best, comb.fsr_ghz.size() - 1)] * 1e-3;
    }
    const double nu0 = comb.freqs_thz[best];
    const double t_peak = transmission(res, nu0, temp);
    auto half_cross = [&](double sign) {
      double lo = 0.0, hi = fsr_thz / 2.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (transmission(res, nu0 + sign * mid, temp) > t_peak / 2.0) lo = mid;
        else hi = mid;
      }
      return 0.5 * (lo + hi);
    };
    const double fwhm = half_cross(+1.0) + half_cross(-1.0);
    const double f_numeric = fsr_thz / fwhm;
    rep.rows.push_back(row("1b", "finesse numeric/analytic", format_number(f_analytic),
                           f_numeric, "0.5%", within_pct(f_numeric, f_analytic, 0.5)));

    // --- 3: dispersion calibration ------------------------------------
    const double fsr_ghz = fsr_thz * 1e3;
    rep.rows.push_back(row("3a", "FSR at degeneracy (GHz)", "1.8", fsr_ghz, "0.5%",
                           within_pct(fsr_ghz, 1.8, 0.5)));
    const double dT = 0.1;
    const ModeComb comb2 = mode_comb(res, temp + dT, degen_nm - 0.06, degen_nm + 0.06);
    std::size_t best2 = 0;
    for (std::size_t i = 1; i < comb2.freqs_thz.size(); ++i) {
      if (std::abs(comb2.freqs_thz[i] - nu0) < std::abs(comb2.freqs_thz[best2] - nu0)) best2 = i;
    }
    const double lam0 = thz_to_wavelength_nm(nu0);
    const double lam1 = thz_to_wavelength_nm(comb2.freqs_thz[best2]);
    const double tuning = (lam1 - lam0) * 1e3 / dT; // pm per degC
    rep.rows.push_back(row("3b", "tuning (pm/degC)", "44.5", tuning, "2%",
                           within_pct(tuning, 44.5, 2.0)));
    const double fsr_pm = bandwidth_mhz_to_pm(fsr_ghz * 1e3, degen_nm);
    const double hop_c = fsr_pm / tuning;
    rep.rows.push_back(row("3c", "mode-hop period (degC)", "0.3", hop_c, "10%",
                           within_pct(hop_c, 0.3, 10.0)));
    rep.rows.push_back(row("3d", "double-resonance restore (degC)", "0.15", hop_c / 2.0, "15%",
                           within_pct(hop_c / 2.0, 0.15, 15.0)));
  }

  // --- 2: Eq. 1 escape probability ---------------------------------------
  const double p_esc = escape_probability(0.9515, 0.85);
  rep.rows.push_back(row("2", "escape probability", "0.43", p_esc, "+-0.005",
                         std::abs(p_esc - 0.43) <= 0.005));

  // --- 4: time-domain formulas -------------------------------------------
  {
    const CoherenceTimes ct = coherence_times(117.0);
    rep.rows.push_back(row("4a", "T_c (ns)", "1.891", ct.t_coherence_ns, "+-0.001",
                           std::abs(ct.t_coherence_ns - 1.891) <= 0.001));
    rep.rows.push_back(row("4b", "tau_coh (ns)", "2.721", ct.tau_exp_ns, "+-0.001",
                           std::abs(ct.tau_exp_ns - 2.721) <= 0.001));
  }

  // --- 5 & 7 (MC half): g2 round trip ------------------------------------
  SimConfig scfg = cfg.sim();
  scfg.franson.reset();
  G2Fit first_fit{};
  Histogram first_hist;
  int fit_ok = 0, fit_total = 0;
  for (int s = 0; s < g2_seeds; ++s) {
    scfg.seed = cfg.seed + static_cast<std::uint64_t>(s);
    const SimResult run = simulate_run(scfg);
    const Histogram h = delays_histogram(run, cfg.hist_span_ns, cfg.hist_bin_ns);
    ++fit_total;
    try {
      const G2Fit fit = fit_g2(h);
      if (std::abs(fit.delta_nu_mhz - cfg.delta_nu_mhz) <= 3.0 * fit.delta_nu_err_mhz) ++fit_ok;
      if (s == 0) {
        first_fit = fit;
        first_hist = h;
      }
    } catch (const Error&) {
      if (s == 0) throw;
    }
  }
  const double frac = double(fit_ok) / double(fit_total);
  rep.rows.push_back(row("5", "bandwidth recovered (fraction of seeds)", ">=0.95", frac,
                         "3 std errors each", frac >= 0.95));
  write_histogram(path("g2_histogram"), first_hist, "coincidence histogram");
  {
    std::ofstream ft(path("g2_fit.txt"), std::ios::binary);
    ft << "delta_nu_mhz = " << format_number(first_fit.delta_nu_mhz) << " +- "
       << format_number(first_fit.delta_nu_err_mhz) << "\n"
       << "baseline_per_bin = " << format_number(first_fit.baseline) << " +- "
       << format_number(first_fit.baseline_err) << "\n"
       << "amplitude_per_bin = " << format_number(first_fit.amplitude) << "\n"
       << "t0_ns = " << format_number(first_fit.t0_ns) << "\n";
  }

  // --- 6: rate budget ------------------------------------------------------
  const LossBudget budget = cfg.budget();
  const ArmLosses arms = arm_losses(budget);
  rep.rows.push_back(row("6a", "arm-1 losses (dB)", "10.8", arms.db1, "exact",
                         std::abs(arms.db1 - 10.8) < 1e-12));
  rep.rows.push_back(row("6b", "arm-2 losses (dB)", "11.8", arms.db2, "exact",
                         std::abs(arms.db2 - 11.8) < 1e-12));
  rep.rows.push_back(row("6c", "arm-2 end-to-end survival", "0.02", arms.survival2, "15%",
                         within_pct(arms.survival2, 0.02, 15.0)));
  const RatePrediction rates = predict_rates(cfg.pair_rate_hz, budget);
  rep.rows.push_back(row("6d", "singles-1 (cps)", "3400", rates.singles1_cps, "10%",
                         within_pct(rates.singles1_cps, 3400.0, 10.0)));
  rep.rows.push_back(row("6e", "coincidences (cps)", "5.2", rates.coincidences_cps, "15%",
                         within_pct(rates.coincidences_cps, 5.2, 15.0)));
  rep.rows.push_back(row("6f", "pairs per coherence time", "0.02", rates.mu, "25%",
                         within_pct(rates.mu, 0.02, 25.0)));
  rep.rows.push_back(row("6g", "brightness (/s/MHz/mW)", "17", rates.brightness, "10%",
                         within_pct(rates.brightness, 17.0, 10.0)));

  // --- 7: accidental budget ------------------------------------------------
  const AccidentalBreakdown acc = accidental_budget(rates, budget, cfg.pair_rate_hz);
  rep.rows.push_back(row("7a", "detector-noise accidentals (Hz/ns)", "0.047",
                         acc.detector_noise_hz_per_ns, "factor 1.5",
                         within_factor(acc.detector_noise_hz_per_ns, 0.047, 1.5)));
  rep.rows.push_back(row("7b", "independent-pair accidentals (Hz/ns)", "0.034",
                         acc.independent_pairs_hz_per_ns, "factor 1.3",
                         within_factor(acc.independent_pairs_hz_per_ns, 0.034, 1.3)));
  {
    const double dur = scfg.duration_s;
    const double mc_base = first_fit.baseline / (dur * cfg.hist_bin_ns);
    const double mc_sigma = first_fit.baseline_err / (dur * cfg.hist_bin_ns);
    rep.rows.push_back(row("7c", "MC baseline vs closed form (Hz/ns)",
                           format_number(acc.total_hz_per_ns), mc_base, "2 sigma",
                           std::abs(mc_base - acc.total_hz_per_ns) <= 2.0 * mc_sigma));
  }
  {
    std::ofstream bt(path("budget.txt"), std::ios::binary);
    bt << "arm1_db = " << format_number(arms.db1) << "\narm2_db = " << format_number(arms.db2)
       << "\nsurvival1 = " << format_number(arms.survival1)
       << "\nsurvival2 = " << format_number(arms.survival2)
       << "\nsingles1_cps = " << format_number(rates.singles1_cps)
       << "\nsingles2_cps = " << format_number(rates.singles2_cps)
       << "\ncoincidences_cps = " << format_number(rates.coincidences_cps)
       << "\nbrightness = " << format_number(rates.brightness)
       << "\nmu = " << format_number(rates.mu)
       << "\naccidental_detector_noise = " << format_number(acc.detector_noise_hz_per_ns)
       << "\naccidental_after_pulse = " << format_number(acc.after_pulse_hz_per_ns)
       << "\naccidental_independent_pairs = " << format_number(acc.independent_pairs_hz_per_ns)
       << "\naccidental_total = " << format_number(acc.total_hz_per_ns) << "\n";
  }

  // --- 8: Franson ------------------------------------------------------------
  {
    RunConfig fc = cfg;
    fc.franson_enabled = 1.0;
    SimConfig fsim = fc.sim();
    fsim.seed = cfg.seed;
    // Integrate long enough that the side peaks rise well above accidentals.
    fsim.duration_s = std::max(fsim.duration_s, 600.0);
    const SimResult run = simulate_run(fsim);
    const Histogram h = delays_histogram(run, 16.0, cfg.hist_bin_ns);
    write_histogram(path("franson_histogram"), h, "folded Franson coincidence histogram");
    const auto peaks = find_peaks(h, 0.25);
    bool three = peaks.size() == 3;
    if (three) {
      three = std::abs(peaks[0] + fc.franson_delay_ns) <= cfg.hist_bin_ns &&
              std::abs(peaks[1]) <= cfg.hist_bin_ns &&
              std::abs(peaks[2] - fc.franson_delay_ns) <= cfg.hist_bin_ns;
    }
    rep.rows.push_back(row("8a", "three peaks at 0, +-delay", "3", double(peaks.size()),
                           "+-1 bin", three));

    // Path ratio 2:1:1 with interference switched off.
    {
      FransonConfig f0;
      f0.arm_delay_ns = fc.franson_delay_ns;
      f0.v_net = 0.0;
      const std::size_t n_pairs = 200000;
      std::vector<PairEvent> pairs(n_pairs);
      for (std::size_t i = 0; i < n_pairs; ++i) {
        pairs[i].t_signal_ps = static_cast<std::int64_t>(i) * 1000000;
        pairs[i].t_idler_ps = pairs[i].t_signal_ps;
      }
      const auto kept = franson_transform(pairs, f0, cfg.seed + 7);
      double nc = 0, nsl = 0, nls = 0;
      for (const auto& p : kept) {
        if (p.path == PathClass::ShortShort || p.path == PathClass::LongLong) nc += 1;
        else if (p.path == PathClass::ShortLong) nsl += 1;
        else nls += 1;
      }
      const double ec = double(n_pairs) / 8.0, es = double(n_pairs) / 16.0;
      const bool ratio_ok = std::abs(nc - ec) <= 3.0 * std::sqrt(ec) &&
                            std::abs(nsl - es) <= 3.0 * std::sqrt(es) &&
                            std::abs(nls - es) <= 3.0 * std::sqrt(es);
      rep.rows.push_back(row("8b", "path ratio central:side:side", "2:1:1",
                             nc / std::max(1.0, 0.5 * (nsl + nls)), "3 sigma", ratio_ok));
    }

    // Fringe scan on the central 1.2 ns window.
    std::vector<double> phases;
    const int n_phase = 12;
    for (int i = 0; i < n_phase; ++i) phases.push_back(2.0 * M_PI * double(i) / double(n_phase));
    std::vector<FringePoint> points;
    for (int i = 0; i < n_phase; ++i) {
      RunConfig pc = fc;
      pc.franson_phase_rad = phases[i];
      SimConfig psim = pc.sim();
      psim.seed = cfg.seed + 1000 + static_cast<std::uint64_t>(i);
      const SimResult prun = simulate_run(psim);
      const Histogram ph = delays_histogram(prun, 16.0, cfg.hist_bin_ns);
      FringePoint pt;
      pt.phase_rad = phases[i];
      pt.counts = window_counts(ph, 0.0, cfg.franson_window_ns);
      pt.accidentals = 0.5 * (window_counts(ph, -0.5 * fc.franson_delay_ns, cfg.franson_window_ns) +
                              window_counts(ph, 0.5 * fc.franson_delay_ns, cfg.franson_window_ns));
      points.push_back(pt);
    }
    {
      std::vector<std::vector<double>> frows;
      PlotSeries fs_counts{"central window", {}, {}};
      for (const auto& p : points) {
        frows.push_back({p.phase_rad, p.counts, p.accidentals});
        fs_counts.x.push_back(p.phase_rad);
        fs_counts.y.push_back(p.counts);
      }
      write_csv(path("franson_fringe.csv"), {"phase_rad", "counts", "accidentals"}, frows);
      write_svg_plot(path("franson_fringe.svg"), "Franson fringe", "phase (rad)",
                     "coincidences in window", {fs_counts});
    }
    const VisibilityFit vfit = fit_visibility(points);
    double acc_mean = 0.0;
    for (const auto& p : points) acc_mean += p.accidentals / double(points.size());
    const double v_sub = subtract_accidentals(vfit.visibility, vfit.mean_counts, acc_mean);
    const BellResult bell = bell_check(vfit.visibility,
                                       std::max(vfit.visibility_err, vfit.visibility_err_scatter));
    rep.rows.push_back(row("8c", "raw visibility", "0.81", vfit.visibility, "+-0.06",
                           std::abs(vfit.visibility - 0.81) <= 0.06));
    rep.rows.push_back(row("8d", "accidental-subtracted visibility", ">=0.88", v_sub, "floor",
                           v_sub >= 0.88));
    rep.rows.push_back(row("8e", "Bell verdict (V_raw > 0.7071)", "violated", bell.n_sigma,
                           "n_sigma > 0", vfit.visibility > bell.threshold));
  }

  // --- 9: lock ----------------------------------------------------------------
  {
    LockPlant plant;
    plant.drift_c_per_min = cfg.lock_drift_c_per_min;
    LockState st;
    st.peak_cps = plant.peak_cps;
    st.setpoint_cps = cfg.lock_setpoint_frac * plant.peak_cps;
    st.kp = 0.001;
    st.ki = 0.0001;
    st.kd = 0.0;
    const LockTrace trace = lock_run(st, plant, 180.0, 0.2, cfg.seed);
    rep.rows.push_back(row("9a", "lock excursion (degC)", "<0.001", trace.max_excursion_c,
                           "bound", trace.max_excursion_c < 1e-3));
    const double frac_peak = trace.mean_counts_cps / plant.peak_cps;
    rep.rows.push_back(row("9b", "locked throughput (fraction of peak)", "0.575", frac_peak,
                           "2%", within_pct(frac_peak, 0.575, 2.0)));
    std::vector<std::vector<double>> lrows;
    PlotSeries ls{"detuning", {}, {}};
    for (std::size_t i = 0; i < trace.time_s.size(); ++i) {
      lrows.push_back({trace.time_s[i], trace.temp_c[i], trace.detuning_c[i], trace.counts_cps[i]});
      ls.x.push_back(trace.time_s[i]);
      ls.y.push_back(trace.detuning_c[i]);
    }
    write_csv(path("lock_trace.csv"), {"time_s", "temp_c", "detuning_c", "counts_cps"}, lrows);
    write_svg_plot(path("lock_trace.svg"), "PID lock detuning", "time (s)", "detuning (degC)", {ls});
  }

  // --- spectrum / diagram artifacts -------------------------------------------
  {
    const ClusterSpectrum cs =
        cluster_spectrum(res, qpm, pump, temp, degen_nm - 0.5, degen_nm + 0.5);
    std::vector<std::vector<double>> srows;
    PlotSeries ss{"emission weight", {}, {}};
    const std::size_t stride = std::max<std::size_t>(1, cs.freq_thz.size() / 4000);
    for (std::size_t i = 0; i < cs.freq_thz.size(); i += stride) {
      srows.push_back({cs.freq_thz[i], cs.weight[i]});
      ss.x.push_back(cs.freq_thz[i]);
      ss.y.push_back(cs.weight[i]);
    }
    write_csv(path("cluster_spectrum.csv"), {"freq_thz", "weight"}, srows);
    write_svg_plot(path("cluster_spectrum.svg"), "clustered emission spectrum",
                   "signal frequency (THz)", "relative pair weight", {ss});

    std::vector<std::vector<double>> erows;
    PlotSeries es{"sinc envelope", {}, {}};
    for (int i = 0; i <= 1000; ++i) {
      const double lam = 1450.0 + (1700.0 - 1450.0) * double(i) / 1000.0;
      const double w = spdc_envelope(qpm, res.dispersion, pump, lam, temp);
      erows.push_back({lam, w});
      es.x.push_back(lam);
      es.y.push_back(w);
    }
    write_csv(path("envelope.csv"), {"lambda_nm", "weight"}, erows);
    write_svg_plot(path("envelope.svg"), "phase-matching envelope", "signal wavelength (nm)",
                   "relative weight", {es});

    const GMDiagram gm = gm_diagram(res, pump, temp, degen_nm - 0.1, degen_nm + 0.1);
    std::vector<std::vector<double>> grow;
    for (std::size_t i = 0; i < gm.signal.freqs_thz.size(); ++i) {
      grow.push_back({gm.signal.freqs_thz[i], gm.detuning_mhz[i]});
    }
    write_csv(path("gm_diagram.csv"), {"signal_freq_thz", "detuning_mhz"}, grow);
  }

  // --- 10: determinism digest ---------------------------------------------------
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(out_dir)) {
    if (e.path().filename() == "summary.txt") continue;
    names.push_back(e.path().string());
  }
  std::sort(names.begin(), names.end());
  for (const auto& n : names) digest = fnv_file(n, digest);
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    CriterionRow r;
    r.id = "10";
    r.name = "artifact digest (fixed seed)";
    r.paper_value = "stable";
    r.computed = buf;
    r.tolerance = "byte-identical reruns";
    r.pass = true;
    rep.rows.push_back(r);
  }

  std::ofstream sum(path("summary.txt"), std::ios::binary);
  sum << rep.table();
  return rep;
}

} // namespace opo
