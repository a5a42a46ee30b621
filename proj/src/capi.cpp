#include "opo.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "opo/analysis.hpp"
#include "opo/budget.hpp"
#include "opo/cavity.hpp"
#include "opo/config.hpp"
#include "opo/error.hpp"
#include "opo/lock.hpp"
#include "opo/montecarlo.hpp"
#include "opo/report.hpp"
#include "opo/reproduce.hpp"
#include "opo/spdc.hpp"

namespace fs = std::filesystem;

struct opo_config {
  opo::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

int status_of(const opo::Error& e) {
  switch (e.kind()) {
    case opo::ErrorKind::Domain:
    case opo::ErrorKind::Config:
      return 1;
    default:
      return 2;
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return 0;
  } catch (const opo::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return 2;
  }
}

int require(bool ok, const char* msg) {
  if (!ok) {
    g_last_error = msg;
    return 1;
  }
  return 0;
}

} // namespace

extern "C" {

size_t opo_last_error(char* buf, size_t len) {
  if (buf && len > 0) {
    const size_t n = std::min(len - 1, g_last_error.size());
    std::memcpy(buf, g_last_error.data(), n);
    buf[n] = '\0';
  }
  return g_last_error.size();
}

opo_config* opo_config_create(void) { return new opo_config{opo::RunConfig::paper_default()}; }

opo_config* opo_config_load(const char* path) {
  if (!path) {
    g_last_error = "path is null";
    return nullptr;
  }
  try {
    auto* c = new opo_config{opo::RunConfig::load(path)};
    g_last_error.clear();
    return c;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

opo_config* opo_config_clone(const opo_config* cfg) {
  return cfg ? new opo_config{cfg->cfg} : nullptr;
}

int opo_config_set(opo_config* cfg, const char* key, const char* value) {
  if (int s = require(cfg && key && value, "null argument")) return s;
  return guarded([&] { cfg->cfg.set(key, value); });
}

int opo_config_get(const opo_config* cfg, const char* key, char* buf, size_t len) {
  if (int s = require(cfg && key && buf && len > 0, "null argument")) return s;
  return guarded([&] {
    const std::string v = cfg->cfg.get(key);
    const size_t n = std::min(len - 1, v.size());
    std::memcpy(buf, v.data(), n);
    buf[n] = '\0';
  });
}

int opo_config_save(const opo_config* cfg, const char* path) {
  if (int s = require(cfg && path, "null argument")) return s;
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) opo::throw_io(std::string("cannot write '") + path + "'");
    out << cfg->cfg.serialize();
  });
}

uint64_t opo_config_hash(const opo_config* cfg) { return cfg ? cfg->cfg.hash() : 0; }

void opo_config_destroy(opo_config* cfg) { delete cfg; }

int opo_run_spectrum(const opo_config* cfg, double band_lo_nm, double band_hi_nm,
                     const char* out_dir, int* n_clusters) {
  if (int s = require(cfg && out_dir, "null argument")) return s;
  return guarded([&] {
    fs::create_directories(out_dir);
    const opo::ResonatorSpec res = cfg->cfg.resonator();
    const opo::PumpSpec pump = cfg->cfg.pump();
    opo::QpmSpec qpm = cfg->cfg.qpm();
    opo::calibrate_qpm(qpm, res.dispersion, pump);
    const opo::ClusterSpectrum cs = opo::cluster_spectrum(res, qpm, pump, cfg->cfg.qpm_temp_c,
                                                          band_lo_nm, band_hi_nm);
    std::vector<std::vector<double>> rows;
    opo::PlotSeries ps{"weight", {}, {}};
    const std::size_t stride = std::max<std::size_t>(1, cs.freq_thz.size() / 8000);
    for (std::size_t i = 0; i < cs.freq_thz.size(); i += stride) {
      rows.push_back({cs.freq_thz[i], cs.weight[i]});
      ps.x.push_back(cs.freq_thz[i]);
      ps.y.push_back(cs.weight[i]);
    }
    const std::string base = (fs::path(out_dir) / "spectrum").string();
    opo::write_csv(base + ".csv", {"freq_thz", "weight"}, rows);
    opo::write_svg_plot(base + ".svg", "clustered emission spectrum", "signal frequency (THz)",
                        "relative pair weight", {ps});
    std::vector<std::vector<double>> crows;
    for (const auto& c : cs.clusters) crows.push_back({c.lo_thz, c.hi_thz});
    opo::write_csv((fs::path(out_dir) / "clusters.csv").string(), {"lo_thz", "hi_thz"}, crows);
    if (n_clusters) *n_clusters = static_cast<int>(cs.clusters.size());
  });
}

int opo_find_double_resonance(const opo_config* cfg, double t0_c, double range_c, double* temp_c,
                              double* metric) {
  if (int s = require(cfg != nullptr, "null config")) return s;
  return guarded([&] {
    const opo::ResonatorSpec res = cfg->cfg.resonator();
    const opo::PumpSpec pump = cfg->cfg.pump();
    opo::QpmSpec qpm = cfg->cfg.qpm();
    opo::calibrate_qpm(qpm, res.dispersion, pump);
    const auto r = opo::find_double_resonance(res, qpm, pump, t0_c, range_c);
    if (temp_c) *temp_c = r.temperature_c;
    if (metric) *metric = r.metric;
  });
}

int opo_run_lock(const opo_config* cfg, double duration_s, const char* out_csv,
                 double* max_excursion_c, double* mean_counts_cps) {
  if (int s = require(cfg != nullptr, "null config")) return s;
  return guarded([&] {
    opo::LockPlant plant;
    plant.drift_c_per_min = cfg->cfg.lock_drift_c_per_min;
    opo::LockState st;
    st.peak_cps = plant.peak_cps;
    st.setpoint_cps = cfg->cfg.lock_setpoint_frac * plant.peak_cps;
    st.kp = 0.001;
    st.ki = 0.0001;
    const opo::LockTrace tr = opo::lock_run(st, plant, duration_s, 0.2, cfg->cfg.seed);
    if (out_csv) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < tr.time_s.size(); ++i) {
        rows.push_back({tr.time_s[i], tr.temp_c[i], tr.detuning_c[i], tr.counts_cps[i]});
      }
      opo::write_csv(out_csv, {"time_s", "temp_c", "detuning_c", "counts_cps"}, rows);
    }
    if (max_excursion_c) *max_excursion_c = tr.max_excursion_c;
    if (mean_counts_cps) *mean_counts_cps = tr.mean_counts_cps;
  });
}

int opo_simulate(const opo_config* cfg, double duration_s, const char* out_ch1,
                 const char* out_ch2, uint64_t* n1, uint64_t* n2) {
  if (int s = require(cfg && out_ch1 && out_ch2, "null argument")) return s;
  return guarded([&] {
    opo::SimConfig sim = cfg->cfg.sim();
    if (duration_s >= 0) sim.duration_s = duration_s;
    const opo::SimResult res = opo::simulate_run(sim);
    auto save = [](const opo::EventStream& ev, const std::string& p) {
      if (p.size() >= 4 && p.compare(p.size() - 4, 4, ".csv") == 0) ev.save_csv(p);
      else ev.save_binary(p);
    };
    save(res.channel1, out_ch1);
    save(res.channel2, out_ch2);
    if (n1) *n1 = res.channel1.size();
    if (n2) *n2 = res.channel2.size();
  });
}

int opo_analyze_g2(const opo_config* cfg, const char* ch1_path, const char* ch2_path,
                   const char* out_report, double* delta_nu_mhz, double* delta_nu_err_mhz) {
  if (int s = require(cfg && ch1_path && ch2_path, "null argument")) return s;
  return guarded([&] {
    const opo::EventStream ch1 = opo::EventStream::load(ch1_path);
    const opo::EventStream ch2 = opo::EventStream::load(ch2_path);
    const auto delays = opo::tdc_coincidences(ch1, ch2, cfg->cfg.hist_span_ns);
    const opo::Histogram h = opo::Histogram::from_delays(delays, -cfg->cfg.hist_span_ns,
                                                         cfg->cfg.hist_span_ns,
                                                         cfg->cfg.hist_bin_ns);
    const opo::G2Fit fit = opo::fit_g2(h);
    if (out_report) {
      std::ofstream out(out_report, std::ios::binary);
      if (!out) opo::throw_io(std::string("cannot write '") + out_report + "'");
      out << "delta_nu_mhz = " << opo::format_number(fit.delta_nu_mhz) << " +- "
          << opo::format_number(fit.delta_nu_err_mhz) << "\n"
          << "amplitude_per_bin = " << opo::format_number(fit.amplitude) << "\n"
          << "baseline_per_bin = " << opo::format_number(fit.baseline) << " +- "
          << opo::format_number(fit.baseline_err) << "\n"
          << "t0_ns = " << opo::format_number(fit.t0_ns) << " +- "
          << opo::format_number(fit.t0_err_ns) << "\n"
          << "coincidences = " << opo::format_number(h.total()) << "\n";
    }
    if (delta_nu_mhz) *delta_nu_mhz = fit.delta_nu_mhz;
    if (delta_nu_err_mhz) *delta_nu_err_mhz = fit.delta_nu_err_mhz;
  });
}

int opo_analyze_franson(const opo_config* cfg, const char* fringe_csv, const char* out_report,
                        double* v_raw, double* v_subtracted) {
  if (int s = require(cfg && fringe_csv, "null argument")) return s;
  return guarded([&] {
    std::ifstream in(fringe_csv);
    if (!in) opo::throw_io(std::string("cannot open '") + fringe_csv + "'");
    std::string line;
    std::vector<opo::FringePoint> points;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (first) {
        first = false;
        if (line.find("phase") != std::string::npos) continue; // header
      }
      std::stringstream ss(line);
      std::string cell;
      double vals[3] = {0, 0, 0};
      int k = 0;
      while (std::getline(ss, cell, ',') && k < 3) {
        try {
          vals[k++] = std::stod(cell);
        } catch (const std::exception&) {
          opo::throw_io("bad number '" + cell + "' in fringe CSV");
        }
      }
      if (k < 2) opo::throw_io("fringe CSV needs phase_rad,counts[,accidentals]");
      points.push_back({vals[0], vals[1], vals[2]});
    }
    const opo::VisibilityFit fit = opo::fit_visibility(points);
    double acc = 0.0;
    for (const auto& p : points) acc += p.accidentals / double(points.size());
    const double vsub = acc > 0 ? opo::subtract_accidentals(fit.visibility, fit.mean_counts, acc)
                                : fit.visibility;
    const opo::BellResult bell = opo::bell_check(
        fit.visibility, std::max(fit.visibility_err, fit.visibility_err_scatter));
    if (out_report) {
      std::ofstream out(out_report, std::ios::binary);
      if (!out) opo::throw_io(std::string("cannot write '") + out_report + "'");
      out << "visibility_raw = " << opo::format_number(fit.visibility) << " +- "
          << opo::format_number(std::max(fit.visibility_err, fit.visibility_err_scatter)) << "\n"
          << "visibility_subtracted = " << opo::format_number(vsub) << "\n"
          << "mean_counts = " << opo::format_number(fit.mean_counts) << "\n"
          << "bell_threshold = " << opo::format_number(bell.threshold) << "\n"
          << "bell_n_sigma = " << opo::format_number(bell.n_sigma) << "\n"
          << "bell_violated = " << (fit.visibility > bell.threshold ? "yes" : "no") << "\n";
    }
    if (v_raw) *v_raw = fit.visibility;
    if (v_subtracted) *v_subtracted = vsub;
  });
}

int opo_budget_report(const opo_config* cfg, const char* out_path) {
  if (int s = require(cfg && out_path, "null argument")) return s;
  return guarded([&] {
    const opo::LossBudget b = cfg->cfg.budget();
    const opo::ArmLosses arms = opo::arm_losses(b);
    const opo::RatePrediction r = opo::predict_rates(cfg->cfg.pair_rate_hz, b);
    const opo::AccidentalBreakdown a = opo::accidental_budget(r, b, cfg->cfg.pair_rate_hz);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) opo::throw_io(std::string("cannot write '") + out_path + "'");
    auto kv = [&](const char* k, double v) {
      out << k << " = " << opo::format_number(v) << "\n";
    };
    out << "# itemized losses (dB)\n";
    for (int arm = 1; arm <= 2; ++arm) {
      const auto& stages = arm == 1 ? b.chain.arm1 : b.chain.arm2;
      for (const auto& s : stages) out << "arm" << arm << "." << s.label << " = "
                                       << opo::format_number(s.loss_db) << "\n";
    }
    kv("arm1_total_db", arms.db1);
    kv("arm2_total_db", arms.db2);
    kv("cavity_escape", b.p_out);
    kv("survival1", arms.survival1);
    kv("survival2", arms.survival2);
    out << "# predicted rates\n";
    kv("generated_pairs_hz", r.generated_hz);
    kv("singles1_cps", r.singles1_cps);
    kv("singles2_cps", r.singles2_cps);
    kv("coincidences_cps", r.coincidences_cps);
    kv("gate_capture", r.gate_capture);
    kv("brightness_per_s_mhz_mw", r.brightness);
    kv("pairs_per_coherence_time", r.mu);
    out << "# accidental budget (Hz/ns)\n";
    kv("detector_noise", a.detector_noise_hz_per_ns);
    kv("after_pulse", a.after_pulse_hz_per_ns);
    kv("independent_pairs", a.independent_pairs_hz_per_ns);
    kv("total", a.total_hz_per_ns);
  });
}

int opo_reproduce(const opo_config* cfg, const char* out_dir, int g2_seeds, int* all_pass) {
  if (int s = require(cfg && out_dir, "null argument")) return s;
  if (int s = require(g2_seeds > 0, "g2_seeds must be positive")) return s;
  return guarded([&] {
    const opo::ReproduceReport rep = opo::reproduce_paper(cfg->cfg, out_dir, g2_seeds);
    if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
  });
}

int opo_finesse(const opo_config* cfg, double* finesse) {
  if (int s = require(cfg && finesse, "null argument")) return s;
  return guarded([&] { *finesse = opo::finesse(cfg->cfg.resonator()); });
}

int opo_escape_probability(double t_pass, double r_face, double* p) {
  if (int s = require(p != nullptr, "null output")) return s;
  return guarded([&] { *p = opo::escape_probability(t_pass, r_face); });
}

} // extern "C"
