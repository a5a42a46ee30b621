// opo: command-line front end for the waveguide-OPO simulator.
//
// Links against the C API only; all model code lives in the shared library.
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opo.h"

namespace {

constexpr const char* kConfigEnv = "OPO_CONFIG";

std::string last_error() {
  char buf[512];
  opo_last_error(buf, sizeof buf);
  return buf;
}

// 0 success, 1 validation error, 2 runtime/fit failure.
int fail(int status, const std::string& context) {
  std::fprintf(stderr, "opo: %s: %s\n", context.c_str(), last_error().c_str());
  return status == 0 ? 2 : status;
}

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  double duration = -1.0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "config file (key = value lines)");
  cmd->add_option("--set", c.sets, "override, e.g. --set sim.seed=7")->take_all();
  cmd->add_option("--out", c.out, "output directory or file");
  cmd->add_option("--seed", c.seed, "random seed")->each([&](const std::string&) {
    c.seed_given = true;
  });
  cmd->add_option("--duration", c.duration, "simulated duration (s)");
}

opo_config* build_config(const Common& c, int& status) {
  std::string path = c.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  }
  opo_config* cfg = path.empty() ? opo_config_create() : opo_config_load(path.c_str());
  if (!cfg) {
    status = fail(1, "loading config '" + path + "'");
    return nullptr;
  }
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "opo: --set expects key=value, got '%s'\n", kv.c_str());
      opo_config_destroy(cfg);
      status = 1;
      return nullptr;
    }
    const int s = opo_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != 0) {
      status = fail(s, "applying --set " + kv);
      opo_config_destroy(cfg);
      return nullptr;
    }
  }
  if (c.seed_given) {
    const std::string v = std::to_string(c.seed);
    opo_config_set(cfg, "sim.seed", v.c_str());
  }
  if (c.duration >= 0) {
    const std::string v = std::to_string(c.duration);
    opo_config_set(cfg, "sim.duration_s", v.c_str());
  }
  status = 0;
  return cfg;
}

int write_manifest(const opo_config* cfg, const std::string& dir) {
  const std::string tmp = dir + "/run_config.txt";
  if (int s = opo_config_save(cfg, tmp.c_str())) return fail(s, "writing manifest");
  std::FILE* mf = std::fopen((dir + "/manifest.txt").c_str(), "wb");
  if (!mf) {
    std::fprintf(stderr, "opo: cannot write manifest in '%s'\n", dir.c_str());
    return 2;
  }
  std::fprintf(mf, "config_hash = %" PRIu64 "\nconfig_file = run_config.txt\n",
               opo_config_hash(cfg));
  std::fclose(mf);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"monolithic doubly-resonant waveguide OPO simulator"};
  app.require_subcommand(1);

  Common c_spec, c_clu, c_tune, c_lock, c_sim, c_ana, c_bud, c_rep;

  auto* spectrum = app.add_subcommand("spectrum", "clustered emission spectrum over a band");
  add_common(spectrum, c_spec);
  double band_lo = 1559.5, band_hi = 1560.5;
  spectrum->add_option("--band-lo", band_lo, "band lower edge (nm)");
  spectrum->add_option("--band-hi", band_hi, "band upper edge (nm)");

  auto* clusters = app.add_subcommand("clusters", "cluster intervals only (CSV)");
  add_common(clusters, c_clu);
  double cband_lo = 1559.5, cband_hi = 1560.5;
  clusters->add_option("--band-lo", cband_lo, "band lower edge (nm)");
  clusters->add_option("--band-hi", cband_hi, "band upper edge (nm)");

  auto* tune = app.add_subcommand("tune", "find the best double-resonance temperature");
  add_common(tune, c_tune);
  double t0 = 128.6, range = 0.4;
  tune->add_option("--t0", t0, "scan center (degC)");
  tune->add_option("--range", range, "scan range (degC)");

  auto* lock = app.add_subcommand("lock", "closed-loop PID side-of-fringe lock");
  add_common(lock, c_lock);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo photon-pair run");
  add_common(simulate, c_sim);
  std::string fmt = "bin";
  simulate->add_option("--format", fmt, "event file format: bin or csv")
      ->check(CLI::IsMember({"bin", "csv"}));

  auto* analyze = app.add_subcommand("analyze", "fit recorded data (g2 or franson)");
  add_common(analyze, c_ana);
  std::string mode = "g2", in1, in2;
  analyze->add_option("--mode", mode, "g2 or franson")->check(CLI::IsMember({"g2", "franson"}));
  analyze->add_option("--ch1", in1, "channel-1 events (g2) or fringe CSV (franson)");
  analyze->add_option("--ch2", in2, "channel-2 events (g2 mode)");

  auto* budget = app.add_subcommand("budget", "closed-form loss/rate/accidental budget");
  add_common(budget, c_bud);

  auto* reproduce = app.add_subcommand("reproduce-paper", "full characterization pipeline");
  add_common(reproduce, c_rep);
  int g2_seeds = 25;
  reproduce->add_option("--g2-seeds", g2_seeds, "seeds for the bandwidth-recovery row");

  CLI11_PARSE(app, argc, argv);

  int status = 0;
  if (spectrum->parsed() || clusters->parsed()) {
    const Common& c = spectrum->parsed() ? c_spec : c_clu;
    const double lo = spectrum->parsed() ? band_lo : cband_lo;
    const double hi = spectrum->parsed() ? band_hi : cband_hi;
    opo_config* cfg = build_config(c, status);
    if (!cfg) return status;
    int n = 0;
    if (int s = opo_run_spectrum(cfg, lo, hi, c.out.c_str(), &n)) {
      opo_config_destroy(cfg);
      return fail(s, "computing spectrum");
    }
    status = write_manifest(cfg, c.out);
    std::printf("clusters: %d (artifacts in %s)\n", n, c.out.c_str());
    opo_config_destroy(cfg);
    return status;
  }

  if (tune->parsed()) {
    opo_config* cfg = build_config(c_tune, status);
    if (!cfg) return status;
    double temp = 0, metric = 0;
    if (int s = opo_find_double_resonance(cfg, t0, range, &temp, &metric)) {
      opo_config_destroy(cfg);
      return fail(s, "tuning");
    }
    std::printf("double resonance at %.4f degC (metric %.6g)\n", temp, metric);
    opo_config_destroy(cfg);
    return 0;
  }

  if (lock->parsed()) {
    opo_config* cfg = build_config(c_lock, status);
    if (!cfg) return status;
    double exc = 0, mean = 0;
    const double dur = c_lock.duration >= 0 ? c_lock.duration : 180.0;
    const std::string csv = c_lock.out + (c_lock.out.find('.') == std::string::npos
                                              ? std::string("_lock.csv")
                                              : std::string());
    if (int s = opo_run_lock(cfg, dur, csv.c_str(), &exc, &mean)) {
      opo_config_destroy(cfg);
      return fail(s, "running lock");
    }
    std::printf("lock: max excursion %.6f degC, mean counts %.1f cps (trace %s)\n", exc, mean,
                csv.c_str());
    opo_config_destroy(cfg);
    return 0;
  }

  if (simulate->parsed()) {
    opo_config* cfg = build_config(c_sim, status);
    if (!cfg) return status;
    const std::string ext = fmt == "csv" ? ".csv" : ".events";
    const std::string p1 = c_sim.out + "/channel1" + ext;
    const std::string p2 = c_sim.out + "/channel2" + ext;
    std::error_code ec;
    std::filesystem::create_directories(c_sim.out, ec);
    uint64_t n1 = 0, n2 = 0;
    if (int s = opo_simulate(cfg, c_sim.duration, p1.c_str(), p2.c_str(), &n1, &n2)) {
      opo_config_destroy(cfg);
      return fail(s, "simulating");
    }
    if (int s = write_manifest(cfg, c_sim.out)) {
      opo_config_destroy(cfg);
      return s;
    }
    std::printf("channel1: %" PRIu64 " events, channel2: %" PRIu64 " events (in %s)\n", n1, n2,
                c_sim.out.c_str());
    opo_config_destroy(cfg);
    return 0;
  }

  if (analyze->parsed()) {
    opo_config* cfg = build_config(c_ana, status);
    if (!cfg) return status;
    if (mode == "g2") {
      if (in1.empty() || in2.empty()) {
        std::fprintf(stderr, "opo analyze --mode g2 needs --ch1 and --ch2\n");
        opo_config_destroy(cfg);
        return 1;
      }
      double dnu = 0, err = 0;
      const std::string report = c_ana.out + ".g2.txt";
      if (int s = opo_analyze_g2(cfg, in1.c_str(), in2.c_str(), report.c_str(), &dnu, &err)) {
        opo_config_destroy(cfg);
        return fail(s, "g2 analysis");
      }
      std::printf("delta_nu = %.2f +- %.2f MHz (report %s)\n", dnu, err, report.c_str());
    } else {
      if (in1.empty()) {
        std::fprintf(stderr, "opo analyze --mode franson needs --ch1 <fringe.csv>\n");
        opo_config_destroy(cfg);
        return 1;
      }
      double vr = 0, vs = 0;
      const std::string report = c_ana.out + ".franson.txt";
      if (int s = opo_analyze_franson(cfg, in1.c_str(), report.c_str(), &vr, &vs)) {
        opo_config_destroy(cfg);
        return fail(s, "franson analysis");
      }
      std::printf("visibility raw %.3f, subtracted %.3f (report %s)\n", vr, vs, report.c_str());
    }
    opo_config_destroy(cfg);
    return 0;
  }

  if (budget->parsed()) {
    opo_config* cfg = build_config(c_bud, status);
    if (!cfg) return status;
    const std::string out = c_bud.out + (c_bud.out.find('.') == std::string::npos
                                             ? std::string("_budget.txt")
                                             : std::string());
    if (int s = opo_budget_report(cfg, out.c_str())) {
      opo_config_destroy(cfg);
      return fail(s, "budget");
    }
    std::FILE* f = std::fopen(out.c_str(), "rb");
    if (f) {
      char buf[4096];
      std::size_t n;
      while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) std::fwrite(buf, 1, n, stdout);
      std::fclose(f);
    }
    opo_config_destroy(cfg);
    return 0;
  }

  if (reproduce->parsed()) {
    opo_config* cfg = build_config(c_rep, status);
    if (!cfg) return status;
    int all_pass = 0;
    if (int s = opo_reproduce(cfg, c_rep.out.c_str(), g2_seeds, &all_pass)) {
      opo_config_destroy(cfg);
      return fail(s, "reproduce-paper");
    }
    std::FILE* f = std::fopen((c_rep.out + "/summary.txt").c_str(), "rb");
    if (f) {
      char buf[4096];
      std::size_t n;
      while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) std::fwrite(buf, 1, n, stdout);
      std::fclose(f);
    }
    opo_config_destroy(cfg);
    return all_pass ? 0 : 2;
  }

  return 0;
}
