// Acceptance gate: one [PASS]/[FAIL] line per criterion, exit code = number of
// failed criteria. Criterion 2 reproduces the quoted escape-probability value
// from the published inputs; the closed form gives 0.423, so it is expected to
// stay red (see README, "Known deviations").
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "opo/analysis.hpp"
#include "opo/config.hpp"
#include "opo/error.hpp"
#include "opo/montecarlo.hpp"
#include "opo/reproduce.hpp"

using namespace opo;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << " — " << detail << "\n";
  if (!pass) ++failures;
}

const CriterionRow& find_row(const ReproduceReport& rep, const std::string& id) {
  for (const auto& r : rep.rows)
    if (r.id == id) return r;
  throw std::runtime_error("missing reproduce row " + id);
}

// True iff every listed reproduce row passed; collects "id=value" details.
bool rows_pass(const ReproduceReport& rep, const std::vector<std::string>& ids,
               std::string& detail) {
  bool ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const CriterionRow& r = find_row(rep, ids[i]);
    ok = ok && r.pass;
    if (i) os << ", ";
    os << r.id << "=" << r.computed << (r.pass ? "" : " (out of tolerance)");
  }
  detail = os.str();
  return ok;
}

// Fraction of seeds whose fitted bandwidth lies within 3 standard errors of
// the configured 117 MHz.
double g2_recovery(const RunConfig& cfg, double rate_scale, double duration_s, int n_seeds,
                   std::uint64_t seed0) {
  SimConfig sc = cfg.sim();
  sc.franson.reset();
  sc.pair_rate_hz *= rate_scale;
  sc.duration_s = duration_s;
  int ok = 0;
  for (int s = 0; s < n_seeds; ++s) {
    sc.seed = seed0 + static_cast<std::uint64_t>(s);
    const SimResult run = simulate_run(sc);
    const auto delays = tdc_coincidences(run.channel1, run.channel2, cfg.hist_span_ns);
    const Histogram h =
        Histogram::from_delays(delays, -cfg.hist_span_ns, cfg.hist_span_ns, cfg.hist_bin_ns);
    try {
      const G2Fit fit = fit_g2(h);
      if (std::abs(fit.delta_nu_mhz - cfg.delta_nu_mhz) <= 3.0 * fit.delta_nu_err_mhz) ++ok;
    } catch (const Error&) {
      // an unusable histogram counts as a miss
    }
  }
  return double(ok) / double(n_seeds);
}

// Byte-identical directory comparison (same file set, same contents).
bool dirs_identical(const fs::path& a, const fs::path& b, std::string& detail) {
  auto listing = [](const fs::path& root) {
    std::vector<fs::path> rel;
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), root));
    std::sort(rel.begin(), rel.end());
    return rel;
  };
  const auto la = listing(a), lb = listing(b);
  if (la != lb) {
    detail = "artifact sets differ";
    return false;
  }
  for (const auto& r : la) {
    std::ifstream fa(a / r, std::ios::binary), fb(b / r, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
      detail = "mismatch in " + r.string();
      return false;
    }
  }
  detail = std::to_string(la.size()) + " artifacts byte-identical";
  return true;
}

} // namespace

int main() {
  const RunConfig cfg = RunConfig::paper_default();
  const fs::path dir1 = "acceptance_run1";
  const fs::path dir2 = "acceptance_run2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  const ReproduceReport rep = reproduce_paper(cfg, dir1.string(), 10);
  std::string d;

  report(1, "cavity closure: finesse 15.4, numeric scan within 0.5%",
         rows_pass(rep, {"1a", "1b"}, d), d);
  report(2, "escape probability 0.43 +- 0.005 from t=0.9515, R=0.85",
         rows_pass(rep, {"2"}, d), d);
  report(3, "dispersion calibration: FSR, tuning, mode-hop, restore",
         rows_pass(rep, {"3a", "3b", "3c", "3d"}, d), d);
  report(4, "time-domain formulas: T_c = 1.891 ns, tau_coh = 2.721 ns",
         rows_pass(rep, {"4a", "4b"}, d), d);

  {
    const double f1 = g2_recovery(cfg, 1.0, 100.0, 100, cfg.seed);
    const double f10 = g2_recovery(cfg, 10.0, 20.0, 100, cfg.seed + 5000);
    std::ostringstream os;
    os << "paper rate " << f1 << ", 10x rate " << f10 << " (>= 0.95 of 100 seeds each)";
    report(5, "g2 round trip recovers 117 MHz within 3 sigma", f1 >= 0.95 && f10 >= 0.95,
           os.str());
  }

  report(6, "rate budget: losses, singles, coincidences, mu, brightness",
         rows_pass(rep, {"6a", "6b", "6c", "6d", "6e", "6f", "6g"}, d), d);
  report(7, "accidental budget: closed forms and Monte-Carlo baseline",
         rows_pass(rep, {"7a", "7b", "7c"}, d), d);
  report(8, "Franson: peaks, 2:1:1 ratio, visibilities, Bell verdict",
         rows_pass(rep, {"8a", "8b", "8c", "8d", "8e"}, d), d);
  report(9, "temperature lock: excursion < 1e-3 C, throughput 0.575 of peak",
         rows_pass(rep, {"9a", "9b"}, d), d);

  {
    reproduce_paper(cfg, dir2.string(), 10);
    const bool same = dirs_identical(dir1, dir2, d);
    report(10, "determinism: reproduce-paper is byte-identical across runs", same, d);
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
            << "\n";
  return failures;
}
