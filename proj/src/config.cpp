#include "opo/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opo/error.hpp"

namespace opo {

namespace {

struct DoubleKey {
  const char* name;
  double RunConfig::* field;
};

// Single source of truth for the text format; order defines serialization.
constexpr DoubleKey kDoubleKeys[] = {
    {"resonator.length_cm", &RunConfig::length_cm},
    {"resonator.r1", &RunConfig::r1},
    {"resonator.r2", &RunConfig::r2},
    {"resonator.alpha_db_per_cm", &RunConfig::alpha_db_per_cm},
    {"qpm.period_um", &RunConfig::qpm_period_um},
    {"qpm.temp_c", &RunConfig::qpm_temp_c},
    {"pump.wavelength_nm", &RunConfig::pump_nm},
    {"pump.power_mw", &RunConfig::pump_mw},
    {"pump.linewidth_hz", &RunConfig::pump_linewidth_hz},
    {"calibration.fsr_ghz", &RunConfig::target_fsr_ghz},
    {"calibration.tuning_pm_per_c", &RunConfig::target_tuning_pm_per_c},
    {"sim.pair_rate_hz", &RunConfig::pair_rate_hz},
    {"sim.delta_nu_mhz", &RunConfig::delta_nu_mhz},
    {"sim.duration_s", &RunConfig::duration_s},
    {"sim.slab_s", &RunConfig::slab_s},
    {"cavity.escape", &RunConfig::cavity_escape},
    {"det1.efficiency", &RunConfig::det1_efficiency},
    {"det1.dark_cps", &RunConfig::det1_dark_cps},
    {"det1.dead_us", &RunConfig::det1_dead_us},
    {"det1.afterpulse_prob", &RunConfig::det1_afterpulse_prob},
    {"det1.afterpulse_decay_us", &RunConfig::det1_afterpulse_decay_us},
    {"det2.efficiency", &RunConfig::det2_efficiency},
    {"det2.dark_per_ns", &RunConfig::det2_dark_per_ns},
    {"det2.dead_us", &RunConfig::det2_dead_us},
    {"det2.gate_ns", &RunConfig::det2_gate_ns},
    {"det2.gate_center_ns", &RunConfig::det2_gate_center_ns},
    {"franson.enabled", &RunConfig::franson_enabled},
    {"franson.delay_ns", &RunConfig::franson_delay_ns},
    {"franson.v_net", &RunConfig::franson_v_net},
    {"franson.phase_rad", &RunConfig::franson_phase_rad},
    {"franson.gate_ns", &RunConfig::franson_gate_ns},
    {"analysis.bin_ns", &RunConfig::hist_bin_ns},
    {"analysis.span_ns", &RunConfig::hist_span_ns},
    {"analysis.window_ns", &RunConfig::franson_window_ns},
    {"lock.setpoint_frac", &RunConfig::lock_setpoint_frac},
    {"lock.drift_c_per_min", &RunConfig::lock_drift_c_per_min},
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw std::invalid_argument("trailing garbage");
    return v;
  } catch (const std::exception&) {
    throw_config("invalid numeric value '" + value + "' for key '" + key + "'");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<ChainStage> parse_chain(const std::string& key, const std::string& spec) {
  std::vector<ChainStage> stages;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) {
      throw_config("chain stage '" + item + "' lacks ':dB' in key '" + key + "'");
    }
    stages.push_back({trim(item.substr(0, colon)),
                      parse_double(key, trim(item.substr(colon + 1)))});
  }
  return stages;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& k : kDoubleKeys) {
    if (key == k.name) {
      this->*k.field = parse_double(key, value);
      return;
    }
  }
  if (key == "sim.seed") {
    try {
      seed = std::stoull(value);
    } catch (const std::exception&) {
      throw_config("invalid seed '" + value + "'");
    }
    return;
  }
  if (key == "chain.arm1") { parse_chain(key, value); chain_arm1 = value; return; }
  if (key == "chain.arm2") { parse_chain(key, value); chain_arm2 = value; return; }
  throw_config("unknown config key '" + key + "'");
}

std::string RunConfig::get(const std::string& key) const {
  for (const auto& k : kDoubleKeys) {
    if (key == k.name) return format_double(this->*k.field);
  }
  if (key == "sim.seed") return std::to_string(seed);
  if (key == "chain.arm1") return chain_arm1;
  if (key == "chain.arm2") return chain_arm2;
  throw_config("unknown config key '" + key + "'");
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& k : kDoubleKeys) {
    out += k.name;
    out += " = ";
    out += format_double(this->*k.field);
    out += '\n';
  }
  out += "sim.seed = " + std::to_string(seed) + '\n';
  out += "chain.arm1 = " + chain_arm1 + '\n';
  out += "chain.arm2 = " + chain_arm2 + '\n';
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file '" + path + "'");
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.resize(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw_io("config line " + std::to_string(lineno) + " is not 'key = value'");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

SimConfig RunConfig::sim() const {
  SimConfig s;
  s.pair_rate_hz = pair_rate_hz;
  s.delta_nu_mhz = delta_nu_mhz;
  s.duration_s = duration_s;
  s.seed = seed;
  s.cavity_escape = cavity_escape;
  s.slab_duration_s = slab_s;
  s.chain.arm1 = parse_chain("chain.arm1", chain_arm1);
  s.chain.arm2 = parse_chain("chain.arm2", chain_arm2);
  s.detector1 = DetectorSpec::paper_free_running();
  s.detector1.efficiency = det1_efficiency;
  s.detector1.dark_rate_cps = det1_dark_cps;
  s.detector1.dead_time_us = det1_dead_us;
  s.detector1.after_pulse_prob = det1_afterpulse_prob;
  s.detector1.after_pulse_decay_us = det1_afterpulse_decay_us;
  s.detector2 = DetectorSpec::paper_gated();
  s.detector2.efficiency = det2_efficiency;
  s.detector2.dark_prob_per_ns = det2_dark_per_ns;
  s.detector2.dead_time_us = det2_dead_us;
  s.detector2.gate_width_ns = det2_gate_ns;
  s.detector2.gate_center_ns = det2_gate_center_ns;
  if (franson_enabled != 0.0) {
    FransonConfig fc;
    fc.arm_delay_ns = franson_delay_ns;
    fc.v_net = franson_v_net;
    fc.phase_rad = franson_phase_rad;
    s.franson = fc;
    s.detector2.gate_width_ns = franson_gate_ns; // gate must span all three peaks
  }
  return s;
}

LossBudget RunConfig::budget() const {
  return LossBudget::from_sim(sim(), pump_mw);
}

ResonatorSpec RunConfig::resonator() const {
  ResonatorSpec r;
  r.length_cm = length_cm;
  r.r1 = r1;
  r.r2 = r2;
  r.alpha_db_per_cm = alpha_db_per_cm;
  r.dispersion = calibrate(SellmeierModel::default_lithium_niobate_e(), length_cm,
                           target_fsr_ghz, target_tuning_pm_per_c, 2.0 * pump_nm, qpm_temp_c);
  r.validate();
  return r;
}

QpmSpec RunConfig::qpm() const {
  QpmSpec q;
  q.poling_period_um = qpm_period_um;
  q.phase_match_temp_c = qpm_temp_c;
  q.length_cm = length_cm;
  return q;
}

PumpSpec RunConfig::pump() const {
  PumpSpec p;
  p.wavelength_nm = pump_nm;
  p.power_mw = pump_mw;
  p.linewidth_hz = pump_linewidth_hz;
  return p;
}

} // namespace opo
