#include "opo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "opo/error.hpp"
#include "opo/rng.hpp"

namespace opo {

namespace {
constexpr double kPsPerSecond = 1e12;
std::int64_t to_ps(double seconds) { return static_cast<std::int64_t>(std::llround(seconds * kPsPerSecond)); }
} // namespace

double OpticalChain::arm_db(int arm) const {
  const auto& stages = (arm == 2) ? arm2 : arm1;
  double total = 0.0;
  for (const auto& s : stages) total += s.loss_db;
  return total;
}

double OpticalChain::survival(int arm, double p_out) const {
  return p_out * std::pow(10.0, -arm_db(arm) / 10.0);
}

OpticalChain OpticalChain::paper_default() {
  OpticalChain c;
  c.arm1 = {{"silicon-filter", 0.4}, {"fibre-coupling", 5.2}, {"10pm-filter", 2.8}, {"lock-penalty", 2.4}};
  c.arm2 = {{"silicon-filter", 0.4}, {"fibre-coupling", 5.2}, {"10pm-filter", 3.8}, {"lock-penalty", 2.4}};
  return c;
}

void OpticalChain::validate() const {
  for (const auto* stages : {&arm1, &arm2}) {
    for (const auto& s : *stages) {
      if (s.loss_db < 0) throw_config("chain stage '" + s.label + "' has negative loss");
    }
  }
}

void DetectorSpec::validate() const {
  if (efficiency < 0 || efficiency > 1) throw_config("detector efficiency must be in [0,1]");
  if (dead_time_us < 0) throw_config("dead time must be >= 0");
  if (after_pulse_prob < 0 || after_pulse_prob > 1) throw_config("after-pulse probability must be in [0,1]");
  if (mode == DetectorMode::Gated && gate_width_ns <= 0) throw_config("gated detector needs gate width > 0");
}

DetectorSpec DetectorSpec::paper_free_running() {
  DetectorSpec d;
  d.mode = DetectorMode::FreeRunning;
  d.efficiency = 0.021;
  d.dark_rate_cps = 600.0;
  d.dead_time_us = 30.0;
  d.after_pulse_prob = 0.008;
  d.after_pulse_decay_us = 10.0;
  return d;
}

DetectorSpec DetectorSpec::paper_gated() {
  DetectorSpec d;
  d.mode = DetectorMode::Gated;
  d.efficiency = 0.078;
  d.dark_prob_per_ns = 8.0e-6;
  d.dead_time_us = 10.0;
  d.after_pulse_prob = 0.0;
  d.gate_width_ns = 50.0;
  d.gate_center_ns = 0.0;
  return d;
}

void FransonConfig::validate(double tau_coh_ns, double tau_pump_ns) const {
  if (!(arm_delay_ns > 3.0 * tau_coh_ns)) {
    throw_config("Franson arm delay must exceed the photon coherence time by a wide margin");
  }
  if (!(arm_delay_ns < tau_pump_ns / 3.0)) {
    throw_config("Franson arm delay must stay well below the pump coherence time");
  }
  if (v_net < 0 || v_net > 1) throw_config("net visibility must be in [0,1]");
}

void SimConfig::validate() const {
  if (pair_rate_hz < 0 || duration_s < 0) throw_config("rate and duration must be >= 0");
  if (!(delta_nu_mhz > 0)) throw_config("bandwidth must be positive");
  if (cavity_escape < 0 || cavity_escape > 1) throw_config("cavity escape probability must be in [0,1]");
  chain.validate();
  detector1.validate();
  detector2.validate();
}

std::vector<PairEvent> generate_pairs(const SimConfig& cfg) {
  cfg.validate();
  std::vector<PairEvent> pairs;
  if (cfg.pair_rate_hz <= 0 || cfg.duration_s <= 0) return pairs;
  Rng rng(cfg.seed);
  const double scale_s = 1.0 / (2.0 * M_PI * cfg.delta_nu_mhz * 1e6);
  double t = rng.exponential(cfg.pair_rate_hz);
  while (t < cfg.duration_s) {
    PairEvent p;
    p.t_signal_ps = to_ps(t);
    p.t_idler_ps = to_ps(t + rng.laplace(scale_s));
    pairs.push_back(p);
    t += rng.exponential(cfg.pair_rate_hz);
  }
  return pairs;
}

ArmPhotons apply_chain(const std::vector<PairEvent>& pairs, const OpticalChain& chain,
                       double cavity_escape, std::uint64_t seed) {
  chain.validate();
  const double p1 = chain.survival(1, cavity_escape);
  const double p2 = chain.survival(2, cavity_escape);
  if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1) throw_config("arm survival outside [0,1]");
  Rng rng(seed);
  ArmPhotons out;
  for (const auto& p : pairs) {
    if (rng.bernoulli(p1)) out.arm1_ps.push_back(p.t_signal_ps);
    if (rng.bernoulli(p2)) out.arm2_ps.push_back(p.t_idler_ps);
  }
  return out;
}

std::vector<PairEvent> franson_transform(const std::vector<PairEvent>& pairs,
                                         const FransonConfig& fc, std::uint64_t seed,
                                         std::vector<PathClass>* class_log) {
  Rng rng(seed);
  const std::int64_t delay_ps = to_ps(fc.arm_delay_ns * 1e-9);
  const double p_joint_same = (1.0 + fc.v_net * std::cos(fc.phase_rad)) / 4.0;
  std::vector<PairEvent> out;
  out.reserve(pairs.size() / 4);
  for (const auto& p : pairs) {
    const bool signal_long = rng.bernoulli(fc.coupler_split);
    const bool idler_long = rng.bernoulli(fc.coupler_split);
    PathClass cls;
    if (signal_long && idler_long) cls = PathClass::LongLong;
    else if (!signal_long && !idler_long) cls = PathClass::ShortShort;
    else if (signal_long) cls = PathClass::LongShort;
    else cls = PathClass::ShortLong;
    if (class_log) class_log->push_back(cls);

    bool keep;
    if (cls == PathClass::ShortShort || cls == PathClass::LongLong) {
      // Two-photon interference lives entirely in the joint survival of
      // indistinguishable same-arm events at the monitored output.
      keep = rng.bernoulli(p_joint_same);
    } else {
      keep = rng.bernoulli(0.5) && rng.bernoulli(0.5); // each photon exits monitored port
    }
    if (!keep) continue;
    PairEvent q = p;
    if (signal_long) q.t_signal_ps += delay_ps;
    if (idler_long) q.t_idler_ps += delay_ps;
    q.path = cls;
    out.push_back(q);
  }
  return out;
}

namespace {

struct GateIndex {
  const EventStream* trigger = nullptr;
  std::int64_t center_ps = 0;
  std::int64_t half_ps = 0;

  bool in_gate(std::int64_t t) const {
    const auto& ts = trigger->t_ps;
    const std::int64_t want = t - center_ps;
    auto it = std::lower_bound(ts.begin(), ts.end(), want);
    if (it != ts.end() && *it - want <= half_ps) return true;
    if (it != ts.begin() && want - *(it - 1) <= half_ps) return true;
    return false;
  }
};

} // namespace

EventStream detect(const std::vector<std::int64_t>& photons_ps, const DetectorSpec& spec,
                   double duration_s, std::uint64_t seed, std::uint8_t channel,
                   const EventStream* trigger) {
  spec.validate();
  if (spec.mode == DetectorMode::Gated && trigger == nullptr) {
    throw_config("gated detector requires a trigger stream");
  }
  Rng rng(seed);

  // Candidate detections: efficiency thinning plus dark counts.
  std::vector<std::pair<std::int64_t, std::uint8_t>> cands;
  cands.reserve(photons_ps.size() / 4 + 64);
  for (std::int64_t t : photons_ps) {
    if (rng.bernoulli(spec.efficiency)) cands.emplace_back(t, static_cast<std::uint8_t>(EventTag::Photon));
  }

  GateIndex gates;
  if (spec.mode == DetectorMode::Gated) {
    gates.trigger = trigger;
    gates.center_ps = to_ps(spec.gate_center_ns * 1e-9);
    gates.half_ps = to_ps(spec.gate_width_ns * 0.5e-9);
    std::erase_if(cands, [&](const auto& c) { return !gates.in_gate(c.first); });
    // Per-gate dark counts, uniform inside the gate.
    const double p_dark = std::min(1.0, spec.dark_prob_per_ns * spec.gate_width_ns);
    for (std::int64_t tg : trigger->t_ps) {
      if (rng.bernoulli(p_dark)) {
        const std::int64_t off =
            static_cast<std::int64_t>(std::llround((rng.uniform() - 0.5) * 2.0 * double(gates.half_ps)));
        cands.emplace_back(tg + gates.center_ps + off, static_cast<std::uint8_t>(EventTag::Dark));
      }
    }
  } else if (spec.dark_rate_cps > 0) {
    double t = rng.exponential(spec.dark_rate_cps);
    while (t < duration_s) {
      cands.emplace_back(to_ps(t), static_cast<std::uint8_t>(EventTag::Dark));
      t += rng.exponential(spec.dark_rate_cps);
    }
  }
  std::sort(cands.begin(), cands.end());

  // Dead-time sweep with after-pulse injection, processed in time order.
  EventStream out;
  out.channel = channel;
  const std::int64_t dead_ps = to_ps(spec.dead_time_us * 1e-6);
  const std::int64_t end_ps = to_ps(duration_s);
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> afterpulses;
  std::int64_t last = std::numeric_limits<std::int64_t>::min() / 2;
  std::size_t i = 0;
  while (i < cands.size() || !afterpulses.empty()) {
    std::int64_t t;
    std::uint8_t tag;
    if (!afterpulses.empty() && (i >= cands.size() || afterpulses.top() < cands[i].first)) {
      t = afterpulses.top();
      afterpulses.pop();
      tag = static_cast<std::uint8_t>(EventTag::AfterPulse);
      if (spec.mode == DetectorMode::Gated && !gates.in_gate(t)) continue;
    } else {
      t = cands[i].first;
      tag = cands[i].second;
      ++i;
    }
    if (t >= end_ps) continue;
    if (t - last < dead_ps) continue;
    if (t == last) continue;
    last = t;
    out.push(t, static_cast<EventTag>(tag));
    if (spec.after_pulse_prob > 0 && rng.bernoulli(spec.after_pulse_prob)) {
      afterpulses.push(t + to_ps(rng.exponential(1.0 / (spec.after_pulse_decay_us * 1e-6))));
    }
  }
  return out;
}

std::vector<double> tdc_coincidences(const EventStream& start, const EventStream& stop,
                                     double span_ns) {
  const std::int64_t span_ps = to_ps(span_ns * 1e-9);
  std::vector<double> delays;
  std::size_t lo = 0;
  for (std::int64_t ts : start.t_ps) {
    while (lo < stop.t_ps.size() && stop.t_ps[lo] < ts - span_ps) ++lo;
    for (std::size_t j = lo; j < stop.t_ps.size() && stop.t_ps[j] <= ts + span_ps; ++j) {
      delays.push_back(double(stop.t_ps[j] - ts) * 1e-3); // ns
    }
  }
  return delays;
}

namespace {

// Thinned pair generation for one slab: only photons that would survive the
// chain and the detector efficiency are materialized.
struct SlabGen {
  double p1 = 0.0;        // end-to-end candidate probability, arm 1
  double p2 = 0.0;
  const FransonConfig* franson = nullptr;
  double scale_s = 0.0;   // Laplace delay scale
  std::int64_t delay_ps = 0;

  void run(Rng& rng, double t0_s, double t1_s, double pair_rate,
           std::vector<std::int64_t>& ch1, std::vector<std::int64_t>& ch2) const {
    double q1 = p1, q2 = p2, qboth = p1 * p2;
    double p_same_joint = 0.0, p_mixed_cond = 0.0;
    if (franson) {
      p_same_joint = (1.0 + franson->v_net * std::cos(franson->phase_rad)) / 4.0;
      q1 = p1 * 0.5;
      q2 = p2 * 0.5;
      qboth = p1 * p2 * (0.25 * 0.5 + 0.5 * p_same_joint); // mixed half at 1/4, same half jointly
      p_mixed_cond = (0.25 * 0.5) / (0.25 * 0.5 + 0.5 * p_same_joint);
    }
    const double p_any = q1 + q2 - qboth;
    if (p_any <= 0 || pair_rate <= 0) return;
    const double cand_rate = pair_rate * p_any;
    const double pr_both = qboth / p_any;
    const double pr_only1 = (q1 - qboth) / p_any;

    double t = t0_s + rng.exponential(cand_rate);
    while (t < t1_s) {
      const double u = rng.uniform();
      const std::int64_t ts = to_ps(t);
      const std::int64_t ti = to_ps(t) + to_ps(rng.laplace(scale_s));
      if (u <= pr_both) {
        std::int64_t s_shift = 0, i_shift = 0;
        if (franson) {
          if (rng.bernoulli(p_mixed_cond)) {
            // SL or LS, equally likely
            if (rng.bernoulli(0.5)) s_shift = delay_ps; else i_shift = delay_ps;
          } else {
            if (rng.bernoulli(0.5)) { s_shift = delay_ps; i_shift = delay_ps; } // LL vs SS
          }
        }
        ch1.push_back(ts + s_shift);
        ch2.push_back(ti + i_shift);
      } else if (u <= pr_both + pr_only1) {
        std::int64_t s_shift = (franson && rng.bernoulli(0.5)) ? delay_ps : 0;
        ch1.push_back(ts + s_shift);
      } else {
        std::int64_t i_shift = (franson && rng.bernoulli(0.5)) ? delay_ps : 0;
        ch2.push_back(ti + i_shift);
      }
      t += rng.exponential(cand_rate);
    }
  }
};

} // namespace

SimResult simulate_run(const SimConfig& cfg) {
  cfg.validate();
  SimResult res;
  res.duration_s = cfg.duration_s;

  SlabGen gen;
  gen.p1 = cfg.chain.survival(1, cfg.cavity_escape) * cfg.detector1.efficiency;
  gen.p2 = cfg.chain.survival(2, cfg.cavity_escape) * cfg.detector2.efficiency;
  gen.franson = cfg.franson ? &*cfg.franson : nullptr;
  gen.scale_s = 1.0 / (2.0 * M_PI * cfg.delta_nu_mhz * 1e6);
  if (cfg.franson) gen.delay_ps = to_ps(cfg.franson->arm_delay_ns * 1e-9);

  std::vector<std::int64_t> ch1_cand, ch2_cand;
  const double slab = cfg.slab_duration_s > 0 ? cfg.slab_duration_s : cfg.duration_s;
  std::uint64_t slab_index = 0;
  for (double t0 = 0.0; t0 < cfg.duration_s; t0 += slab, ++slab_index) {
    Rng rng = Rng::for_slab(cfg.seed, slab_index);
    gen.run(rng, t0, std::min(t0 + slab, cfg.duration_s), cfg.pair_rate_hz, ch1_cand, ch2_cand);
    res.pairs_generated += rng.poisson(cfg.pair_rate_hz * (std::min(t0 + slab, cfg.duration_s) - t0));
  }
  std::sort(ch1_cand.begin(), ch1_cand.end()); // franson shifts can cross slab-local order
  std::sort(ch2_cand.begin(), ch2_cand.end());

  // Efficiency is already folded into the candidates.
  DetectorSpec d1 = cfg.detector1;
  d1.efficiency = 1.0;
  DetectorSpec d2 = cfg.detector2;
  d2.efficiency = 1.0;
  if (d1.mode == DetectorMode::Gated) {
    throw_config("detector 1 is the trigger and must be free-running");
  }
  res.channel1 = detect(ch1_cand, d1, cfg.duration_s, splitmix_of(cfg.seed, 0x11), 1, nullptr);
  res.channel2 = detect(ch2_cand, d2, cfg.duration_s, splitmix_of(cfg.seed, 0x22), 2,
                        d2.mode == DetectorMode::Gated ? &res.channel1 : nullptr);
  res.channel1.check_monotone();
  res.channel2.check_monotone();
  return res;
}

} // namespace opo
