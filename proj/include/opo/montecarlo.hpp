#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opo/events.hpp"

namespace opo {

struct ChainStage {
  std::string label;
  double loss_db = 0.0;
};

struct OpticalChain {
  std::vector<ChainStage> arm1;
  std::vector<ChainStage> arm2;

  double arm_db(int arm) const;          // sum of stages
  double survival(int arm, double p_out) const; // p_out * 10^(-dB/10)
  static OpticalChain paper_default();
  void validate() const;
};

enum class DetectorMode { FreeRunning, Gated };

struct DetectorSpec {
  DetectorMode mode = DetectorMode::FreeRunning;
  double efficiency = 0.021;
  double dark_rate_cps = 600.0;          // free-running
  double dark_prob_per_ns = 8.0e-6;      // gated
  double dead_time_us = 30.0;
  double after_pulse_prob = 0.008;
  double after_pulse_decay_us = 10.0;
  double gate_width_ns = 50.0;
  double gate_center_ns = 0.0;           // expected pair delay relative to trigger

  void validate() const;
  static DetectorSpec paper_free_running();
  static DetectorSpec paper_gated();
};

enum class PathClass : std::uint8_t { ShortShort = 0, LongLong = 1, ShortLong = 2, LongShort = 3 };

struct FransonConfig {
  double arm_delay_ns = 10.0;
  double v_net = 0.95;
  double phase_rad = 0.0;
  double coupler_split = 0.5;

  // Checks delay >> photon coherence time and << pump coherence time.
  void validate(double tau_coh_ns, double tau_pump_ns) const;
};

struct PairEvent {
  std::int64_t t_signal_ps = 0;
  std::int64_t t_idler_ps = 0;
  PathClass path = PathClass::ShortShort; // meaningful after franson_transform
};

struct SimConfig {
  double pair_rate_hz = 6.6e6;  // generated pairs/s inside the filter window
  double delta_nu_mhz = 117.0;
  double duration_s = 1.0;
  std::uint64_t seed = 42;
  double cavity_escape = 0.30199517204020161; // 10^(-5.2 dB / 10)
  OpticalChain chain = OpticalChain::paper_default();
  DetectorSpec detector1 = DetectorSpec::paper_free_running();
  DetectorSpec detector2 = DetectorSpec::paper_gated();
  std::optional<FransonConfig> franson;
  double slab_duration_s = 10.0;

  void validate() const;
};

// --- elementary operations -------------------------------------------------

// Poisson pair births; idler-signal delay two-sided exponential, scale 1/(2 pi dnu).
std::vector<PairEvent> generate_pairs(const SimConfig& cfg);

struct ArmPhotons {
  std::vector<std::int64_t> arm1_ps;
  std::vector<std::int64_t> arm2_ps;
};

// Bernoulli thinning: arm-k survival = p_out * 10^(-dB_k/10).
ArmPhotons apply_chain(const std::vector<PairEvent>& pairs, const OpticalChain& chain,
                       double cavity_escape, std::uint64_t seed);

// Folded-interferometer path logic. Photons pick short/long; pairs where both
// photons enter the monitored output are kept, same-arm pairs jointly with
// probability (1 + V cos(phi))/4, mixed pairs independently with 1/4. Long-arm
// photons are delayed. Per-photon marginal survival is exactly 1/2.
std::vector<PairEvent> franson_transform(const std::vector<PairEvent>& pairs,
                                         const FransonConfig& fc, std::uint64_t seed,
                                         std::vector<PathClass>* class_log = nullptr);

// Detector physics: efficiency thinning, dark counts, non-paralyzable dead time,
// after-pulses, optional gating on a trigger stream.
EventStream detect(const std::vector<std::int64_t>& photons_ps, const DetectorSpec& spec,
                   double duration_s, std::uint64_t seed, std::uint8_t channel,
                   const EventStream* trigger = nullptr);

// Multi-stop coincidence extraction: every (start, stop) delay within +-span.
std::vector<double> tdc_coincidences(const EventStream& start, const EventStream& stop,
                                     double span_ns);

// --- composite fast path ---------------------------------------------------

struct SimResult {
  EventStream channel1;
  EventStream channel2;
  std::uint64_t pairs_generated = 0; // statistically; from thinned generation
  double duration_s = 0.0;
};

// Event-level run with chain and efficiency losses folded into the generator
// (statistically identical to the elementary-op pipeline, but feasible at
// the paper's 6.6e6 pairs/s). Deterministic per seed, slab-seeded.
SimResult simulate_run(const SimConfig& cfg);

} // namespace opo
