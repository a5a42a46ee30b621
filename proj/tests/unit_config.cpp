#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "opo/config.hpp"
#include "opo/error.hpp"

using namespace opo;

TEST_CASE("defaults carry the calibrated model") {
  const RunConfig c = RunConfig::paper_default();
  CHECK(c.alpha_db_per_cm == doctest::Approx(0.049616342069));
  CHECK(c.pair_rate_hz == doctest::Approx(6.6e6));
  CHECK(c.det2_gate_ns == doctest::Approx(50.0));
  CHECK(std::stod(c.get("resonator.alpha_db_per_cm")) == doctest::Approx(0.049616342069));
}

TEST_CASE("set/get round trip and unknown keys") {
  RunConfig c;
  c.set("sim.pair_rate_hz", "1.5e6");
  CHECK(c.pair_rate_hz == doctest::Approx(1.5e6));
  CHECK(c.get("sim.pair_rate_hz") == "1500000");
  c.set("sim.seed", "99");
  CHECK(c.seed == 99);
  c.set("chain.arm1", "only-stage:3.0");
  CHECK(c.sim().chain.arm1.size() == 1);
  CHECK(c.sim().chain.arm_db(1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(c.set("no.such.key", "1"), Error);
  CHECK_THROWS_AS(c.get("no.such.key"), Error);
  CHECK_THROWS_AS(c.set("sim.pair_rate_hz", "bananas"), Error);
}

TEST_CASE("serialize/load round trip preserves every key") {
  RunConfig c;
  c.set("sim.pair_rate_hz", "1.23e6");
  c.set("det2.gate_ns", "40");
  c.set("franson.enabled", "1");
  const std::string path = "config_test_roundtrip.cfg";
  {
    std::ofstream f(path, std::ios::binary);
    f << "# comment line\n\n" << c.serialize();
  }
  const RunConfig r = RunConfig::load(path);
  std::remove(path.c_str());
  CHECK(r.serialize() == c.serialize());
  CHECK(r.hash() == c.hash());
  CHECK(r.pair_rate_hz == doctest::Approx(1.23e6));
  CHECK(r.det2_gate_ns == doctest::Approx(40.0));
}

TEST_CASE("hash tracks content") {
  RunConfig a, b;
  CHECK(a.hash() == b.hash());
  b.set("sim.seed", "43");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("derived module configs") {
  RunConfig c;
  const SimConfig s = c.sim();
  CHECK(s.pair_rate_hz == doctest::Approx(c.pair_rate_hz));
  CHECK(s.detector2.gate_width_ns == doctest::Approx(50.0));
  CHECK(!s.franson.has_value());

  c.set("franson.enabled", "1");
  const SimConfig sf = c.sim();
  REQUIRE(sf.franson.has_value());
  CHECK(sf.franson->arm_delay_ns == doctest::Approx(10.0));

  const LossBudget b = c.budget();
  CHECK(arm_losses(b).db1 == doctest::Approx(10.8));

  const ResonatorSpec r = c.resonator();
  CHECK(finesse(r) == doctest::Approx(15.4).epsilon(1e-6));
  const ModeComb comb = mode_comb(r, 128.6, 1559.9, 1560.1);
  REQUIRE(comb.fsr_ghz.size() >= 1);
  CHECK(comb.fsr_ghz[comb.fsr_ghz.size() / 2] == doctest::Approx(1.8).epsilon(1e-3));

  CHECK(c.pump().degeneracy_nm() == doctest::Approx(1560.054));
}

TEST_CASE("load rejects malformed files") {
  const std::string path = "config_test_bad.cfg";
  {
    std::ofstream f(path, std::ios::binary);
    f << "sim.pair_rate_hz 1e6\n"; // missing '='
  }
  CHECK_THROWS_AS(RunConfig::load(path), Error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(RunConfig::load("definitely_missing.cfg"), Error);
}
