#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "opo.h"

namespace {
std::string last_error() {
  char buf[512];
  opo_last_error(buf, sizeof buf);
  return buf;
}
} // namespace

TEST_CASE("config lifecycle, set/get, hash, save/load") {
  opo_config* cfg = opo_config_create();
  REQUIRE(cfg != nullptr);

  char buf[128];
  REQUIRE(opo_config_get(cfg, "sim.pair_rate_hz", buf, sizeof buf) == 0);
  CHECK(std::stod(buf) == doctest::Approx(6.6e6));

  CHECK(opo_config_set(cfg, "sim.seed", "123") == 0);
  const uint64_t h1 = opo_config_hash(cfg);
  CHECK(opo_config_set(cfg, "sim.seed", "124") == 0);
  CHECK(opo_config_hash(cfg) != h1);

  // Bad key and bad value report status 1 with a message.
  CHECK(opo_config_set(cfg, "not.a.key", "1") == 1);
  CHECK(!last_error().empty());
  CHECK(opo_config_set(cfg, "sim.seed", "xyz") == 1);
  CHECK(opo_config_get(cfg, "not.a.key", buf, sizeof buf) == 1);

  opo_config* dup = opo_config_clone(cfg);
  REQUIRE(dup != nullptr);
  CHECK(opo_config_hash(dup) == opo_config_hash(cfg));

  const char* path = "capi_test_cfg.cfg";
  REQUIRE(opo_config_save(cfg, path) == 0);
  opo_config* loaded = opo_config_load(path);
  REQUIRE(loaded != nullptr);
  CHECK(opo_config_hash(loaded) == opo_config_hash(cfg));
  std::remove(path);

  CHECK(opo_config_load("missing_config_file.cfg") == nullptr);
  CHECK(!last_error().empty());

  opo_config_destroy(loaded);
  opo_config_destroy(dup);
  opo_config_destroy(cfg);
}

TEST_CASE("scalar helpers") {
  opo_config* cfg = opo_config_create();
  double f = 0.0;
  REQUIRE(opo_finesse(cfg, &f) == 0);
  CHECK(f == doctest::Approx(15.4).epsilon(1e-6));

  double p = 0.0;
  REQUIRE(opo_escape_probability(0.9515, 0.85, &p) == 0);
  CHECK(p == doctest::Approx(0.42302539435453734).epsilon(1e-12));
  CHECK(opo_escape_probability(1.5, 0.85, &p) == 1); // domain error
  CHECK(!last_error().empty());
  opo_config_destroy(cfg);
}

TEST_CASE("double resonance and lock") {
  opo_config* cfg = opo_config_create();
  double t = 0.0, metric = 0.0;
  REQUIRE(opo_find_double_resonance(cfg, 128.6, 0.35, &t, &metric) == 0);
  CHECK(metric > 0.5);
  CHECK(t > 128.4);
  CHECK(t < 128.8);

  double exc = 0.0, mean = 0.0;
  REQUIRE(opo_run_lock(cfg, 60.0, nullptr, &exc, &mean) == 0);
  CHECK(exc < 1e-3);
  CHECK(mean > 0.0);
  opo_config_destroy(cfg);
}

TEST_CASE("simulate then analyze a short run") {
  opo_config* cfg = opo_config_create();
  // Longer run so the g2 fit has a usable peak, but still a few seconds.
  uint64_t n1 = 0, n2 = 0;
  const char* p1 = "capi_test_ch1.csv";
  const char* p2 = "capi_test_ch2.evt";
  REQUIRE(opo_simulate(cfg, 60.0, p1, p2, &n1, &n2) == 0);
  CHECK(n1 > 100000); // ~3.6 kcps singles
  CHECK(n2 > 100);

  double dnu = 0.0, err = 0.0;
  const char* rep = "capi_test_g2.txt";
  REQUIRE(opo_analyze_g2(cfg, p1, p2, rep, &dnu, &err) == 0);
  CHECK(err > 0.0);
  CHECK(std::abs(dnu - 117.0) < 5.0 * err + 30.0);

  std::remove(p1);
  std::remove(p2);
  std::remove(rep);
  opo_config_destroy(cfg);
}

TEST_CASE("budget report") {
  opo_config* cfg = opo_config_create();
  const char* path = "capi_test_budget.txt";
  REQUIRE(opo_budget_report(cfg, path) == 0);
  FILE* f = std::fopen(path, "rb");
  REQUIRE(f != nullptr);
  char head[64] = {0};
  const size_t got = std::fread(head, 1, sizeof head - 1, f);
  std::fclose(f);
  CHECK(got > 0);
  std::remove(path);
  opo_config_destroy(cfg);
}

TEST_CASE("franson fringe analysis") {
  // Synthetic noiseless fringe: V_raw = 0.8 around a mean of 100 with a flat
  // accidental floor of 10 -> V_sub = 0.8 * 100 / 90.
  const char* path = "capi_test_fringe.csv";
  {
    FILE* f = std::fopen(path, "wb");
    REQUIRE(f != nullptr);
    std::fprintf(f, "phase_rad,counts,accidentals\n");
    for (int i = 0; i < 12; ++i) {
      const double phi = 2.0 * 3.14159265358979324 * i / 12.0;
      std::fprintf(f, "%.10f,%.10f,%.2f\n", phi, 100.0 * (1.0 + 0.8 * std::cos(phi)), 10.0);
    }
    std::fclose(f);
  }
  opo_config* cfg = opo_config_create();
  double vr = 0.0, vs = 0.0;
  const char* rep = "capi_test_fringe.txt";
  REQUIRE(opo_analyze_franson(cfg, path, rep, &vr, &vs) == 0);
  CHECK(vr == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(vs == doctest::Approx(0.8 * 100.0 / 90.0).epsilon(1e-6));
  std::remove(path);
  std::remove(rep);
  opo_config_destroy(cfg);
}
