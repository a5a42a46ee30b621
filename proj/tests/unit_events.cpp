#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "opo/error.hpp"
#include "opo/events.hpp"

using namespace opo;

namespace {
EventStream sample_stream() {
  EventStream s;
  s.channel = 3;
  s.push(100, EventTag::Photon);
  s.push(2500, EventTag::Dark);
  s.push(999999999999LL, EventTag::AfterPulse);
  return s;
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name) : path(std::string("events_test_") + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};
} // namespace

TEST_CASE("sort_and_dedup orders and drops duplicates") {
  EventStream s;
  s.push(50, EventTag::Dark);
  s.push(10, EventTag::Photon);
  s.push(50, EventTag::Photon); // duplicate timestamp
  s.push(20, EventTag::AfterPulse);
  s.sort_and_dedup();
  REQUIRE(s.size() == 3);
  CHECK(s.t_ps[0] == 10);
  CHECK(s.t_ps[1] == 20);
  CHECK(s.t_ps[2] == 50);
  // The tag travels with its timestamp.
  CHECK(s.tags[0] == static_cast<std::uint8_t>(EventTag::Photon));
  s.check_monotone(); // must not throw now
}

TEST_CASE("check_monotone rejects disorder") {
  EventStream s;
  s.push(10, EventTag::Photon);
  s.push(5, EventTag::Photon);
  CHECK_THROWS_AS(s.check_monotone(), Error);
}

TEST_CASE("binary round trip") {
  TempFile f("bin.evt");
  const EventStream s = sample_stream();
  s.save_binary(f.path);
  const EventStream r = EventStream::load_binary(f.path);
  CHECK(r.channel == s.channel);
  CHECK(r.t_ps == s.t_ps);
  CHECK(r.tags == s.tags);
}

TEST_CASE("csv round trip") {
  TempFile f("csv.csv");
  const EventStream s = sample_stream();
  s.save_csv(f.path);
  const EventStream r = EventStream::load_csv(f.path);
  CHECK(r.channel == s.channel);
  CHECK(r.t_ps == s.t_ps);
  CHECK(r.tags == s.tags);
}

TEST_CASE("load sniffs the format") {
  TempFile a("sniff.evt");
  TempFile b("sniff.csv");
  const EventStream s = sample_stream();
  s.save_binary(a.path);
  s.save_csv(b.path);
  CHECK(EventStream::load(a.path).t_ps == s.t_ps);
  CHECK(EventStream::load(b.path).t_ps == s.t_ps);
}

TEST_CASE("missing file raises Io error") {
  CHECK_THROWS_AS(EventStream::load("no_such_file_anywhere.evt"), Error);
}
