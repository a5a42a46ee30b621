#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opo {

enum class EventTag : std::uint8_t { Photon = 0, Dark = 1, AfterPulse = 2 };

// Timestamped detection/photon events for one channel. Timestamps are integer
// picoseconds so ordering stays exact over long runs.
struct EventStream {
  std::uint8_t channel = 0;
  std::vector<std::int64_t> t_ps;      // strictly increasing
  std::vector<std::uint8_t> tags;

  std::size_t size() const { return t_ps.size(); }
  void push(std::int64_t t, EventTag tag) {
    t_ps.push_back(t);
    tags.push_back(static_cast<std::uint8_t>(tag));
  }
  void sort_and_dedup();   // stable time order; drops exact duplicate timestamps
  void check_monotone() const;

  // Binary record: channel u8, timestamp i64 (ps), tag u8, little-endian.
  void save_binary(const std::string& path) const;
  static EventStream load_binary(const std::string& path);
  // CSV alternative: header line then "channel,t_ps,tag".
  void save_csv(const std::string& path) const;
  static EventStream load_csv(const std::string& path);
  static EventStream load(const std::string& path); // sniffs csv vs binary
};

} // namespace opo
