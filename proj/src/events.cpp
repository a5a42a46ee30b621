#include "opo/events.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "opo/error.hpp"

namespace opo {

void EventStream::sort_and_dedup() {
  std::vector<std::size_t> order(t_ps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t_ps[a] < t_ps[b]; });
  std::vector<std::int64_t> t2;
  std::vector<std::uint8_t> g2;
  t2.reserve(t_ps.size());
  g2.reserve(tags.size());
  for (std::size_t i : order) {
    if (!t2.empty() && t2.back() == t_ps[i]) continue;
    t2.push_back(t_ps[i]);
    g2.push_back(tags[i]);
  }
  t_ps = std::move(t2);
  tags = std::move(g2);
}

void EventStream::check_monotone() const {
  for (std::size_t i = 1; i < t_ps.size(); ++i) {
    if (t_ps[i] <= t_ps[i - 1]) throw_model("event stream timestamps not strictly increasing");
  }
}

void EventStream::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open for write: " + path);
  for (std::size_t i = 0; i < t_ps.size(); ++i) {
    char rec[10];
    rec[0] = static_cast<char>(channel);
    std::int64_t t = t_ps[i];
    for (int b = 0; b < 8; ++b) rec[1 + b] = static_cast<char>((t >> (8 * b)) & 0xff);
    rec[9] = static_cast<char>(tags[i]);
    out.write(rec, sizeof(rec));
  }
  if (!out) throw_io("write failed: " + path);
}

EventStream EventStream::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open: " + path);
  EventStream s;
  char rec[10];
  bool first = true;
  while (in.read(rec, sizeof(rec))) {
    const auto ch = static_cast<std::uint8_t>(rec[0]);
    if (first) {
      s.channel = ch;
      first = false;
    } else if (ch != s.channel) {
      throw_io("mixed channels in event file: " + path);
    }
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(rec[1 + b])) << (8 * b);
    s.t_ps.push_back(static_cast<std::int64_t>(u));
    s.tags.push_back(static_cast<std::uint8_t>(rec[9]));
  }
  if (in.gcount() != 0) throw_io("truncated record in event file: " + path);
  return s;
}

void EventStream::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw_io("cannot open for write: " + path);
  out << "channel,t_ps,tag\n";
  for (std::size_t i = 0; i < t_ps.size(); ++i) {
    out << int(channel) << ',' << t_ps[i] << ',' << int(tags[i]) << '\n';
  }
  if (!out) throw_io("write failed: " + path);
}

EventStream EventStream::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open: " + path);
  EventStream s;
  std::string line;
  if (!std::getline(in, line) || line.rfind("channel,", 0) != 0)
    throw_io("missing CSV header in " + path);
  bool first = true;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int ch = 0, tag = 0;
    long long t = 0;
    if (std::sscanf(line.c_str(), "%d,%lld,%d", &ch, &t, &tag) != 3)
      throw_io("bad CSV record at " + path + ":" + std::to_string(lineno));
    if (first) {
      s.channel = static_cast<std::uint8_t>(ch);
      first = false;
    } else if (ch != s.channel) {
      throw_io("mixed channels in event file: " + path);
    }
    s.t_ps.push_back(t);
    s.tags.push_back(static_cast<std::uint8_t>(tag));
  }
  return s;
}

EventStream EventStream::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open: " + path);
  char head[8] = {};
  in.read(head, sizeof(head));
  in.close();
  if (std::strncmp(head, "channel,", 8) == 0) return load_csv(path);
  return load_binary(path);
}

} // namespace opo
