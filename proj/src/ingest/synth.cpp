#include "tissue/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tissue/rng.hpp"

namespace tissue::ingest {
namespace {

constexpr Micros kGuard = kMicrosPerSecond;

struct Episode {
  Micros start;
  Micros end;
};

double cpu_at(const SynthProfile& p, const std::vector<Episode>& episodes, Micros t) {
  double load = 0.0;
  for (const auto& e : episodes) {
    if (t < e.start) continue;
    if (t <= e.end) {
      load += 1.0;
    } else {
      load += std::exp(-static_cast<double>(t - e.end) / (p.cpu_decay_s * kMicrosPerSecond));
    }
  }
  const double v = std::min(1.0, p.cpu_baseline + p.cpu_peak * load);
  return std::round(v * 100.0) / 100.0;
}

double memory_at(const std::vector<Episode>& episodes, Micros t) {
  const auto done = std::count_if(episodes.begin(), episodes.end(), [t](const Episode& e) { return e.end < t; });
  return std::round((0.10 + 0.01 * static_cast<double>(done)) * 1000.0) / 1000.0;
}

}  // namespace

std::size_t SynthProfile::total_antigen() const {
  std::size_t n = attack ? attack->count : 0;
  for (const auto& [syscall, count] : frequencies) n += count;
  return n;
}

SessionTrace synthesize(const SynthProfile& profile, std::uint64_t seed) {
  std::size_t normal = 0;
  for (const auto& [syscall, count] : profile.frequencies) normal += count;
  const Micros T = profile.total_time;

  if (T <= 0) throw InfeasibleProfile(profile.name + ": total_time must be > 0");
  if (normal > 0 && profile.max_rate == 0) throw InfeasibleProfile(profile.name + ": max_rate is 0 but antigen exist");
  if (profile.max_rate > normal) {
    throw InfeasibleProfile(profile.name + ": max_rate " + std::to_string(profile.max_rate) +
                            " exceeds the antigen available for a 1 s window (" + std::to_string(normal) + ")");
  }
  if (profile.burst_length <= 0 || profile.burst_length >= kMicrosPerSecond) {
    throw InfeasibleProfile(profile.name + ": burst_length must lie in (0, 1 s)");
  }
  if (profile.background_cluster == 0 || profile.cluster_spread <= 0) {
    throw InfeasibleProfile(profile.name + ": background clusters must be non-empty with a positive spread");
  }
  if (profile.signal_hz <= 0) throw InfeasibleProfile(profile.name + ": signal_hz must be > 0");
  if (profile.attack) {
    const auto& a = *profile.attack;
    if (a.count > 0 && a.syscalls.empty()) throw InfeasibleProfile(profile.name + ": attack has no syscalls");
    if (a.start < 0 || a.end > T || a.start >= a.end) {
      throw InfeasibleProfile(profile.name + ": attack interval must lie inside the session");
    }
  }

  Rng rng(seed);
  const Micros burst_span = T - profile.burst_length;
  if (burst_span < 0) throw InfeasibleProfile(profile.name + ": session shorter than the burst");
  Micros burst_at = 0;
  if (profile.burst_at) {
    burst_at = *profile.burst_at;
  } else {
    const auto lo = static_cast<Micros>(0.15 * static_cast<double>(T));
    const auto hi = std::max(lo + 1, static_cast<Micros>(0.45 * static_cast<double>(T)));
    burst_at = lo + static_cast<Micros>(rng.below(static_cast<std::uint64_t>(hi - lo)));
  }
  const Micros burst_end = burst_at + profile.burst_length;
  if (burst_at < 0 || burst_end > T) throw InfeasibleProfile(profile.name + ": burst does not fit in the session");

  std::vector<Syscall> pool;
  pool.reserve(normal);
  for (const auto& [syscall, count] : profile.frequencies) pool.insert(pool.end(), count, syscall);
  rng.shuffle(std::span<Syscall>(pool));

  const std::size_t burst_count = std::min(profile.max_rate, pool.size());
  const std::size_t background = pool.size() - burst_count;
  const Micros guard_lo = std::max<Micros>(0, burst_at - kGuard);
  const Micros guard_hi = std::min<Micros>(T, burst_end + kGuard);
  const Micros available = T - (guard_hi - guard_lo);
  if (background > 0) {
    if (available <= 0) throw InfeasibleProfile(profile.name + ": no room for background traffic");
    const double rate = static_cast<double>(background) * kMicrosPerSecond / static_cast<double>(available);
    if (rate > static_cast<double>(profile.max_rate) / 2.0) {
      throw InfeasibleProfile(profile.name + ": background rate would rival the burst");
    }
  }

  std::vector<TraceEvent> events;
  events.reserve(profile.total_antigen() + static_cast<std::size_t>(2 * profile.signal_hz * T / kMicrosPerSecond) + 2);
  for (std::size_t i = 0; i < burst_count; ++i) {
    const auto at = burst_at + static_cast<Micros>(rng.below(static_cast<std::uint64_t>(profile.burst_length)));
    events.push_back(TraceEvent::antigen(at, pool[i]));
  }
  // A cluster start is drawn so the whole cluster stays clear of the guard band.
  const Micros before = std::max<Micros>(0, guard_lo - profile.cluster_spread);
  const Micros after = std::max<Micros>(0, T - profile.cluster_spread - guard_hi);
  if (background > 0 && before + after <= 0) throw InfeasibleProfile(profile.name + ": no room for background clusters");
  for (std::size_t i = burst_count; i < pool.size();) {
    const auto size = std::min<std::size_t>(1 + rng.below(profile.background_cluster), pool.size() - i);
    auto start = static_cast<Micros>(rng.below(static_cast<std::uint64_t>(before + after)));
    if (start >= before) start = guard_hi + (start - before);
    for (std::size_t k = 0; k < size; ++k, ++i) {
      const auto at = start + static_cast<Micros>(rng.below(static_cast<std::uint64_t>(profile.cluster_spread)));
      events.push_back(TraceEvent::antigen(at, pool[i]));
    }
  }

  std::vector<Episode> episodes{{burst_at, burst_end}};
  if (profile.attack && profile.attack->count > 0) {
    const auto& a = *profile.attack;
    for (std::size_t i = 0; i < a.count; ++i) {
      const auto at = a.start + static_cast<Micros>(rng.below(static_cast<std::uint64_t>(a.end - a.start)));
      const auto syscall = a.syscalls[static_cast<std::size_t>(rng.below(a.syscalls.size()))];
      events.push_back(TraceEvent::antigen(at, syscall));
    }
    episodes.push_back({a.start, a.end});
  }
  std::sort(episodes.begin(), episodes.end(), [](const Episode& x, const Episode& y) { return x.start < y.start; });

  const auto period = static_cast<Micros>(std::llround(kMicrosPerSecond / profile.signal_hz));
  for (Micros t = 0; t <= T; t += period) {
    events.push_back(TraceEvent::signal(t, 0, cpu_at(profile, episodes, t)));
    events.push_back(TraceEvent::signal(t, 1, memory_at(episodes, t)));
  }

  std::stable_sort(events.begin(), events.end(), [](const TraceEvent& x, const TraceEvent& y) { return x.at < y.at; });
  return SessionTrace{profile.name, std::move(events), T};
}

const std::vector<NamedSyscall>& statd_normal_syscalls() {
  static const std::vector<NamedSyscall> table{
      {"chdir", 12, 2},          {"execve", 11, 2},       {"personality", 136, 2}, {"setsid", 66, 2},
      {"fork", 2, 2},            {"write", 4, 2},         {"send", 309, 2},        {"time", 13, 2},
      {"fstat64", 197, 2},       {"lseek", 19, 2},        {"fsync", 118, 2},       {"getrlimit", 191, 2},
      {"listen", 304, 2},        {"select", 142, 3},      {"gettimeofday", 78, 4}, {"getsockname", 306, 4},
      {"_exit", 1, 4},           {"uname", 122, 4},       {"stat", 106, 4},        {"connect", 303, 5},
      {"getdents", 141, 8},      {"mprotect", 125, 8},    {"poll", 168, 8},        {"sendto", 311, 9},
      {"recvfrom", 312, 9},      {"rt_sigaction", 174, 10}, {"getpid", 20, 10},    {"fcntl", 55, 12},
      {"bind", 302, 12},         {"munmap", 91, 15},      {"brk", 45, 16},         {"fstat", 108, 23},
      {"ioctl", 54, 24},         {"socket", 301, 25},     {"old_mmap", 90, 27},    {"read", 3, 27},
      {"open", 5, 30},           {"close", 6, 557},
  };
  return table;
}

const std::vector<Syscall>& novel_attack_syscalls() {
  // unlink, chmod, setuid, kill, setgid, dup2, socketcall, vfork
  static const std::vector<Syscall> novel{10, 15, 23, 37, 46, 63, 102, 190};
  return novel;
}

std::map<Syscall, std::size_t> scaled_frequencies(std::size_t total) {
  const auto& table = statd_normal_syscalls();
  std::size_t base_total = 0;
  for (const auto& s : table) base_total += s.frequency;

  std::map<Syscall, std::size_t> out;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, table index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto scaled = table[i].frequency * total;
    out[table[i].number] = scaled / base_total;
    assigned += scaled / base_total;
    remainders.emplace_back(scaled % base_total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[table[remainders[k].second].number];
  return out;
}

namespace {

struct BuiltinRow {
  std::string_view name;
  double seconds;
  std::size_t antigen;
  std::size_t max_rate;
  std::size_t total_signals;
  double burst_at_s;
  bool attack;
};

constexpr BuiltinRow kRows[] = {
    {"success1", 55, 1739, 1102, 474, 15.0, true}, {"success2", 36, 1743, 790, 316, 8.0, true},
    {"failure1", 54, 518, 405, 461, 12.0, false},  {"failure2", 68, 495, 405, 590, 15.0, false},
    {"normal1", 38, 434, 405, 334, 8.0, false},    {"normal2", 104, 450, 405, 908, 20.0, false},
};

// Share of success-session syscalls that are novel attack traffic.
constexpr double kNovelShare = 0.09;

const BuiltinRow& find_row(std::string_view name) {
  for (const auto& row : kRows) {
    if (row.name == name) return row;
  }
  throw std::invalid_argument("unknown profile `" + std::string(name) + "`");
}

}  // namespace

SynthProfile builtin_profile(std::string_view name) {
  const auto& row = find_row(name);
  SynthProfile p;
  p.name = std::string(row.name);
  p.total_time = static_cast<Micros>(row.seconds * kMicrosPerSecond);
  p.max_rate = row.max_rate;
  p.burst_at = static_cast<Micros>(row.burst_at_s * kMicrosPerSecond);

  if (name == "normal1" || name == "normal2") {
    // The combined frequencies split across the two sessions, odd counts
    // rounding down for normal1 and up for normal2.
    const bool first = name == "normal1";
    for (const auto& s : statd_normal_syscalls()) p.frequencies[s.number] = first ? s.frequency / 2 : (s.frequency + 1) / 2;
    return p;
  }

  std::size_t novel = 0;
  if (row.attack) {
    novel = static_cast<std::size_t>(std::llround(kNovelShare * static_cast<double>(row.antigen)));
    const Micros start = *p.burst_at + p.burst_length + 2 * kMicrosPerSecond;
    p.attack = AttackSpec{novel_attack_syscalls(), novel, start, start + 4 * kMicrosPerSecond};
  }
  p.frequencies = scaled_frequencies(row.antigen - novel);
  return p;
}

std::vector<std::string> builtin_profile_names() {
  std::vector<std::string> names;
  for (const auto& row : kRows) names.emplace_back(row.name);
  return names;
}

SessionStats builtin_targets(std::string_view name) {
  const auto& row = find_row(name);
  return SessionStats{row.seconds, row.antigen, row.max_rate, 2, row.total_signals};
}

}  // namespace tissue::ingest
