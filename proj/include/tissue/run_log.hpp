#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tissue/types.hpp"

namespace tissue {

/// An antigen value entered the compartment (`I <t> <syscall> <copies>`).
struct InjectionEvent {
  Micros at = 0;
  Syscall syscall = 0;
  std::size_t copies = 0;
  bool operator==(const InjectionEvent&) const = default;
};

/// A Type 2 response producer fired (`R <t> <cell> <syscall>`).
struct ResponseEvent {
  Micros at = 0;
  CellId cell = 0;
  Syscall syscall = 0;
  bool operator==(const ResponseEvent&) const = default;
};

/// VR receptor locks were re-drawn (`X <t> <cell>`).
struct RandomisationEvent {
  Micros at = 0;
  CellId cell = 0;
  bool operator==(const RandomisationEvent&) const = default;
};

/// A presented antigen expired or was consumed by a match (`D <t> <syscall>`).
struct DestroyEvent {
  Micros at = 0;
  Syscall syscall = 0;
  bool operator==(const DestroyEvent&) const = default;
};

/// Periodic engine snapshot (`P <t> <antigen> <responses>`, then one
/// `L <t> <cell> <values...>` line per cell that exposes receptor values).
struct ProbeSnapshot {
  Micros taken_at = 0;
  std::size_t antigen_count = 0;
  std::map<CellId, std::vector<Syscall>> per_cell_vr_locks;
  std::size_t response_count_so_far = 0;
  bool operator==(const ProbeSnapshot&) const = default;
};

using LogEvent = std::variant<InjectionEvent, ResponseEvent, RandomisationEvent, DestroyEvent, ProbeSnapshot>;

/// End-of-run totals (`C ...`). Antigen are conserved:
/// injected == destroyed + evicted + live.
struct RunCounters {
  Micros end_time = 0;
  std::uint64_t ticks = 0;
  std::uint64_t injected = 0;
  std::uint64_t evicted = 0;
  std::uint64_t destroyed = 0;
  std::uint64_t live = 0;
  std::uint64_t presentations = 0;
  std::uint64_t action_time_sum = 0;  // action time in force at each presentation

  double mean_action_time() const {
    return presentations == 0 ? 0.0 : static_cast<double>(action_time_sum) / static_cast<double>(presentations);
  }
  bool operator==(const RunCounters&) const = default;
};

struct RunLog {
  std::vector<LogEvent> events;
  RunCounters counters;

  std::vector<ResponseEvent> responses() const;
  std::vector<RandomisationEvent> randomisations() const;
  std::vector<InjectionEvent> injections() const;
  std::vector<ProbeSnapshot> probes() const;

  bool operator==(const RunLog&) const = default;
};

std::string serialize_run_log(const RunLog& log);

/// Inverse of serialize_run_log. `#` lines are comments. Throws ParseError.
RunLog parse_run_log(std::string_view text);

RunLog load_run_log(const std::string& path);

}  // namespace tissue
