#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tissue/types.hpp"

namespace tissue::ingest {

enum class EventKind { antigen, signal };

struct TraceEvent {
  Micros at = 0;
  EventKind kind = EventKind::antigen;
  Syscall syscall = 0;    // antigen only
  ChannelId channel = 0;  // signal only
  double value = 0.0;     // signal only

  static TraceEvent antigen(Micros at, Syscall syscall) { return {at, EventKind::antigen, syscall, 0, 0.0}; }
  static TraceEvent signal(Micros at, ChannelId channel, double value) {
    return {at, EventKind::signal, 0, channel, value};
  }

  bool operator==(const TraceEvent&) const = default;
};

/// One monitored session: antigen and signal samples in time order.
struct SessionTrace {
  std::string name;
  std::vector<TraceEvent> events;
  Micros declared_duration = 0;

  std::size_t antigen_count() const;
  bool operator==(const SessionTrace&) const = default;
};

/// The Table-2 style summary of a session.
struct SessionStats {
  double total_time = 0.0;  // seconds
  std::size_t total_antigen = 0;
  std::size_t max_rate = 0;  // most antigen in any [t, t + 1 s) window starting at an antigen
  std::size_t num_signals = 0;
  std::size_t total_signals = 0;

  bool operator==(const SessionStats&) const = default;
};

/// Parses the line format
///
///   #session <name> <duration_s>
///   A <t_us> <syscall>
///   S <t_us> <channel> <value>
///
/// Other `#` lines are comments. Event times must be non-decreasing and no
/// later than the declared duration. Throws ParseError with the line number.
SessionTrace parse_trace(std::string_view text);

std::string serialize_trace(const SessionTrace& trace);

/// Reads and parses a trace file; std::runtime_error naming the path if it
/// cannot be opened.
SessionTrace load_trace(const std::string& path);

/// Throws std::invalid_argument if events are out of time order or past the
/// declared duration.
void check_ordered(const SessionTrace& trace);

SessionStats session_stats(const SessionTrace& trace);

}  // namespace tissue::ingest
