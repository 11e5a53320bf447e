#include "tissue/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tissue::ingest {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line_no, std::string("bad ") + what + " `" + std::string(text) + "`");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::size_t SessionTrace::antigen_count() const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [](const TraceEvent& e) { return e.kind == EventKind::antigen; }));
}

SessionTrace parse_trace(std::string_view text) {
  SessionTrace trace;
  bool have_header = false;
  std::size_t line_no = 0;
  Micros last = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    const auto fields = split_ws(line);
    if (fields.empty()) continue;

    if (fields[0] == "#session") {
      if (have_header) throw ParseError(line_no, "duplicate #session header");
      if (fields.size() != 3) throw ParseError(line_no, "expected `#session <name> <duration_s>`");
      const auto seconds = parse_number<double>(fields[2], line_no, "duration");
      if (!std::isfinite(seconds) || seconds < 0) throw ParseError(line_no, "duration must be >= 0");
      trace.name = std::string(fields[1]);
      trace.declared_duration = static_cast<Micros>(std::llround(seconds * kMicrosPerSecond));
      have_header = true;
      continue;
    }
    if (fields[0].front() == '#') continue;
    if (!have_header) throw ParseError(line_no, "missing #session header");

    TraceEvent event;
    if (fields[0] == "A") {
      if (fields.size() != 3) throw ParseError(line_no, "expected `A <t_us> <syscall>`");
      event = TraceEvent::antigen(parse_number<Micros>(fields[1], line_no, "time"),
                                  parse_number<Syscall>(fields[2], line_no, "syscall"));
      if (event.syscall < 0) throw ParseError(line_no, "syscall must be >= 0");
    } else if (fields[0] == "S") {
      if (fields.size() != 4) throw ParseError(line_no, "expected `S <t_us> <channel> <value>`");
      event = TraceEvent::signal(parse_number<Micros>(fields[1], line_no, "time"),
                                 parse_number<ChannelId>(fields[2], line_no, "channel"),
                                 parse_number<double>(fields[3], line_no, "signal value"));
      if (!std::isfinite(event.value)) throw ParseError(line_no, "signal value must be finite");
    } else {
      throw ParseError(line_no, "unknown record `" + std::string(fields[0]) + "`");
    }
    if (event.at < 0) throw ParseError(line_no, "time must be >= 0");
    if (event.at < last) throw ParseError(line_no, "event time goes backwards");
    if (event.at > trace.declared_duration) throw ParseError(line_no, "event after declared duration");
    last = event.at;
    trace.events.push_back(event);
  }
  if (!have_header) throw ParseError(line_no, "missing #session header");
  return trace;
}

std::string serialize_trace(const SessionTrace& trace) {
  std::ostringstream out;
  out << "#session " << (trace.name.empty() ? "unnamed" : trace.name) << ' ';
  if (trace.declared_duration % kMicrosPerSecond == 0) {
    out << trace.declared_duration / kMicrosPerSecond;
  } else {
    out << format_double(static_cast<double>(trace.declared_duration) / kMicrosPerSecond);
  }
  out << '\n';
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::antigen) {
      out << "A " << e.at << ' ' << e.syscall << '\n';
    } else {
      out << "S " << e.at << ' ' << e.channel << ' ' << format_double(e.value) << '\n';
    }
  }
  return out.str();
}

SessionTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_trace(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

void check_ordered(const SessionTrace& trace) {
  Micros last = 0;
  for (const auto& e : trace.events) {
    if (e.at < last) throw std::invalid_argument("trace events out of time order at t=" + std::to_string(e.at));
    if (e.at > trace.declared_duration && trace.declared_duration > 0) {
      throw std::invalid_argument("trace event past declared duration at t=" + std::to_string(e.at));
    }
    last = e.at;
  }
}

SessionStats session_stats(const SessionTrace& trace) {
  SessionStats stats;
  stats.total_time = static_cast<double>(trace.declared_duration) / kMicrosPerSecond;

  std::vector<Micros> times;
  std::set<ChannelId> channels;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::antigen) {
      times.push_back(e.at);
    } else {
      channels.insert(e.channel);
      ++stats.total_signals;
    }
  }
  std::sort(times.begin(), times.end());
  stats.total_antigen = times.size();
  stats.num_signals = channels.size();

  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < times.size(); ++lo) {
    while (hi < times.size() && times[hi] < times[lo] + kMicrosPerSecond) ++hi;
    stats.max_rate = std::max(stats.max_rate, hi - lo);
  }
  return stats;
}

}  // namespace tissue::ingest
