#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "tissue/rng.hpp"
#include "tissue/synth.hpp"
#include "tissue/trace.hpp"

using namespace tissue;
using namespace tissue::ingest;

namespace {

// Brute force: for every antigen, count antigen in [t, t + 1 s).
std::size_t max_rate_oracle(const SessionTrace& trace) {
  std::vector<Micros> times;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::antigen) times.push_back(e.at);
  }
  std::size_t best = 0;
  for (const auto t : times) {
    const auto n = std::count_if(times.begin(), times.end(),
                                 [t](Micros u) { return u >= t && u < t + kMicrosPerSecond; });
    best = std::max(best, static_cast<std::size_t>(n));
  }
  return best;
}

}  // namespace

TEST_CASE("parse a tiny trace") {
  const auto t = parse_trace("#session tiny 1\nA 0 6\nA 500000 5\n");
  CHECK(t.name == "tiny");
  CHECK(t.declared_duration == kMicrosPerSecond);
  CHECK(t.antigen_count() == 2);
  CHECK(t.events[1] == TraceEvent::antigen(500'000, 5));
}

TEST_CASE("parse a signal line") {
  const auto t = parse_trace("#session s 1\nS 0 0 0.25\n");
  REQUIRE(t.events.size() == 1);
  CHECK(t.events[0].kind == EventKind::signal);
  CHECK(t.events[0].channel == 0);
  CHECK(t.events[0].value == 0.25);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_trace("#session s 1\nA 0 -3\n"), ParseError);
  CHECK_THROWS_AS(parse_trace("A 0 3\n"), ParseError);
  CHECK_THROWS_AS(parse_trace("#session s 1\nA 10 3\nA 5 3\n"), ParseError);
  CHECK_THROWS_AS(parse_trace("#session s 1\nA 2000000 3\n"), ParseError);
  CHECK_THROWS_AS(parse_trace("#session s 1\nX 0 3\n"), ParseError);
  try {
    parse_trace("#session s 1\nA 0 1\nA 0 zz\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("missing trace file names the path") {
  try {
    load_trace("/nonexistent/x.trace");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/x.trace") != std::string::npos);
  }
}

TEST_CASE("trace round-trip") {
  const auto t = synthesize(builtin_profile("success2"), 4);
  const auto text = serialize_trace(t);
  const auto back = parse_trace(text);
  CHECK(back == t);
  CHECK(serialize_trace(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "tissue_roundtrip.trace";
  std::ofstream(path) << text;
  CHECK(load_trace(path.string()) == t);
  std::filesystem::remove(path);
}

TEST_CASE("session stats") {
  CHECK(session_stats(SessionTrace{}) == SessionStats{});

  SessionTrace t;
  t.declared_duration = 3 * kMicrosPerSecond;
  t.events = {TraceEvent::antigen(100, 1), TraceEvent::antigen(200'000, 2), TraceEvent::signal(300'000, 1, 0.4),
              TraceEvent::antigen(999'000, 3), TraceEvent::antigen(2'500'000, 4)};
  const auto s = session_stats(t);
  CHECK(s.total_antigen == 4);
  CHECK(s.max_rate == 3);
  CHECK(s.total_time == 3.0);
  CHECK(s.num_signals == 1);
  CHECK(s.total_signals == 1);
  CHECK(max_rate_oracle(t) == 3);
}

TEST_CASE("max_rate matches the brute-force window scan") {
  Rng rng(8);
  for (int round = 0; round < 30; ++round) {
    SessionTrace t;
    t.declared_duration = 10 * kMicrosPerSecond;
    std::vector<Micros> times(rng.below(200));
    for (auto& x : times) x = static_cast<Micros>(rng.below(10 * kMicrosPerSecond));
    std::sort(times.begin(), times.end());
    for (const auto x : times) t.events.push_back(TraceEvent::antigen(x, 1));
    CHECK(session_stats(t).max_rate == max_rate_oracle(t));
  }
}

TEST_CASE("check_ordered") {
  SessionTrace t;
  t.events = {TraceEvent::antigen(5, 1), TraceEvent::antigen(3, 1)};
  CHECK_THROWS_AS(check_ordered(t), std::invalid_argument);
}

TEST_CASE("statd frequency table") {
  const auto& rows = statd_normal_syscalls();
  CHECK(rows.size() == 38);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.frequency;
  CHECK(total == 884);
  const auto close = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.number == 6; });
  REQUIRE(close != rows.end());
  CHECK(close->frequency == 557);
  CHECK(close->name == "close");
}

TEST_CASE("builtin profiles hit their targets") {
  for (const auto& name : builtin_profile_names()) {
    CAPTURE(name);
    const auto target = builtin_targets(name);
    const auto stats = session_stats(synthesize(builtin_profile(name), 7));
    CHECK(stats.total_time == target.total_time);
    CHECK(std::abs(static_cast<double>(stats.total_antigen) - static_cast<double>(target.total_antigen)) <=
          0.02 * static_cast<double>(target.total_antigen));
    CHECK(std::abs(static_cast<double>(stats.max_rate) - static_cast<double>(target.max_rate)) <=
          0.05 * static_cast<double>(target.max_rate));
    CHECK(stats.num_signals == 2);
  }
  const auto s1 = session_stats(synthesize(builtin_profile("success1"), 1));
  CHECK(s1.total_antigen == 1739);
  CHECK(s1.total_time == 55.0);
  CHECK(s1.max_rate == 1102);
}

TEST_CASE("normal profiles together carry exactly the statd frequencies") {
  std::map<Syscall, std::size_t> combined;
  for (const auto* name : {"normal1", "normal2"}) {
    for (const auto& e : synthesize(builtin_profile(name), 3).events) {
      if (e.kind == EventKind::antigen) ++combined[e.syscall];
    }
  }
  std::map<Syscall, std::size_t> expected;
  for (const auto& r : statd_normal_syscalls()) expected[r.number] = r.frequency;
  CHECK(combined == expected);
}

TEST_CASE("synthesis is deterministic and stays in its syscall set") {
  const auto p = builtin_profile("success1");
  const auto a = synthesize(p, 12);
  CHECK(a == synthesize(p, 12));
  CHECK_FALSE(a == synthesize(p, 13));
  std::set<Syscall> allowed;
  for (const auto& r : statd_normal_syscalls()) allowed.insert(r.number);
  for (const auto s : novel_attack_syscalls()) allowed.insert(s);
  for (const auto& e : a.events) {
    if (e.kind == EventKind::antigen) CHECK(allowed.contains(e.syscall));
  }
  check_ordered(a);
}

TEST_CASE("success profiles plant 9% novel syscalls") {
  const auto t = synthesize(builtin_profile("success1"), 2);
  const std::set<Syscall> novel(novel_attack_syscalls().begin(), novel_attack_syscalls().end());
  std::size_t n = 0;
  for (const auto& e : t.events) n += e.kind == EventKind::antigen && novel.contains(e.syscall);
  CHECK(std::lround(100.0 * static_cast<double>(n) / static_cast<double>(t.antigen_count())) == 9);
}

TEST_CASE("attack spec injects exactly the requested events in its window") {
  SynthProfile p;
  p.name = "custom";
  p.total_time = 30 * kMicrosPerSecond;
  p.frequencies = {{3, 100}, {5, 50}};
  p.max_rate = 40;
  p.attack = AttackSpec{{999}, 20, 10 * kMicrosPerSecond, 12 * kMicrosPerSecond};
  const auto t = synthesize(p, 1);
  std::size_t hits = 0;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::antigen && e.syscall == 999) {
      ++hits;
      CHECK(e.at >= 10 * kMicrosPerSecond);
      CHECK(e.at <= 12 * kMicrosPerSecond);
    }
  }
  CHECK(hits == 20);
  CHECK(session_stats(t).max_rate == 40);
}

TEST_CASE("normal2-sized custom profile with halved frequencies") {
  SynthProfile p;
  p.total_time = 104 * kMicrosPerSecond;
  for (const auto& r : statd_normal_syscalls()) p.frequencies[r.number] = (r.frequency + 1) / 2;
  p.max_rate = 405;
  const auto s = session_stats(synthesize(p, 1));
  CHECK(s.total_time == 104.0);
  CHECK(std::abs(static_cast<double>(s.total_antigen) - 450.0) <= 9.0);
  CHECK(s.max_rate == 405);
}

TEST_CASE("infeasible profiles are rejected") {
  SynthProfile p;
  p.total_time = 10 * kMicrosPerSecond;
  p.frequencies = {{3, 10}};
  p.max_rate = 0;
  CHECK_THROWS_AS(synthesize(p, 1), InfeasibleProfile);
  p.max_rate = 11;
  CHECK_THROWS_AS(synthesize(p, 1), InfeasibleProfile);
  p.max_rate = 5;
  p.total_time = 0;
  CHECK_THROWS_AS(synthesize(p, 1), InfeasibleProfile);
  CHECK_THROWS_AS(builtin_profile("nosuch"), std::invalid_argument);
}

TEST_CASE("scaled frequencies sum to the requested total") {
  for (const std::size_t total : {0u, 1u, 38u, 450u, 1582u, 5000u}) {
    std::size_t sum = 0;
    for (const auto& [s, n] : scaled_frequencies(total)) sum += n;
    CHECK(sum == total);
  }
}
