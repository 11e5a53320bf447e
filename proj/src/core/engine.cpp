#include "tissue/engine.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <mutex>
#include <thread>

namespace tissue {
namespace {

void apply(TissueCompartment& tissue, const ingest::TraceEvent& event, Micros at) {
  if (event.kind == ingest::EventKind::antigen) {
    tissue.inject_antigen(event.syscall, at);
  } else {
    tissue.set_signal(event.channel, event.value, at);
  }
}

Micros run_end(const ingest::SessionTrace& trace, const RunOptions& options) {
  Micros last = trace.declared_duration;
  if (!trace.events.empty()) last = std::max(last, trace.events.back().at);
  return options.client_delay + last + options.cooldown;
}

void append(RunLog& log, std::vector<LogEvent>&& events) {
  log.events.insert(log.events.end(), std::make_move_iterator(events.begin()), std::make_move_iterator(events.end()));
}

RunLog run_virtual(TissueCompartment& tissue, const ingest::SessionTrace& trace, const RunOptions& options) {
  const Micros tick_rate = tissue.params().cell_update_rate;
  const Micros probe_rate = tissue.params().probe_rate;
  const Micros end = run_end(trace, options);
  constexpr Micros kNever = std::numeric_limits<Micros>::max();

  RunLog log;
  Micros next_tick = tissue.now() + tick_rate;
  Micros next_probe = tissue.now() + probe_rate;
  std::size_t next_event = 0;
  for (;;) {
    const Micros event_at =
        next_event < trace.events.size() ? options.client_delay + trace.events[next_event].at : kNever;
    const Micros t = std::min({event_at, next_tick, next_probe});
    if (t > end) break;
    if (t == event_at) {
      apply(tissue, trace.events[next_event++], t);
    } else if (t == next_tick) {
      tissue.advance_clock(t);
      tissue.step();
      next_tick += tick_rate;
    } else {
      tissue.probe(t);
      next_probe += probe_rate;
    }
  }
  tissue.advance_clock(end);
  append(log, tissue.drain_events());
  log.counters = tissue.counters();
  return log;
}

RunLog run_realtime(TissueCompartment& tissue, const ingest::SessionTrace& trace, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto to_duration = [](Micros us) { return std::chrono::microseconds(us); };
  const Micros tick_rate = tissue.params().cell_update_rate;
  const Micros probe_rate = tissue.params().probe_rate;
  const Micros end = run_end(trace, options);
  const Micros base = tissue.now();
  const auto start = Clock::now();

  std::mutex mutex;
  RunLog log;
  {
    std::jthread feeder([&](std::stop_token stop) {
      for (const auto& event : trace.events) {
        if (stop.stop_requested()) return;
        const Micros at = base + options.client_delay + event.at;
        std::this_thread::sleep_until(start + to_duration(at - base));
        const std::lock_guard lock(mutex);
        apply(tissue, event, std::max(at, tissue.now()));
      }
    });

    Micros next_probe = base + probe_rate;
    for (Micros t = base + tick_rate; t <= end; t += tick_rate) {
      std::this_thread::sleep_until(start + to_duration(t - base));
      const std::lock_guard lock(mutex);
      tissue.advance_clock(t);
      tissue.step();
      // Probes ride on the tick that reaches their due time.
      while (next_probe <= t) {
        tissue.probe(next_probe);
        next_probe += probe_rate;
      }
      append(log, tissue.drain_events());
    }
    feeder.request_stop();
  }
  tissue.advance_clock(end);
  append(log, tissue.drain_events());
  log.counters = tissue.counters();
  return log;
}

}  // namespace

RunLog run(TissueCompartment& tissue, const ingest::SessionTrace& trace, const RunOptions& options) {
  ingest::check_ordered(trace);
  return options.mode == ClockMode::virtual_time ? run_virtual(tissue, trace, options)
                                                 : run_realtime(tissue, trace, options);
}

}  // namespace tissue
