#pragma once

#include "tissue/compartment.hpp"
#include "tissue/run_log.hpp"
#include "tissue/trace.hpp"

namespace tissue {

enum class ClockMode { virtual_time, realtime };

struct RunOptions {
  ClockMode mode = ClockMode::virtual_time;
  /// Time the engine keeps stepping after the end of the trace.
  Micros cooldown = 60 * kMicrosPerSecond;
  /// Offset between engine start and trace time zero.
  Micros client_delay = 0;
};

/// Replays `trace` into `tissue`, stepping every cell_update_rate and probing
/// every probe_rate until the later of the last event and the declared
/// duration, plus cooldown.
///
/// In virtual mode trace timestamps drive the clock and the run is a pure
/// function of (parameters, trace). At equal timestamps injections come
/// first, then the tick, then the probe. In realtime mode a replay thread
/// feeds the trace against the host clock while the caller's thread ticks.
///
/// Throws std::invalid_argument if trace events are out of time order.
RunLog run(TissueCompartment& tissue, const ingest::SessionTrace& trace, const RunOptions& options = {});

}  // namespace tissue
