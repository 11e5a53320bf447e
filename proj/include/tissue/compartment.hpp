#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tissue/cell.hpp"
#include "tissue/params.hpp"
#include "tissue/rng.hpp"
#include "tissue/run_log.hpp"
#include "tissue/types.hpp"

namespace tissue {

enum class AntigenState { in_compartment, ingested, presented, destroyed };

struct Antigen {
  Syscall value = 0;
  Micros injected_at = 0;
  AntigenState state = AntigenState::in_compartment;
  std::uint64_t serial = 0;

  /// Moves the antigen along in_compartment -> ingested -> presented ->
  /// destroyed. Throws std::logic_error on a backwards move.
  void advance(AntigenState next);
};

struct SignalChannel {
  ChannelId id = 0;
  double current_value = 0.0;
  double previous_value = 0.0;
  Micros updated_at = 0;
};

/// Bounded pool of in-compartment antigen. Removal at a random index and
/// eviction of the oldest entry are both O(1) amortised.
class AntigenStore {
 public:
  explicit AntigenStore(std::size_t capacity) : capacity_(capacity) {}

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return items_.empty(); }

  /// Appends; if full, first evicts and returns the oldest entry.
  std::optional<Antigen> push(Antigen antigen);
  Antigen take_at(std::size_t index);
  std::span<const Antigen> items() const noexcept { return items_; }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  Antigen take_slot(std::size_t index);

  std::size_t capacity_;
  std::vector<Antigen> items_;
  std::vector<std::size_t> slot_of_;  // serial -> index into items_
  std::deque<std::uint64_t> fifo_;    // serials oldest first, may hold stale ones
};

/// Counts for one scheduler tick.
struct TickReport {
  std::size_t responses = 0;
  std::size_t antigen_destroyed = 0;
  std::size_t randomisations = 0;
  bool operator==(const TickReport&) const = default;
};

/// The environment cells live in: bounded antigen store, external signal
/// channels, the resident cells and a seeded RNG shared by all of them.
/// Events produced by injections, ticks and probes are buffered until
/// drain_events().
class TissueCompartment {
 public:
  explicit TissueCompartment(const ParameterSet& params, std::size_t num_channels = 2);

  const ParameterSet& params() const noexcept { return params_; }
  Rng& rng() noexcept { return rng_; }

  Micros now() const noexcept { return clock_; }
  /// Moves the clock forward; earlier times are ignored.
  void advance_clock(Micros t) noexcept;
  std::uint64_t tick_count() const noexcept { return ticks_; }

  /// Stores antigen_multiplier copies, evicting the oldest when full.
  /// Returns the number of copies stored.
  std::size_t inject_antigen(Syscall value, Micros at);
  std::size_t antigen_count() const noexcept { return store_.size(); }
  const AntigenStore& antigen_store() const noexcept { return store_; }
  /// Removes a uniformly chosen antigen and marks it ingested.
  std::optional<Antigen> take_random_antigen();
  /// Marks the antigen destroyed and logs it at the current time.
  void destroy_antigen(Antigen& antigen);

  /// Throws std::out_of_range for an unknown channel.
  void set_signal(ChannelId channel, double value, Micros at);
  const SignalChannel& signal(ChannelId channel) const;
  std::size_t num_channels() const noexcept { return signals_.size(); }

  /// Throws std::length_error once max_cells cells are resident.
  CellId add_cell(std::unique_ptr<Cell> cell);
  std::span<const std::unique_ptr<Cell>> cells() const noexcept { return cells_; }
  Cell* find_cell(CellId id) noexcept;

  /// Advances tick_count, then runs every cell once in a fresh random order.
  TickReport step();
  /// Snapshot at `at`; also appended to the event buffer.
  ProbeSnapshot probe(Micros at);

  void record_response(CellId cell, Syscall syscall);
  void record_randomisation(CellId cell);
  void record_presentation(std::int64_t action_time);

  /// Visit order chosen by the most recent step().
  const std::vector<CellId>& last_visit_order() const noexcept { return visit_order_; }

  RunCounters counters() const;
  std::vector<LogEvent> drain_events();

 private:
  ParameterSet params_;
  Rng rng_;
  AntigenStore store_;
  std::vector<SignalChannel> signals_;
  std::vector<std::unique_ptr<Cell>> cells_;
  std::vector<CellId> visit_order_;
  std::vector<LogEvent> events_;
  Micros clock_ = 0;
  std::uint64_t ticks_ = 0;
  std::uint64_t next_serial_ = 0;
  std::uint64_t injected_ = 0;
  std::uint64_t evicted_ = 0;
  std::uint64_t destroyed_ = 0;
  std::uint64_t responses_ = 0;
  std::uint64_t randomisations_ = 0;
  std::uint64_t presentations_ = 0;
  std::uint64_t action_time_sum_ = 0;
};

}  // namespace tissue
