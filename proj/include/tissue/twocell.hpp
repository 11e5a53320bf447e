#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "tissue/cell.hpp"
#include "tissue/compartment.hpp"
#include "tissue/engine.hpp"
#include "tissue/params.hpp"

namespace tissue::twocell {

/// Run-level switches that are not part of the parameter file.
struct TwoCellOptions {
  /// Type 1 cytokine receptor; when off, signal channels are never read.
  bool signal_enabled = false;
  /// Action time restored when the signal rises. Zero selects
  /// antigen_producer_action_time. Producers also start at this value.
  std::int64_t reset_action_time = 0;
  /// Channel read by the cytokine receptor (CPU usage).
  ChannelId signal_channel = 0;

  std::int64_t effective_reset(const ParameterSet& params) const {
    return reset_action_time > 0 ? reset_action_time : params.antigen_producer_action_time;
  }
};

/// Rising signal restores `reset_value`, falling signal halves (floor, never
/// below 1), an unchanged signal keeps `current`.
std::int64_t update_action_time(double previous_signal, double current_signal, std::int64_t current,
                                std::int64_t reset_value);

/// Indices into `presented` whose value equals at least one lock. Each
/// presented entry matches at most once; duplicates count separately.
std::vector<std::size_t> match_vr_indices(std::span<const Syscall> vr_locks, std::span<const Syscall> presented);

/// The matched presented values, in presented order.
std::vector<Syscall> match_vr(std::span<const Syscall> vr_locks, std::span<const Syscall> presented);

struct AntigenProducer {
  std::optional<Antigen> presented;
  std::int64_t action_time = 1;
  std::int64_t ticks_presented = 0;
};

/// Dendritic-cell analogue. Each cycle it (a) adjusts producer action times
/// from the signal, if enabled, (b) samples antigen from the compartment into
/// its internal store, (c) loads empty producers from the store in FIFO
/// order and (d) ages the producers that were already loaded, destroying
/// antigen whose action time has run out.
class Type1Cell : public Cell {
 public:
  Type1Cell(const ParameterSet& params, const TwoCellOptions& options);

  void cycle(TissueCompartment& tissue) override;
  std::size_t antigen_held() const override;

  std::span<const AntigenProducer> producers() const noexcept { return producers_; }
  const std::deque<Antigen>& internal_store() const noexcept { return internal_store_; }
  double last_signal_seen() const noexcept { return last_signal_seen_; }
  bool cytokine_receptor_enabled() const noexcept { return options_.signal_enabled; }

  /// Values currently presented, with the producer index of each.
  std::vector<std::pair<std::size_t, Syscall>> presented() const;
  /// Frees a producer and returns its antigen; the caller destroys it.
  Antigen release(std::size_t producer);

 private:
  std::size_t capacity_;
  std::size_t receptors_;
  std::int64_t reset_value_;
  TwoCellOptions options_;
  std::deque<Antigen> internal_store_;
  std::vector<AntigenProducer> producers_;
  double last_signal_seen_ = 0.0;
};

/// T-cell analogue: binds Type 1 cells, matches their presented antigen
/// against its VR locks and responds. Unmatched cells re-draw their locks
/// every cell_lifespan_2 ticks; after the first match the locks are frozen.
class Type2Cell : public Cell {
 public:
  /// Draws the initial locks from `rng`.
  Type2Cell(const ParameterSet& params, Rng& rng);

  void cycle(TissueCompartment& tissue) override;
  std::vector<Syscall> probe_values() const override { return vr_locks_; }

  const std::vector<Syscall>& vr_locks() const noexcept { return vr_locks_; }
  void set_vr_locks(std::vector<Syscall> locks) { vr_locks_ = std::move(locks); }
  const std::vector<CellId>& bound_to() const noexcept { return bound_to_; }
  std::uint64_t internal_cytokine() const noexcept { return internal_cytokine_; }
  bool matched_ever() const noexcept { return internal_cytokine_ > 0; }

  /// Re-forms this tick's bindings: up to num_cell_receptors_2 distinct
  /// Type 1 cells drawn uniformly from the compartment.
  const std::vector<CellId>& try_bind(TissueCompartment& tissue);

 private:
  void randomise_locks(Rng& rng);

  std::int64_t lifespan_;
  std::size_t cell_receptors_;
  std::size_t response_producers_;
  std::uint64_t alphabet_;
  std::vector<Syscall> vr_locks_;
  std::vector<CellId> bound_to_;
  std::uint64_t internal_cytokine_ = 0;
};

/// Creates num_cells_1 Type 1 cells followed by num_cells_2 Type 2 cells.
void populate(TissueCompartment& tissue, const TwoCellOptions& options);

/// Builds a fresh compartment, populates it and replays `trace`.
RunLog simulate(const ParameterSet& params, const TwoCellOptions& options, const ingest::SessionTrace& trace,
                const RunOptions& run_options = {});

}  // namespace tissue::twocell
