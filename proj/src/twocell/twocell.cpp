#include "tissue/twocell.hpp"

#include <algorithm>

namespace tissue::twocell {

std::int64_t update_action_time(double previous_signal, double current_signal, std::int64_t current,
                                std::int64_t reset_value) {
  if (current_signal > previous_signal) return reset_value;
  if (current_signal < previous_signal) return std::max<std::int64_t>(1, current / 2);
  return current;
}

std::vector<std::size_t> match_vr_indices(std::span<const Syscall> vr_locks, std::span<const Syscall> presented) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < presented.size(); ++i) {
    if (std::find(vr_locks.begin(), vr_locks.end(), presented[i]) != vr_locks.end()) out.push_back(i);
  }
  return out;
}

std::vector<Syscall> match_vr(std::span<const Syscall> vr_locks, std::span<const Syscall> presented) {
  std::vector<Syscall> out;
  for (const auto i : match_vr_indices(vr_locks, presented)) out.push_back(presented[i]);
  return out;
}

Type1Cell::Type1Cell(const ParameterSet& params, const TwoCellOptions& options)
    : Cell(CellType::type1),
      capacity_(static_cast<std::size_t>(params.num_antigen_1)),
      receptors_(static_cast<std::size_t>(params.num_antigen_receptors_1)),
      reset_value_(options.effective_reset(params)),
      options_(options),
      producers_(static_cast<std::size_t>(params.num_antigen_producers_1)) {
  for (auto& p : producers_) p.action_time = reset_value_;
}

void Type1Cell::cycle(TissueCompartment& tissue) {
  if (options_.signal_enabled) {
    const double current = tissue.signal(options_.signal_channel).current_value;
    for (auto& p : producers_) {
      p.action_time = update_action_time(last_signal_seen_, current, p.action_time, reset_value_);
    }
    last_signal_seen_ = current;
  }

  for (std::size_t i = 0; i < receptors_ && internal_store_.size() < capacity_; ++i) {
    auto antigen = tissue.take_random_antigen();
    if (!antigen) break;
    internal_store_.push_back(*antigen);
  }

  // Producers loaded this cycle start ageing on the next one.
  std::vector<bool> loaded_now(producers_.size(), false);
  for (std::size_t i = 0; i < producers_.size() && !internal_store_.empty(); ++i) {
    auto& p = producers_[i];
    if (p.presented) continue;
    p.presented = internal_store_.front();
    internal_store_.pop_front();
    p.presented->advance(AntigenState::presented);
    p.ticks_presented = 0;
    loaded_now[i] = true;
    tissue.record_presentation(p.action_time);
  }

  for (std::size_t i = 0; i < producers_.size(); ++i) {
    auto& p = producers_[i];
    if (!p.presented || loaded_now[i]) continue;
    if (++p.ticks_presented >= p.action_time) {
      tissue.destroy_antigen(*p.presented);
      p.presented.reset();
      p.ticks_presented = 0;
    }
  }
}

std::size_t Type1Cell::antigen_held() const {
  return internal_store_.size() + static_cast<std::size_t>(std::count_if(
                                      producers_.begin(), producers_.end(),
                                      [](const AntigenProducer& p) { return p.presented.has_value(); }));
}

std::vector<std::pair<std::size_t, Syscall>> Type1Cell::presented() const {
  std::vector<std::pair<std::size_t, Syscall>> out;
  for (std::size_t i = 0; i < producers_.size(); ++i) {
    if (producers_[i].presented) out.emplace_back(i, producers_[i].presented->value);
  }
  return out;
}

Antigen Type1Cell::release(std::size_t producer) {
  auto& p = producers_.at(producer);
  Antigen out = p.presented.value();
  p.presented.reset();
  p.ticks_presented = 0;
  return out;
}

Type2Cell::Type2Cell(const ParameterSet& params, Rng& rng)
    : Cell(CellType::type2),
      lifespan_(params.cell_lifespan_2),
      cell_receptors_(static_cast<std::size_t>(params.num_cell_receptors_2)),
      response_producers_(static_cast<std::size_t>(params.num_response_producers_2)),
      alphabet_(static_cast<std::uint64_t>(params.syscall_alphabet_max)),
      vr_locks_(static_cast<std::size_t>(params.num_vr_receptors_2)) {
  randomise_locks(rng);
}

void Type2Cell::randomise_locks(Rng& rng) {
  for (auto& lock : vr_locks_) lock = static_cast<Syscall>(rng.below(alphabet_));
}

const std::vector<CellId>& Type2Cell::try_bind(TissueCompartment& tissue) {
  bound_to_.clear();
  std::vector<CellId> candidates;
  for (const auto& cell : tissue.cells()) {
    if (cell->type() == CellType::type1) candidates.push_back(cell->id());
  }
  const std::size_t k = std::min(cell_receptors_, candidates.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(tissue.rng().below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
    bound_to_.push_back(candidates[i]);
  }
  return bound_to_;
}

void Type2Cell::cycle(TissueCompartment& tissue) {
  if (iterations() >= lifespan_) {
    if (!matched_ever()) {
      randomise_locks(tissue.rng());
      tissue.record_randomisation(id());
    }
    reset_iterations();
  }

  try_bind(tissue);

  for (const auto partner_id : bound_to_) {
    auto* partner = static_cast<Type1Cell*>(tissue.find_cell(partner_id));
    const auto shown = partner->presented();
    std::vector<Syscall> values;
    values.reserve(shown.size());
    for (const auto& [producer, value] : shown) values.push_back(value);

    for (const auto index : match_vr_indices(vr_locks_, values)) {
      Antigen antigen = partner->release(shown[index].first);
      tissue.destroy_antigen(antigen);
      ++internal_cytokine_;
      if (response_producers_ > 0) tissue.record_response(id(), antigen.value);
    }
  }
}

void populate(TissueCompartment& tissue, const TwoCellOptions& options) {
  const auto& params = tissue.params();
  for (std::int64_t i = 0; i < params.num_cells_1; ++i) {
    tissue.add_cell(std::make_unique<Type1Cell>(params, options));
  }
  for (std::int64_t i = 0; i < params.num_cells_2; ++i) {
    tissue.add_cell(std::make_unique<Type2Cell>(params, tissue.rng()));
  }
}

RunLog simulate(const ParameterSet& params, const TwoCellOptions& options, const ingest::SessionTrace& trace,
                const RunOptions& run_options) {
  TissueCompartment tissue(params);
  populate(tissue, options);
  return run(tissue, trace, run_options);
}

}  // namespace tissue::twocell
