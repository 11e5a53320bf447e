#include "tissue/compartment.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace tissue {

void Antigen::advance(AntigenState next) {
  if (static_cast<int>(next) <= static_cast<int>(state)) {
    throw std::logic_error("antigen state may only move forward");
  }
  state = next;
}

std::optional<Antigen> AntigenStore::push(Antigen antigen) {
  if (capacity_ == 0) return antigen;
  std::optional<Antigen> evicted;
  if (items_.size() >= capacity_) {
    while (!fifo_.empty()) {
      const auto serial = fifo_.front();
      fifo_.pop_front();
      if (serial < slot_of_.size() && slot_of_[serial] != kAbsent) {
        evicted = take_slot(slot_of_[serial]);
        break;
      }
    }
  }
  if (slot_of_.size() <= antigen.serial) slot_of_.resize(antigen.serial + 1, kAbsent);
  slot_of_[antigen.serial] = items_.size();
  fifo_.push_back(antigen.serial);
  items_.push_back(antigen);

  if (fifo_.size() > 4 * capacity_ + 64) {
    std::erase_if(fifo_, [this](std::uint64_t s) { return slot_of_[s] == kAbsent; });
  }
  return evicted;
}

Antigen AntigenStore::take_at(std::size_t index) {
  if (index >= items_.size()) throw std::out_of_range("antigen store index");
  return take_slot(index);
}

Antigen AntigenStore::take_slot(std::size_t index) {
  Antigen out = items_[index];
  slot_of_[out.serial] = kAbsent;
  if (index + 1 != items_.size()) {
    items_[index] = items_.back();
    slot_of_[items_[index].serial] = index;
  }
  items_.pop_back();
  return out;
}

TissueCompartment::TissueCompartment(const ParameterSet& params, std::size_t num_channels)
    : params_(params),
      rng_(static_cast<std::uint64_t>(params.rng_seed)),
      store_(static_cast<std::size_t>(params.max_antigen)) {
  validate(params_);
  signals_.resize(num_channels);
  for (std::size_t i = 0; i < num_channels; ++i) signals_[i].id = static_cast<ChannelId>(i);
}

void TissueCompartment::advance_clock(Micros t) noexcept {
  if (t > clock_) clock_ = t;
}

std::size_t TissueCompartment::inject_antigen(Syscall value, Micros at) {
  advance_clock(at);
  const auto copies = static_cast<std::size_t>(params_.antigen_multiplier);
  const std::uint64_t first_serial = next_serial_;
  std::size_t lost = 0;
  for (std::size_t i = 0; i < copies; ++i) {
    Antigen antigen{value, at, AntigenState::in_compartment, next_serial_++};
    if (auto evicted = store_.push(antigen)) {
      ++evicted_;
      if (evicted->serial >= first_serial) ++lost;
    }
  }
  injected_ += copies;
  events_.emplace_back(InjectionEvent{at, value, copies});
  return copies - lost;
}

std::optional<Antigen> TissueCompartment::take_random_antigen() {
  if (store_.empty()) return std::nullopt;
  Antigen antigen = store_.take_at(static_cast<std::size_t>(rng_.below(store_.size())));
  antigen.advance(AntigenState::ingested);
  return antigen;
}

void TissueCompartment::destroy_antigen(Antigen& antigen) {
  antigen.advance(AntigenState::destroyed);
  ++destroyed_;
  events_.emplace_back(DestroyEvent{clock_, antigen.value});
}

void TissueCompartment::set_signal(ChannelId channel, double value, Micros at) {
  if (channel >= signals_.size()) {
    throw std::out_of_range("unknown signal channel " + std::to_string(channel) + " (" +
                            std::to_string(signals_.size()) + " configured)");
  }
  advance_clock(at);
  auto& ch = signals_[channel];
  ch.previous_value = ch.current_value;
  ch.current_value = value;
  ch.updated_at = at;
}

const SignalChannel& TissueCompartment::signal(ChannelId channel) const {
  if (channel >= signals_.size()) throw std::out_of_range("unknown signal channel " + std::to_string(channel));
  return signals_[channel];
}

CellId TissueCompartment::add_cell(std::unique_ptr<Cell> cell) {
  if (cells_.size() >= static_cast<std::size_t>(params_.max_cells)) {
    throw std::length_error("compartment already holds max_cells cells");
  }
  const auto id = static_cast<CellId>(cells_.size());
  cell->id_ = id;
  cell->position_ = cells_.size();
  cells_.push_back(std::move(cell));
  return id;
}

Cell* TissueCompartment::find_cell(CellId id) noexcept {
  return id < cells_.size() ? cells_[id].get() : nullptr;
}

TickReport TissueCompartment::step() {
  ++ticks_;
  visit_order_.resize(cells_.size());
  std::iota(visit_order_.begin(), visit_order_.end(), CellId{0});
  rng_.shuffle(std::span<CellId>(visit_order_));

  const auto responses_before = responses_;
  const auto destroyed_before = destroyed_;
  const auto randomisations_before = randomisations_;
  for (const auto id : visit_order_) {
    Cell& cell = *cells_[id];
    ++cell.iterations_;
    cell.cycle(*this);
  }
  return TickReport{static_cast<std::size_t>(responses_ - responses_before),
                    static_cast<std::size_t>(destroyed_ - destroyed_before),
                    static_cast<std::size_t>(randomisations_ - randomisations_before)};
}

ProbeSnapshot TissueCompartment::probe(Micros at) {
  advance_clock(at);
  ProbeSnapshot snap;
  snap.taken_at = at;
  snap.antigen_count = store_.size();
  snap.response_count_so_far = static_cast<std::size_t>(responses_);
  for (const auto& cell : cells_) {
    auto values = cell->probe_values();
    if (!values.empty()) snap.per_cell_vr_locks.emplace(cell->id(), std::move(values));
  }
  events_.emplace_back(snap);
  return snap;
}

void TissueCompartment::record_response(CellId cell, Syscall syscall) {
  ++responses_;
  events_.emplace_back(ResponseEvent{clock_, cell, syscall});
}

void TissueCompartment::record_randomisation(CellId cell) {
  ++randomisations_;
  events_.emplace_back(RandomisationEvent{clock_, cell});
}

void TissueCompartment::record_presentation(std::int64_t action_time) {
  ++presentations_;
  action_time_sum_ += static_cast<std::uint64_t>(action_time);
}

RunCounters TissueCompartment::counters() const {
  RunCounters c;
  c.end_time = clock_;
  c.ticks = ticks_;
  c.injected = injected_;
  c.evicted = evicted_;
  c.destroyed = destroyed_;
  c.live = store_.size();
  for (const auto& cell : cells_) c.live += cell->antigen_held();
  c.presentations = presentations_;
  c.action_time_sum = action_time_sum_;
  return c;
}

std::vector<LogEvent> TissueCompartment::drain_events() {
  std::vector<LogEvent> out;
  out.swap(events_);
  return out;
}

}  // namespace tissue
