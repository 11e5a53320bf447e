#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "tissue/types.hpp"

namespace tissue {

/// Engine and twoCell settings. Defaults are the published twoCell settings;
/// durations are in microseconds, lifespans and action times in ticks.
struct ParameterSet {
  std::int64_t max_antigen = 1000;
  std::int64_t max_cytokines = 0;
  std::int64_t max_cells = 100;
  std::int64_t cell_update_rate = 100'000;
  std::int64_t antigen_multiplier = 10;
  std::int64_t num_cells_1 = 50;
  std::int64_t num_antigen_1 = 100;
  std::int64_t num_antigen_receptors_1 = 10;
  std::int64_t num_antigen_producers_1 = 10;
  std::int64_t antigen_producer_action_time = 10;
  std::int64_t num_cells_2 = 50;
  std::int64_t cell_lifespan_2 = 100;
  std::int64_t num_cell_receptors_2 = 2;
  std::int64_t num_vr_receptors_2 = 20;
  std::int64_t num_response_producers_2 = 1;
  std::int64_t probe_rate = 1'000'000;
  std::int64_t rng_seed = 1;
  std::int64_t syscall_alphabet_max = 400;

  bool operator==(const ParameterSet&) const = default;
};

struct ParameterField {
  std::string_view name;
  std::int64_t ParameterSet::*member;
};

/// Every field in file order; names are the ones accepted by parse_params.
inline constexpr std::array<ParameterField, 18> kParameterFields{{
    {"max_antigen", &ParameterSet::max_antigen},
    {"max_cytokines", &ParameterSet::max_cytokines},
    {"max_cells", &ParameterSet::max_cells},
    {"cell_update_rate", &ParameterSet::cell_update_rate},
    {"antigen_multiplier", &ParameterSet::antigen_multiplier},
    {"num_cells_1", &ParameterSet::num_cells_1},
    {"num_antigen_1", &ParameterSet::num_antigen_1},
    {"num_antigen_receptors_1", &ParameterSet::num_antigen_receptors_1},
    {"num_antigen_producers_1", &ParameterSet::num_antigen_producers_1},
    {"antigen_producer_action_time", &ParameterSet::antigen_producer_action_time},
    {"num_cells_2", &ParameterSet::num_cells_2},
    {"cell_lifespan_2", &ParameterSet::cell_lifespan_2},
    {"num_cell_receptors_2", &ParameterSet::num_cell_receptors_2},
    {"num_vr_receptors_2", &ParameterSet::num_vr_receptors_2},
    {"num_response_producers_2", &ParameterSet::num_response_producers_2},
    {"probe_rate", &ParameterSet::probe_rate},
    {"rng_seed", &ParameterSet::rng_seed},
    {"syscall_alphabet_max", &ParameterSet::syscall_alphabet_max},
}};

/// Parses `name = value` lines. Blank lines and `#` comments are skipped,
/// missing names keep their defaults. Throws ParseError (with the 1-based line
/// number) for malformed lines or unknown names, and ValidationError if the
/// result breaks an invariant.
ParameterSet parse_params(std::string_view text);

/// Throws ValidationError naming the first offending field.
void validate(const ParameterSet& params);

/// Writes every field, one per line, in a form parse_params accepts.
std::string to_text(const ParameterSet& params);

}  // namespace tissue
