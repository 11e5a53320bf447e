#include "tissue/params.hpp"

#include <charconv>
#include <sstream>

namespace tissue {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ParameterSet parse_params(std::string_view text) {
  ParameterSet params;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected `name = value`");
    const auto name = trim(line.substr(0, eq));
    const auto value_text = trim(line.substr(eq + 1));
    if (name.empty() || value_text.empty()) throw ParseError(line_no, "expected `name = value`");

    const ParameterField* field = nullptr;
    for (const auto& f : kParameterFields) {
      if (f.name == name) field = &f;
    }
    if (field == nullptr) throw ParseError(line_no, "unknown parameter `" + std::string(name) + "`");

    std::int64_t value = 0;
    const auto* end = value_text.data() + value_text.size();
    const auto [ptr, ec] = std::from_chars(value_text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
      throw ParseError(line_no, "bad integer `" + std::string(value_text) + "` for " + std::string(name));
    }
    params.*(field->member) = value;
  }
  validate(params);
  return params;
}

void validate(const ParameterSet& params) {
  for (const auto& f : kParameterFields) {
    if (f.name == "rng_seed") continue;
    if (params.*(f.member) < 0) throw ValidationError(std::string(f.name), "must be >= 0");
  }
  if (params.cell_update_rate <= 0) throw ValidationError("cell_update_rate", "must be > 0");
  if (params.probe_rate <= 0) throw ValidationError("probe_rate", "must be > 0");
  if (params.antigen_multiplier < 1) throw ValidationError("antigen_multiplier", "must be >= 1");
  if (params.antigen_producer_action_time < 1) {
    throw ValidationError("antigen_producer_action_time", "must be >= 1");
  }
  if (params.num_vr_receptors_2 > 0 && params.syscall_alphabet_max < 1) {
    throw ValidationError("syscall_alphabet_max", "must be >= 1 when VR receptors are configured");
  }
  if (params.num_cells_1 + params.num_cells_2 > params.max_cells) {
    throw ValidationError("num_cells_2", "num_cells_1 + num_cells_2 exceeds max_cells (" +
                                             std::to_string(params.max_cells) + ")");
  }
}

std::string to_text(const ParameterSet& params) {
  std::ostringstream out;
  for (const auto& f : kParameterFields) out << f.name << " = " << params.*(f.member) << '\n';
  return out.str();
}

}  // namespace tissue
