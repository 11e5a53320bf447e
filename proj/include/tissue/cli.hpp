#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tissue/trace.hpp"

namespace tissue::cli {

/// Entry point behind the `twocell` binary. `args` excludes the program
/// name. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

void write_session_stats_csv(std::ostream& out, const std::string& name, const ingest::SessionStats& stats);

}  // namespace tissue::cli
