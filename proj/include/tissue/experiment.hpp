#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tissue/engine.hpp"
#include "tissue/params.hpp"
#include "tissue/policy.hpp"
#include "tissue/series.hpp"
#include "tissue/trace.hpp"
#include "tissue/twocell.hpp"

namespace tissue::cli {

enum class ExperimentName { freq_selectivity, single_run, policy_eval, signal_effect };

/// Accepts both `freq-selectivity` and `freq_selectivity` spellings.
ExperimentName parse_experiment_name(const std::string& name);
std::string to_string(ExperimentName name);

struct ExperimentSpec {
  ExperimentName name = ExperimentName::single_run;
  std::size_t runs = 20;
  std::uint64_t base_seed = 1;
  /// When non-empty, must hold exactly `runs` seeds.
  std::vector<std::uint64_t> seeds;
  ParameterSet params;
  /// Trace files replacing the synthesized sessions (see each experiment).
  std::vector<std::string> traces;
  /// Training traces for policy-eval; synthesized normal1/normal2 if empty.
  std::vector<std::string> training_traces;
  std::filesystem::path output_dir = ".";
  ClockMode mode = ClockMode::virtual_time;
  std::optional<std::int64_t> reset_action_time;
  std::optional<bool> signal;
  /// Worker threads for independent runs in virtual mode (0 = hardware).
  unsigned workers = 0;

  /// Seed of run `i`: seeds[i] if given, else base_seed + i.
  std::uint64_t seed_for(std::size_t i) const;
  /// Throws std::invalid_argument if the spec breaks an invariant.
  void validate() const;
};

RunOptions run_options_for(ClockMode mode);

/// Runs `seeds.size()` independent replays; results are in seed order and do
/// not depend on the worker count.
std::vector<RunLog> run_batch(const ParameterSet& params, const twocell::TwoCellOptions& options,
                              const ingest::SessionTrace& trace, const std::vector<std::uint64_t>& seeds,
                              ClockMode mode = ClockMode::virtual_time, unsigned workers = 0);

/// The synthesized builtin session used when no trace file is given.
ingest::SessionTrace builtin_trace(const std::string& profile, std::uint64_t seed);

struct FreqSelectivityResult {
  std::vector<ingest::SessionTrace> training;
  policy::SyscallPolicy naive;
  std::vector<policy::SyscallPolicy> run_policies;  // runs per trace, trace-major
  policy::SyscallPolicy union_policy;
  std::vector<policy::FrequencyRow> rows;
  double rho = 0.0;
};

/// `runs` replays of each training trace (normal1 and normal2 by default).
FreqSelectivityResult freq_selectivity(const ExperimentSpec& spec);

struct SingleRunResult {
  ingest::SessionTrace trace;
  RunLog log;
  policy::SyscallPolicy policy;
  policy::RateSeries series;
};

/// One replay of the first trace (normal2 by default), 1 s bins.
SingleRunResult single_run(const ExperimentSpec& spec);

struct PolicyEvalResult {
  policy::SyscallPolicy naive;
  policy::SyscallPolicy union_policy;
  std::vector<ingest::SessionTrace> datasets;
  std::vector<policy::EvaluationRow> rows;
};

/// Trains like freq_selectivity, then evaluates on success1, success2,
/// failure1 and failure2 (or the given traces).
PolicyEvalResult policy_eval(const ExperimentSpec& spec);

struct SignalEffectResult {
  ingest::SessionTrace trace;
  std::vector<RunLog> signal_on;
  std::vector<RunLog> signal_off;
  double mean_action_time = 0.0;
  std::int64_t matched_action_time = 0;
  std::vector<double> curve_on;   // mean responses per 1 s bin
  std::vector<double> curve_off;
  std::optional<double> rho;      // empty if either curve is constant
  double mean_span_on_s = 0.0;    // first-to-last response
  double mean_span_off_s = 0.0;
};

/// `runs` signal-on replays (reset 100 unless overridden), then `runs`
/// signal-off replays with the action time fixed at the rounded mean action
/// time observed in the first batch. Default trace: success2.
SignalEffectResult signal_effect(const ExperimentSpec& spec);

/// Runs the experiment and writes its CSV artifacts to spec.output_dir.
/// Returns the paths written.
std::vector<std::filesystem::path> run_experiment(const ExperimentSpec& spec);

}  // namespace tissue::cli
