#include "tissue/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tissue/statistics.hpp"
#include "tissue/synth.hpp"

namespace tissue::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::uint64_t> seeds_of(const ExperimentSpec& spec) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < spec.runs; ++i) seeds.push_back(spec.seed_for(i));
  return seeds;
}

twocell::TwoCellOptions options_of(const ExperimentSpec& spec) {
  twocell::TwoCellOptions options;
  options.signal_enabled = spec.signal.value_or(false);
  options.reset_action_time = spec.reset_action_time.value_or(0);
  return options;
}

std::vector<ingest::SessionTrace> load_all(const std::vector<std::string>& paths) {
  std::vector<ingest::SessionTrace> out;
  for (const auto& p : paths) out.push_back(ingest::load_trace(p));
  return out;
}

std::vector<ingest::SessionTrace> training_traces(const ExperimentSpec& spec, const std::vector<std::string>& paths) {
  if (!paths.empty()) return load_all(paths);
  return {builtin_trace("normal1", spec.base_seed), builtin_trace("normal2", spec.base_seed)};
}

struct Training {
  std::vector<ingest::SessionTrace> traces;
  policy::SyscallPolicy naive;
  std::vector<policy::SyscallPolicy> run_policies;
  policy::SyscallPolicy union_policy;
};

Training train(const ExperimentSpec& spec, const std::vector<std::string>& paths) {
  Training t;
  t.traces = training_traces(spec, paths);
  t.naive = policy::naive_policy(t.traces);
  const auto seeds = seeds_of(spec);
  for (const auto& trace : t.traces) {
    for (const auto& log : run_batch(spec.params, options_of(spec), trace, seeds, spec.mode, spec.workers)) {
      t.run_policies.push_back(policy::twocell_policy(log));
    }
  }
  t.union_policy = policy::union_policies(t.run_policies);
  return t;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  written.push_back(path);
}

}  // namespace

ExperimentName parse_experiment_name(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "freq_selectivity") return ExperimentName::freq_selectivity;
  if (n == "single_run") return ExperimentName::single_run;
  if (n == "policy_eval") return ExperimentName::policy_eval;
  if (n == "signal_effect") return ExperimentName::signal_effect;
  throw std::invalid_argument("unknown experiment `" + name + "`");
}

std::string to_string(ExperimentName name) {
  switch (name) {
    case ExperimentName::freq_selectivity:
      return "freq-selectivity";
    case ExperimentName::single_run:
      return "single-run";
    case ExperimentName::policy_eval:
      return "policy-eval";
    case ExperimentName::signal_effect:
      return "signal-effect";
  }
  return "unknown";
}

std::uint64_t ExperimentSpec::seed_for(std::size_t i) const {
  return seeds.empty() ? base_seed + i : seeds.at(i);
}

void ExperimentSpec::validate() const {
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  if (!seeds.empty() && seeds.size() != runs) {
    throw std::invalid_argument("got " + std::to_string(seeds.size()) + " seeds for " + std::to_string(runs) + " runs");
  }
  tissue::validate(params);
}

RunOptions run_options_for(ClockMode mode) {
  RunOptions options;
  options.mode = mode;
  if (mode == ClockMode::realtime) options.client_delay = 10 * kMicrosPerSecond;
  return options;
}

std::vector<RunLog> run_batch(const ParameterSet& params, const twocell::TwoCellOptions& options,
                              const ingest::SessionTrace& trace, const std::vector<std::uint64_t>& seeds,
                              ClockMode mode, unsigned workers) {
  std::vector<RunLog> logs(seeds.size());
  const auto run_one = [&](std::size_t i) {
    ParameterSet p = params;
    p.rng_seed = static_cast<std::int64_t>(seeds[i]);
    logs[i] = twocell::simulate(p, options, trace, run_options_for(mode));
  };

  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  if (mode == ClockMode::realtime || workers == 1 || seeds.size() < 2) {
    for (std::size_t i = 0; i < seeds.size(); ++i) run_one(i);
    return logs;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(workers, seeds.size());
    for (std::size_t w = 0; w < n; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return logs;
}

ingest::SessionTrace builtin_trace(const std::string& profile, std::uint64_t seed) {
  return ingest::synthesize(ingest::builtin_profile(profile), seed);
}

FreqSelectivityResult freq_selectivity(const ExperimentSpec& spec) {
  spec.validate();
  auto t = train(spec, spec.traces);
  FreqSelectivityResult r;
  r.training = std::move(t.traces);
  r.naive = std::move(t.naive);
  r.run_policies = std::move(t.run_policies);
  r.union_policy = std::move(t.union_policy);
  r.rows = policy::frequency_table(r.naive, r.run_policies);
  try {
    r.rho = policy::frequency_selectivity_rho(r.rows);
  } catch (const std::exception&) {
    r.rho = kNaN;
  }
  return r;
}

SingleRunResult single_run(const ExperimentSpec& spec) {
  spec.validate();
  SingleRunResult r;
  r.trace = spec.traces.empty() ? builtin_trace("normal2", spec.base_seed) : ingest::load_trace(spec.traces.front());
  ParameterSet p = spec.params;
  p.rng_seed = static_cast<std::int64_t>(spec.seed_for(0));
  r.log = twocell::simulate(p, options_of(spec), r.trace, run_options_for(spec.mode));
  r.policy = policy::twocell_policy(r.log);
  r.series = policy::response_rate_series(r.log, kMicrosPerSecond);
  return r;
}

PolicyEvalResult policy_eval(const ExperimentSpec& spec) {
  spec.validate();
  PolicyEvalResult r;
  if (spec.traces.empty()) {
    for (const auto* name : {"success1", "success2", "failure1", "failure2"}) {
      r.datasets.push_back(builtin_trace(name, spec.base_seed));
    }
  } else {
    r.datasets = load_all(spec.traces);
  }
  auto t = train(spec, spec.training_traces);
  r.naive = std::move(t.naive);
  r.union_policy = std::move(t.union_policy);
  for (const auto& d : r.datasets) {
    r.rows.push_back({d.name, "naive", policy::evaluate_policy(r.naive, d)});
    r.rows.push_back({d.name, "twocell", policy::evaluate_policy(r.union_policy, d)});
  }
  return r;
}

SignalEffectResult signal_effect(const ExperimentSpec& spec) {
  spec.validate();
  SignalEffectResult r;
  r.trace = spec.traces.empty() ? builtin_trace("success2", spec.base_seed) : ingest::load_trace(spec.traces.front());
  const auto seeds = seeds_of(spec);

  twocell::TwoCellOptions on;
  on.signal_enabled = true;
  on.reset_action_time = spec.reset_action_time.value_or(100);
  r.signal_on = run_batch(spec.params, on, r.trace, seeds, spec.mode, spec.workers);

  std::uint64_t sum = 0;
  std::uint64_t presentations = 0;
  for (const auto& log : r.signal_on) {
    sum += log.counters.action_time_sum;
    presentations += log.counters.presentations;
  }
  r.mean_action_time = presentations == 0 ? static_cast<double>(on.effective_reset(spec.params))
                                          : static_cast<double>(sum) / static_cast<double>(presentations);
  r.matched_action_time = std::max<std::int64_t>(1, std::llround(r.mean_action_time));

  ParameterSet fixed_params = spec.params;
  fixed_params.antigen_producer_action_time = r.matched_action_time;
  twocell::TwoCellOptions off;
  off.signal_enabled = false;
  r.signal_off = run_batch(fixed_params, off, r.trace, seeds, spec.mode, spec.workers);

  std::vector<policy::RateSeries> series_on;
  std::vector<policy::RateSeries> series_off;
  double span_on = 0.0;
  double span_off = 0.0;
  for (const auto& log : r.signal_on) {
    series_on.push_back(policy::response_rate_series(log, kMicrosPerSecond));
    span_on += static_cast<double>(policy::response_span(log)) / kMicrosPerSecond;
  }
  for (const auto& log : r.signal_off) {
    series_off.push_back(policy::response_rate_series(log, kMicrosPerSecond));
    span_off += static_cast<double>(policy::response_span(log)) / kMicrosPerSecond;
  }
  r.mean_span_on_s = span_on / static_cast<double>(r.signal_on.size());
  r.mean_span_off_s = span_off / static_cast<double>(r.signal_off.size());
  r.curve_on = policy::mean_response_curve(series_on);
  r.curve_off = policy::mean_response_curve(series_off);
  const auto width = std::max(r.curve_on.size(), r.curve_off.size());
  r.curve_on.resize(width, 0.0);
  r.curve_off.resize(width, 0.0);
  try {
    r.rho = policy::spearman_rho(r.curve_on, r.curve_off);
  } catch (const std::exception&) {
    r.rho.reset();
  }
  return r;
}

std::vector<std::filesystem::path> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::filesystem::create_directories(spec.output_dir);
  const auto& dir = spec.output_dir;
  std::vector<std::filesystem::path> written;

  switch (spec.name) {
    case ExperimentName::freq_selectivity: {
      const auto r = freq_selectivity(spec);
      std::ostringstream table;
      policy::write_frequency_table_csv(table, r.rows);
      table << "rho=" << fixed(r.rho, 4) << '\n';
      write_file(dir / "table4.csv", table.str(), written);
      std::ostringstream naive;
      policy::write_policy_csv(naive, r.naive);
      write_file(dir / "naive_policy.csv", naive.str(), written);
      std::ostringstream uni;
      policy::write_policy_csv(uni, r.union_policy);
      write_file(dir / "union_policy.csv", uni.str(), written);
      break;
    }
    case ExperimentName::single_run: {
      const auto r = single_run(spec);
      std::ostringstream table;
      policy::write_policy_csv(table, r.policy);
      write_file(dir / "table5.csv", table.str(), written);
      std::ostringstream rates;
      policy::write_rate_csv(rates, r.series.bins);
      write_file(dir / "rates.csv", rates.str(), written);
      std::ostringstream raster;
      policy::write_raster_csv(raster, r.series.raster);
      write_file(dir / "raster.csv", raster.str(), written);
      write_file(dir / "runlog.txt", serialize_run_log(r.log), written);
      break;
    }
    case ExperimentName::policy_eval: {
      const auto r = policy_eval(spec);
      std::ostringstream table;
      policy::write_evaluation_csv(table, r.rows);
      write_file(dir / "table6.csv", table.str(), written);
      std::ostringstream naive;
      policy::write_policy_csv(naive, r.naive);
      write_file(dir / "naive_policy.csv", naive.str(), written);
      std::ostringstream uni;
      policy::write_policy_csv(uni, r.union_policy);
      write_file(dir / "union_policy.csv", uni.str(), written);
      break;
    }
    case ExperimentName::signal_effect: {
      const auto r = signal_effect(spec);
      std::ostringstream fig;
      fig << "t,signal_on_rate,signal_off_rate\n";
      for (std::size_t i = 0; i < r.curve_on.size(); ++i) {
        fig << i << ',' << fixed(r.curve_on[i], 4) << ',' << fixed(r.curve_off[i], 4) << '\n';
      }
      fig << "mean_action_time=" << fixed(r.mean_action_time, 2) << '\n';
      fig << "matched_action_time=" << r.matched_action_time << '\n';
      fig << "rho=" << (r.rho ? fixed(*r.rho, 4) : std::string("nan")) << '\n';
      fig << "mean_span_on_s=" << fixed(r.mean_span_on_s, 2) << '\n';
      fig << "mean_span_off_s=" << fixed(r.mean_span_off_s, 2) << '\n';
      write_file(dir / "fig6.csv", fig.str(), written);
      break;
    }
  }
  write_file(dir / "params.txt", to_text(spec.params), written);
  return written;
}

}  // namespace tissue::cli
