#include "tissue/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tissue/experiment.hpp"
#include "tissue/synth.hpp"

namespace tissue::cli {
namespace {

ParameterSet load_params(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open parameter file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::optional<bool> parse_signal(const std::string& value) {
  if (value.empty()) return std::nullopt;
  if (value == "on") return true;
  if (value == "off") return false;
  throw std::invalid_argument("--signal expects on or off, got `" + value + "`");
}

void require_readable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
}

}  // namespace

void write_session_stats_csv(std::ostream& out, const std::string& name, const ingest::SessionStats& stats) {
  out << "session,total_time,total_antigen,max_rate,num_signals,total_signals\n";
  out << name << ',' << stats.total_time << ',' << stats.total_antigen << ',' << stats.max_rate << ','
      << stats.num_signals << ',' << stats.total_signals << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"twoCell artificial immune system: replay, synthesis and experiments"};
  app.require_subcommand(1);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run one of the scripted experiments");
  std::string experiment_name;
  std::string params_path;
  std::uint64_t seed = 1;
  std::size_t runs = 20;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> traces;
  std::vector<std::string> training;
  std::string out_dir = ".";
  bool realtime = false;
  std::int64_t reset_action_time = 0;
  std::string signal;
  unsigned workers = 0;
  experiment->add_option("name", experiment_name, "freq-selectivity | single-run | policy-eval | signal-effect")
      ->required();
  experiment->add_option("--params", params_path, "Parameter file");
  experiment->add_option("--seed", seed, "Base seed; run i uses seed + i");
  experiment->add_option("--runs", runs, "Runs per trace");
  experiment->add_option("--seeds", seeds, "Explicit per-run seeds");
  experiment->add_option("--trace", traces, "Trace file(s) replacing the synthesized sessions");
  experiment->add_option("--train", training, "Training trace(s) for policy-eval");
  experiment->add_option("--out", out_dir, "Output directory");
  experiment->add_flag("--realtime,!--virtual", realtime, "Pace replay by the host clock");
  experiment->add_option("--reset-action-time", reset_action_time, "Action time restored on a rising signal");
  experiment->add_option("--signal", signal, "Type 1 cytokine receptor: on | off");
  experiment->add_option("--workers", workers, "Threads for independent runs (0 = all cores)");

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize a session trace");
  std::string profile;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  double total_time = 0;
  std::size_t total_antigen = 0;
  std::size_t max_rate = 0;
  std::size_t attack_count = 0;
  double attack_start = 0;
  double attack_end = 0;
  std::string custom_name = "custom";
  synth->add_option("--profile", profile, "success1 | success2 | failure1 | failure2 | normal1 | normal2 | custom")
      ->required();
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("-o,--out", synth_out, "Output trace file")->required();
  synth->add_option("--name", custom_name, "Session name (custom)");
  synth->add_option("--total-time", total_time, "Session length in seconds (custom)");
  synth->add_option("--total-antigen", total_antigen, "Normal syscalls, scaled from the statd profile (custom)");
  synth->add_option("--max-rate", max_rate, "Antigen in the busiest second (custom)");
  synth->add_option("--attack-count", attack_count, "Planted novel syscalls (custom)");
  synth->add_option("--attack-start", attack_start, "Attack interval start, seconds (custom)");
  synth->add_option("--attack-end", attack_end, "Attack interval end, seconds (custom)");

  // stats
  auto* stats = app.add_subcommand("stats", "Summarize a trace or run log as CSV");
  std::string stats_path;
  std::string which = "session";
  double bin_s = 1.0;
  stats->add_option("path", stats_path, "Trace or run log")->required();
  stats->add_option("--which", which, "session | policy | rates | raster");
  stats->add_option("--bin", bin_s, "Bin width in seconds for rates");

  // replay
  auto* replay = app.add_subcommand("replay", "Replay a trace through twoCell and write the run log");
  std::string replay_trace;
  std::string replay_out;
  std::string replay_params;
  std::uint64_t replay_seed = 1;
  std::string replay_signal;
  std::int64_t replay_reset = 0;
  bool replay_realtime = false;
  double cooldown_s = 60.0;
  double client_delay_s = -1.0;
  replay->add_option("--trace", replay_trace, "Trace file")->required();
  replay->add_option("-o,--out", replay_out, "Run log output (default: stdout)");
  replay->add_option("--params", replay_params, "Parameter file");
  replay->add_option("--seed", replay_seed, "RNG seed");
  replay->add_option("--signal", replay_signal, "on | off");
  replay->add_option("--reset-action-time", replay_reset, "Action time restored on a rising signal");
  replay->add_flag("--realtime,!--virtual", replay_realtime, "Pace replay by the host clock");
  replay->add_option("--cooldown", cooldown_s, "Seconds to keep stepping after the trace");
  replay->add_option("--client-delay", client_delay_s, "Seconds before replay starts (realtime default 10)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (experiment->parsed()) {
      ExperimentSpec spec;
      spec.name = parse_experiment_name(experiment_name);
      spec.runs = runs;
      spec.base_seed = seed;
      spec.seeds = seeds;
      spec.params = load_params(params_path);
      spec.traces = traces;
      spec.training_traces = training;
      for (const auto& t : traces) require_readable(t);
      for (const auto& t : training) require_readable(t);
      spec.output_dir = out_dir;
      spec.mode = realtime ? ClockMode::realtime : ClockMode::virtual_time;
      if (reset_action_time > 0) spec.reset_action_time = reset_action_time;
      spec.signal = parse_signal(signal);
      spec.workers = workers;
      for (const auto& path : run_experiment(spec)) out << "wrote " << path.string() << '\n';
      return 0;
    }

    if (synth->parsed()) {
      ingest::SynthProfile p;
      if (profile == "custom") {
        p.name = custom_name;
        p.total_time = static_cast<Micros>(std::llround(total_time * kMicrosPerSecond));
        p.frequencies = ingest::scaled_frequencies(total_antigen);
        p.max_rate = max_rate;
        if (attack_count > 0) {
          p.attack = ingest::AttackSpec{ingest::novel_attack_syscalls(), attack_count,
                                        static_cast<Micros>(std::llround(attack_start * kMicrosPerSecond)),
                                        static_cast<Micros>(std::llround(attack_end * kMicrosPerSecond))};
        }
      } else {
        p = ingest::builtin_profile(profile);
      }
      const auto trace = ingest::synthesize(p, synth_seed);
      std::ofstream file(synth_out, std::ios::binary | std::ios::trunc);
      if (!file) throw std::runtime_error("cannot write " + synth_out);
      file << ingest::serialize_trace(trace);
      file.close();
      if (!file) throw std::runtime_error("failed writing " + synth_out);
      write_session_stats_csv(out, trace.name, ingest::session_stats(trace));
      return 0;
    }

    if (stats->parsed()) {
      if (which == "session") {
        const auto trace = ingest::load_trace(stats_path);
        write_session_stats_csv(out, trace.name, ingest::session_stats(trace));
      } else if (which == "policy") {
        policy::write_policy_csv(out, policy::twocell_policy(load_run_log(stats_path)));
      } else if (which == "rates" || which == "raster") {
        const auto bin = static_cast<Micros>(std::llround(bin_s * kMicrosPerSecond));
        const auto series = policy::response_rate_series(load_run_log(stats_path), bin);
        if (which == "rates") {
          policy::write_rate_csv(out, series.bins);
        } else {
          policy::write_raster_csv(out, series.raster);
        }
      } else {
        throw std::invalid_argument("--which expects session, policy, rates or raster");
      }
      return 0;
    }

    if (replay->parsed()) {
      ParameterSet params = load_params(replay_params);
      params.rng_seed = static_cast<std::int64_t>(replay_seed);
      twocell::TwoCellOptions options;
      options.signal_enabled = parse_signal(replay_signal).value_or(false);
      options.reset_action_time = replay_reset;
      auto run_options = run_options_for(replay_realtime ? ClockMode::realtime : ClockMode::virtual_time);
      run_options.cooldown = static_cast<Micros>(std::llround(cooldown_s * kMicrosPerSecond));
      if (client_delay_s >= 0) run_options.client_delay = static_cast<Micros>(std::llround(client_delay_s * kMicrosPerSecond));
      const auto log = twocell::simulate(params, options, ingest::load_trace(replay_trace), run_options);
      if (replay_out.empty()) {
        out << serialize_run_log(log);
      } else {
        std::ofstream file(replay_out, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write " + replay_out);
        file << serialize_run_log(log);
        file.close();
        if (!file) throw std::runtime_error("failed writing " + replay_out);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace tissue::cli
