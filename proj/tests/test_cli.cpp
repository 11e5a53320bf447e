#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tissue/cli.hpp"
#include "tissue/experiment.hpp"
#include "tissue/trace.hpp"

using namespace tissue;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tissue_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("experiment names") {
  CHECK(cli::parse_experiment_name("freq-selectivity") == cli::ExperimentName::freq_selectivity);
  CHECK(cli::parse_experiment_name("signal_effect") == cli::ExperimentName::signal_effect);
  CHECK_THROWS(cli::parse_experiment_name("bogus"));
  CHECK(cli::to_string(cli::ExperimentName::policy_eval) == "policy-eval");
}

TEST_CASE("seeds default to base + index") {
  cli::ExperimentSpec spec;
  spec.base_seed = 10;
  CHECK(spec.seed_for(0) == 10);
  CHECK(spec.seed_for(3) == 13);
  spec.runs = 2;
  spec.seeds = {7, 9};
  CHECK(spec.seed_for(1) == 9);
  spec.seeds = {7};
  CHECK_THROWS(spec.validate());
}

TEST_CASE("synth writes a trace and prints its stats") {
  const auto dir = scratch("synth");
  const auto path = (dir / "n2.trace").string();
  const auto r = invoke({"synth", "--profile", "normal2", "--seed", "7", "-o", path});
  CHECK(r.status == 0);
  CHECK(r.out.find("session,total_time,total_antigen,max_rate") == 0);
  const auto stats = ingest::session_stats(ingest::load_trace(path));
  CHECK(stats.total_time == 104.0);
  CHECK(std::abs(static_cast<double>(stats.total_antigen) - 450.0) <= 9.0);

  const auto again = (dir / "again.trace").string();
  CHECK(invoke({"synth", "--profile", "normal2", "--seed", "7", "-o", again}).status == 0);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("synth custom profile") {
  const auto dir = scratch("custom");
  const auto path = (dir / "c.trace").string();
  const auto r = invoke({"synth", "--profile", "custom", "--total-time", "20", "--total-antigen", "200", "--max-rate",
                      "50", "--attack-count", "10", "--attack-start", "15", "--attack-end", "16", "-o", path});
  CHECK(r.status == 0);
  const auto stats = ingest::session_stats(ingest::load_trace(path));
  CHECK(stats.total_antigen == 210);
  CHECK(stats.max_rate == 50);
}

TEST_CASE("synth failures") {
  const auto dir = scratch("synthbad");
  const auto path = (dir / "x.trace").string();
  CHECK(invoke({"synth", "--profile", "nosuch", "-o", path}).status != 0);
  CHECK(invoke({"synth", "--profile", "custom", "--total-time", "10", "--total-antigen", "100", "--max-rate", "500",
             "-o", path})
            .status != 0);
}

TEST_CASE("stats") {
  const auto dir = scratch("stats");
  const auto empty = dir / "empty.trace";
  std::ofstream(empty) << "#session empty 0\n";
  const auto r = invoke({"stats", empty.string()});
  CHECK(r.status == 0);
  CHECK(r.out == "session,total_time,total_antigen,max_rate,num_signals,total_signals\nempty,0,0,0,0,0\n");

  const auto s1 = (dir / "s1.trace").string();
  REQUIRE(invoke({"synth", "--profile", "success1", "-o", s1}).status == 0);
  const auto row = invoke({"stats", s1, "--which", "session"});
  CHECK(row.out.find("success1,55,1739,1102,") != std::string::npos);

  CHECK(invoke({"stats", (dir / "absent.trace").string()}).status != 0);
  std::ofstream(dir / "junk.trace") << "nonsense\n";
  CHECK(invoke({"stats", (dir / "junk.trace").string()}).status != 0);
}

TEST_CASE("replay and rate stats conserve responses") {
  const auto dir = scratch("replay");
  const auto trace = (dir / "n1.trace").string();
  const auto log = (dir / "n1.log").string();
  REQUIRE(invoke({"synth", "--profile", "normal1", "-o", trace}).status == 0);
  REQUIRE(invoke({"replay", "--trace", trace, "-o", log, "--seed", "3"}).status == 0);
  const auto parsed = load_run_log(log);

  const auto rates = invoke({"stats", log, "--which", "rates"});
  REQUIRE(rates.status == 0);
  std::istringstream lines(rates.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,antigen_rate,response_rate");
  std::size_t total = 0;
  while (std::getline(lines, line)) total += std::stoul(line.substr(line.rfind(',') + 1));
  CHECK(total == parsed.responses().size());

  const auto pol = invoke({"stats", log, "--which", "policy"});
  CHECK(pol.status == 0);
  CHECK(pol.out.find("syscall,frequency") != std::string::npos);
}

TEST_CASE("missing trace names the path") {
  const auto dir = scratch("missing");
  const auto r = invoke({"experiment", "single-run", "--trace", "missing.trace", "--out", dir.string()});
  CHECK(r.status != 0);
  CHECK(r.err.find("missing.trace") != std::string::npos);
  CHECK(invoke({"replay", "--trace", "missing.trace"}).status != 0);
}

TEST_CASE("bad flags") {
  CHECK(invoke({}).status != 0);
  CHECK(invoke({"experiment", "bogus"}).status != 0);
  CHECK(invoke({"experiment", "single-run", "--signal", "maybe", "--out", scratch("flags").string()}).status != 0);
}

TEST_CASE("experiments are byte-identical across reruns") {
  for (const auto* name : {"freq-selectivity", "single-run", "policy-eval", "signal-effect"}) {
    CAPTURE(name);
    const auto a = scratch(std::string(name) + "_a");
    const auto b = scratch(std::string(name) + "_b");
    REQUIRE(invoke({"experiment", name, "--runs", "2", "--seed", "5", "--out", a.string()}).status == 0);
    REQUIRE(invoke({"experiment", name, "--runs", "2", "--seed", "5", "--out", b.string(), "--workers", "1"}).status ==
            0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
    CHECK(files >= 2);
  }
}

TEST_CASE("freq-selectivity artifacts") {
  const auto dir = scratch("table4");
  REQUIRE(invoke({"experiment", "freq-selectivity", "--runs", "3", "--out", dir.string()}).status == 0);
  std::istringstream in(slurp(dir / "table4.csv"));
  std::string line;
  std::size_t rows = 0;
  std::string footer;
  std::getline(in, line);
  CHECK(line == "syscall,frequency,mean,sd,cv");
  while (std::getline(in, line)) {
    if (line.rfind("rho=", 0) == 0) {
      footer = line;
    } else {
      ++rows;
    }
  }
  CHECK(rows == 38);
  CHECK_FALSE(footer.empty());
}

TEST_CASE("signal-effect reports the matched action time") {
  const auto dir = scratch("fig6");
  REQUIRE(invoke({"experiment", "signal-effect", "--runs", "2", "--out", dir.string()}).status == 0);
  const auto text = slurp(dir / "fig6.csv");
  CHECK(text.rfind("t,signal_on_rate,signal_off_rate\n", 0) == 0);
  CHECK(text.find("mean_action_time=") != std::string::npos);
  CHECK(text.find("matched_action_time=") != std::string::npos);
}

TEST_CASE("parameter file is honoured") {
  const auto dir = scratch("params");
  std::ofstream(dir / "p.txt") << "num_cells_2 = 0\n";
  REQUIRE(invoke({"experiment", "single-run", "--params", (dir / "p.txt").string(), "--out", dir.string()}).status == 0);
  const auto table = slurp(dir / "table5.csv");
  CHECK(table.find("syscall,frequency\n") != std::string::npos);
  CHECK(table.substr(table.find("syscall,frequency\n") + 18).empty());
  CHECK(invoke({"experiment", "single-run", "--params", (dir / "nope.txt").string(), "--out", dir.string()}).status !=
        0);
}
