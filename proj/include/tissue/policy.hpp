#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tissue/run_log.hpp"
#include "tissue/trace.hpp"

namespace tissue::policy {

enum class Provenance { naive, twocell_single_run, twocell_union };

/// Permit-list over syscall numbers. For naive policies the frequencies are
/// observed call counts; for a single twoCell run they are response counts;
/// for a union they count the member policies permitting the syscall.
struct SyscallPolicy {
  std::set<Syscall> permitted;
  Provenance provenance = Provenance::naive;
  std::map<Syscall, std::size_t> per_syscall_frequency;

  bool permits(Syscall s) const { return permitted.contains(s); }
  bool operator==(const SyscallPolicy&) const = default;
};

/// Permits every syscall seen in the traces.
SyscallPolicy naive_policy(std::span<const ingest::SessionTrace> traces);

/// Permits exactly the syscalls some Type 2 cell responded to.
SyscallPolicy twocell_policy(const RunLog& log);

/// Throws std::invalid_argument for an empty list.
SyscallPolicy union_policies(std::span<const SyscallPolicy> policies);

struct PolicyEvaluation {
  std::size_t permitted_count = 0;
  std::size_t denied_count = 0;
  /// Rounded to whole percent; denied is 100 - permitted so the pair always
  /// sums to 100. An empty trace counts as fully permitted.
  int permitted_pct = 100;
  int denied_pct = 0;
};

PolicyEvaluation evaluate_policy(const SyscallPolicy& policy, const ingest::SessionTrace& trace);

/// One row of the per-syscall frequency table: input frequency plus the
/// mean, population sd and cv of the per-run response counts.
struct FrequencyRow {
  Syscall syscall = 0;
  std::size_t frequency = 0;
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> cv;  // empty when undefined (mean 0, sd > 0)
};

/// Rows for every syscall the naive policy permits, ordered by frequency
/// then mean. Runs that never responded to a syscall count as zero.
std::vector<FrequencyRow> frequency_table(const SyscallPolicy& naive, std::span<const SyscallPolicy> runs);

/// Spearman rho between the frequency and mean columns.
double frequency_selectivity_rho(std::span<const FrequencyRow> rows);

void write_frequency_table_csv(std::ostream& out, std::span<const FrequencyRow> rows);
void write_policy_csv(std::ostream& out, const SyscallPolicy& policy);

struct EvaluationRow {
  std::string dataset;
  std::string policy;
  PolicyEvaluation result;
};

void write_evaluation_csv(std::ostream& out, std::span<const EvaluationRow> rows);

}  // namespace tissue::policy
