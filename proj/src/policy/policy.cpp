#include "tissue/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tissue/statistics.hpp"

namespace tissue::policy {

SyscallPolicy naive_policy(std::span<const ingest::SessionTrace> traces) {
  SyscallPolicy policy;
  policy.provenance = Provenance::naive;
  for (const auto& trace : traces) {
    for (const auto& e : trace.events) {
      if (e.kind != ingest::EventKind::antigen) continue;
      policy.permitted.insert(e.syscall);
      ++policy.per_syscall_frequency[e.syscall];
    }
  }
  return policy;
}

SyscallPolicy twocell_policy(const RunLog& log) {
  SyscallPolicy policy;
  policy.provenance = Provenance::twocell_single_run;
  for (const auto& e : log.events) {
    if (const auto* r = std::get_if<ResponseEvent>(&e)) {
      policy.permitted.insert(r->syscall);
      ++policy.per_syscall_frequency[r->syscall];
    }
  }
  return policy;
}

SyscallPolicy union_policies(std::span<const SyscallPolicy> policies) {
  if (policies.empty()) throw std::invalid_argument("union_policies: need at least one policy");
  SyscallPolicy out;
  out.provenance = Provenance::twocell_union;
  for (const auto& p : policies) {
    for (const auto s : p.permitted) {
      out.permitted.insert(s);
      ++out.per_syscall_frequency[s];
    }
  }
  return out;
}

PolicyEvaluation evaluate_policy(const SyscallPolicy& policy, const ingest::SessionTrace& trace) {
  PolicyEvaluation eval;
  for (const auto& e : trace.events) {
    if (e.kind != ingest::EventKind::antigen) continue;
    if (policy.permits(e.syscall)) {
      ++eval.permitted_count;
    } else {
      ++eval.denied_count;
    }
  }
  const auto total = eval.permitted_count + eval.denied_count;
  if (total > 0) {
    eval.permitted_pct = static_cast<int>(
        std::lround(100.0 * static_cast<double>(eval.permitted_count) / static_cast<double>(total)));
    eval.denied_pct = 100 - eval.permitted_pct;
  }
  return eval;
}

std::vector<FrequencyRow> frequency_table(const SyscallPolicy& naive, std::span<const SyscallPolicy> runs) {
  std::vector<FrequencyRow> rows;
  for (const auto s : naive.permitted) {
    FrequencyRow row;
    row.syscall = s;
    if (const auto it = naive.per_syscall_frequency.find(s); it != naive.per_syscall_frequency.end()) {
      row.frequency = it->second;
    }
    std::vector<double> counts;
    counts.reserve(runs.size());
    for (const auto& run : runs) {
      const auto it = run.per_syscall_frequency.find(s);
      counts.push_back(it == run.per_syscall_frequency.end() ? 0.0 : static_cast<double>(it->second));
    }
    const auto [mean, sd] = mean_sd(counts);
    row.mean = mean;
    row.sd = sd;
    if (!(mean == 0.0 && sd > 0.0)) row.cv = coefficient_of_variation(mean, sd);
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const FrequencyRow& a, const FrequencyRow& b) {
    return a.frequency != b.frequency ? a.frequency < b.frequency : a.mean < b.mean;
  });
  return rows;
}

double frequency_selectivity_rho(std::span<const FrequencyRow> rows) {
  std::vector<double> freq;
  std::vector<double> mean;
  for (const auto& r : rows) {
    freq.push_back(static_cast<double>(r.frequency));
    mean.push_back(r.mean);
  }
  return spearman_rho(freq, mean);
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::naive:
      return "naive";
    case Provenance::twocell_single_run:
      return "twocell_single_run";
    case Provenance::twocell_union:
      return "twocell_union";
  }
  return "unknown";
}

}  // namespace

void write_frequency_table_csv(std::ostream& out, std::span<const FrequencyRow> rows) {
  out << "syscall,frequency,mean,sd,cv\n";
  for (const auto& r : rows) {
    out << r.syscall << ',' << r.frequency << ',' << fixed(r.mean, 4) << ',' << fixed(r.sd, 4) << ','
        << (r.cv ? fixed(*r.cv, 1) : std::string("nan")) << '\n';
  }
}

void write_policy_csv(std::ostream& out, const SyscallPolicy& policy) {
  out << "# provenance=" << provenance_name(policy.provenance) << '\n';
  out << "syscall,frequency\n";
  std::vector<std::pair<Syscall, std::size_t>> rows;
  for (const auto s : policy.permitted) {
    const auto it = policy.per_syscall_frequency.find(s);
    rows.emplace_back(s, it == policy.per_syscall_frequency.end() ? 0 : it->second);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& [s, f] : rows) out << s << ',' << f << '\n';
}

void write_evaluation_csv(std::ostream& out, std::span<const EvaluationRow> rows) {
  out << "dataset,policy,permitted_pct,denied_pct,permitted,denied\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.policy << ',' << r.result.permitted_pct << ',' << r.result.denied_pct << ','
        << r.result.permitted_count << ',' << r.result.denied_count << '\n';
  }
}

}  // namespace tissue::policy
