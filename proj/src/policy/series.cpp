#include "tissue/series.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace tissue::policy {

RateSeries response_rate_series(const RunLog& log, Micros bin) {
  if (bin <= 0) throw std::invalid_argument("response_rate_series: bin must be > 0");

  Micros end = log.counters.end_time;
  for (const auto& e : log.events) {
    std::visit([&](const auto& ev) {
      using T = std::decay_t<decltype(ev)>;
      if constexpr (std::is_same_v<T, ProbeSnapshot>) {
        end = std::max(end, ev.taken_at);
      } else {
        end = std::max(end, ev.at);
      }
    }, e);
  }
  const auto count = static_cast<std::size_t>(std::max<Micros>(1, (end + bin - 1) / bin));

  RateSeries series;
  series.bins.resize(count);
  for (std::size_t i = 0; i < count; ++i) series.bins[i].t = static_cast<Micros>(i) * bin;
  const auto index = [&](Micros t) { return std::min(count - 1, static_cast<std::size_t>(t / bin)); };

  std::map<CellId, std::set<Syscall>> responded;
  for (const auto& e : log.events) {
    if (const auto* inj = std::get_if<InjectionEvent>(&e)) {
      ++series.bins[index(inj->at)].antigen;
    } else if (const auto* r = std::get_if<ResponseEvent>(&e)) {
      ++series.bins[index(r->at)].responses;
      responded[r->cell].insert(r->syscall);
    } else if (const auto* p = std::get_if<ProbeSnapshot>(&e)) {
      for (const auto& [cell, locks] : p->per_cell_vr_locks) {
        const auto it = responded.find(cell);
        for (const auto lock : locks) {
          const bool hit = it != responded.end() && it->second.contains(lock);
          series.raster.push_back({p->taken_at, cell, lock, hit});
        }
      }
    }
  }
  return series;
}

std::vector<double> mean_response_curve(std::span<const RateSeries> runs) {
  std::size_t width = 0;
  for (const auto& r : runs) width = std::max(width, r.bins.size());
  std::vector<double> mean(width, 0.0);
  if (runs.empty()) return mean;
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < r.bins.size(); ++i) mean[i] += static_cast<double>(r.bins[i].responses);
  }
  for (auto& v : mean) v /= static_cast<double>(runs.size());
  return mean;
}

Micros response_span(const RunLog& log) {
  const auto responses = log.responses();
  if (responses.size() < 2) return 0;
  return responses.back().at - responses.front().at;
}

void write_rate_csv(std::ostream& out, std::span<const RateBin> bins) {
  out << "t,antigen_rate,response_rate\n";
  for (const auto& b : bins) {
    out << static_cast<double>(b.t) / kMicrosPerSecond << ',' << b.antigen << ',' << b.responses << '\n';
  }
}

void write_raster_csv(std::ostream& out, std::span<const RasterPoint> raster) {
  out << "t,cell_id,syscall,responded_flag\n";
  for (const auto& p : raster) {
    out << static_cast<double>(p.t) / kMicrosPerSecond << ',' << p.cell << ',' << p.syscall << ','
        << (p.responded ? 1 : 0) << '\n';
  }
}

}  // namespace tissue::policy
