#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "tissue/run_log.hpp"

namespace tissue::policy {

struct RateBin {
  Micros t = 0;  // bin start
  std::size_t antigen = 0;
  std::size_t responses = 0;
};

/// One VR lock value expressed by a Type 2 cell at a probe.
struct RasterPoint {
  Micros t = 0;
  CellId cell = 0;
  Syscall syscall = 0;
  bool responded = false;  // the cell has responded to this syscall by t
};

struct RateSeries {
  std::vector<RateBin> bins;
  std::vector<RasterPoint> raster;
};

/// Bins antigen arrivals (one per injected syscall) and responses over
/// [0, end of run]. Always at least one bin. Throws std::invalid_argument
/// for a non-positive bin width.
RateSeries response_rate_series(const RunLog& log, Micros bin);

/// Bin-wise mean of equally binned series from several runs (shorter series
/// are padded with zeros).
std::vector<double> mean_response_curve(std::span<const RateSeries> runs);

/// Time from the first to the last response; zero with fewer than two.
Micros response_span(const RunLog& log);

void write_rate_csv(std::ostream& out, std::span<const RateBin> bins);
void write_raster_csv(std::ostream& out, std::span<const RasterPoint> raster);

}  // namespace tissue::policy
