#pragma once

#include <span>
#include <vector>

namespace tissue::policy {

/// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman's rho as the Pearson correlation of average ranks.
/// Throws std::invalid_argument on a length mismatch or fewer than two
/// pairs, std::domain_error when either input is constant.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

/// 100 * sd / mean. Zero when sd is zero; std::domain_error when mean is
/// zero and sd is not; std::invalid_argument for negative inputs.
double coefficient_of_variation(double mean, double sd);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // population
};

MeanSd mean_sd(std::span<const double> values);

}  // namespace tissue::policy
