#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace satin {

enum class Statistic { mean, variance };

struct Interval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

double sample_mean(std::span<const double> values);
/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> values);

/// Percentile bootstrap interval covering the central 68.27 %.
Interval bootstrap_ci(std::span<const double> values, Statistic statistic, int n_resamples, std::uint64_t seed);

struct AllanResult {
  std::vector<double> tau;
  std::vector<double> adev;
};

/// Overlapping Allan deviation of a record of per-sample phase estimates,
/// evaluated at averaging factors 1, 2, 4, ... up to a third of the record.
AllanResult allan_deviation(std::span<const double> record, double sample_period);

/// Least-squares slope of log(adev) against log(tau) over points with tau <= tau_max
/// and nonzero adev.
double loglog_slope(const AllanResult& allan, double tau_max);

}  // namespace satin
