#include "satin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "satin/rng.hpp"

namespace satin {

namespace {

constexpr double kLowerQuantile = 0.15865525393145707;
constexpr double kUpperQuantile = 0.8413447460685429;

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

double evaluate(std::span<const double> values, Statistic statistic) {
  return statistic == Statistic::mean ? sample_mean(values) : sample_variance(values);
}

}  // namespace

double sample_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("variance needs at least 2 values");
  const double mean = sample_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

Interval bootstrap_ci(std::span<const double> values, Statistic statistic, int n_resamples, std::uint64_t seed) {
  if (values.size() < 2) throw std::invalid_argument("bootstrap needs at least 2 values");
  if (n_resamples < 2) throw std::invalid_argument("n_resamples must be >= 2");
  Interval out;
  out.estimate = evaluate(values, statistic);

  Rng rng(seed);
  std::vector<double> resample(values.size());
  std::vector<double> stats(static_cast<std::size_t>(n_resamples));
  for (auto& s : stats) {
    for (auto& r : resample) r = values[rng.below(values.size())];
    s = evaluate(resample, statistic);
  }
  std::sort(stats.begin(), stats.end());
  out.lo = quantile_sorted(stats, kLowerQuantile);
  out.hi = quantile_sorted(stats, kUpperQuantile);
  return out;
}

AllanResult allan_deviation(std::span<const double> record, double sample_period) {
  const std::size_t n = record.size();
  if (n < 4) throw std::invalid_argument("Allan deviation needs at least 4 samples");
  if (!(sample_period > 0.0)) throw std::invalid_argument("sample period must be positive");

  // Prefix sums give each window average in O(1).
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + record[i];

  AllanResult out;
  for (std::size_t m = 1; 3 * m <= n; m *= 2) {
    const std::size_t terms = n - 2 * m + 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < terms; ++j) {
      const double first = prefix[j + m] - prefix[j];
      const double second = prefix[j + 2 * m] - prefix[j + m];
      const double d = (second - first) / static_cast<double>(m);
      acc += d * d;
    }
    out.tau.push_back(static_cast<double>(m) * sample_period);
    out.adev.push_back(std::sqrt(acc / (2.0 * static_cast<double>(terms))));
  }
  return out;
}

double loglog_slope(const AllanResult& allan, double tau_max) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < allan.tau.size(); ++i) {
    if (allan.tau[i] > tau_max || !(allan.adev[i] > 0.0)) continue;
    const double x = std::log(allan.tau[i]);
    const double y = std::log(allan.adev[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("need at least 2 points for a slope");
  const double denom = count * sxx - sx * sx;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace satin
