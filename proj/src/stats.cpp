#include "levy/stats.hpp"

#include <algorithm>
#include <cmath>

#include "levy/common.hpp"

namespace levy {

double normal_cdf(double x, double mean, double sigma) {
  return 0.5 * std::erfc(-(x - mean) / (sigma * 1.41421356237309504880));
}

double cauchy_cdf(double x, double location, double scale) {
  return 0.5 + std::atan((x - location) / scale) / 3.14159265358979323846;
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw DomainError("ks_distance needs a non-empty sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double quantile(std::span<const double> samples, double q) {
  if (samples.empty()) {
    throw DomainError("quantile needs a non-empty sample");
  }
  if (!(q > 0.0) || q > 1.0) {
    throw DomainError("quantile needs q in (0, 1]");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (idx > 0) --idx;
  return sorted[idx];
}

}  // namespace levy
