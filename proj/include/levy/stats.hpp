#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levy {

double normal_cdf(double x, double mean, double sigma);
double cauchy_cdf(double x, double location, double scale);

/// Kolmogorov-Smirnov distance between the empirical distribution of the
/// samples and a reference CDF.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf);

/// Nearest-rank quantile of an unsorted sample, q in (0, 1].
double quantile(std::span<const double> samples, double q);

}  // namespace levy
