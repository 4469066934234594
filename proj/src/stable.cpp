#include "levy/stable.hpp"

#include <algorithm>
#include <vector>

namespace levy {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
// Keeps the CMS angle away from +-pi/2 where tan/cos blow up.
constexpr double kAngleMargin = 1e-12;

}  // namespace

void validate(const StableParams& params) {
  if (!(params.alpha > 0.0) || !(params.alpha <= 2.0)) {
    throw DomainError("stable alpha must lie in (0, 2], got " +
                      std::to_string(params.alpha));
  }
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma)) {
    throw DomainError("stable gamma must be positive and finite, got " +
                      std::to_string(params.gamma));
  }
  if (!std::isfinite(params.mu)) {
    throw DomainError("stable mu must be finite");
  }
}

double sample_scalar(const StableParams& params, Rng& rng) {
  validate(params);
  double phi = (rng.uniform_open() - 0.5) * kPi;
  phi = std::clamp(phi, -kHalfPi + kAngleMargin, kHalfPi - kAngleMargin);
  const double w = rng.unit_exponential();

  double x;
  if (params.alpha == 1.0) {
    x = std::tan(phi);
  } else {
    const double a = params.alpha;
    x = std::sin(a * phi) / std::pow(std::cos(phi), 1.0 / a) *
        std::pow(std::cos((1.0 - a) * phi) / w, (1.0 - a) / a);
  }
  return params.mu + params.gamma * x;
}

DataPoint sample_vector(const StableParams& params, int dim, Rng& rng) {
  validate(params);
  if (dim < 1) {
    throw DomainError("sample_vector needs dim >= 1, got " + std::to_string(dim));
  }
  DataPoint out(dim);
  for (int i = 0; i < dim; ++i) {
    out[i] = sample_scalar(params, rng);
  }
  return out;
}

std::complex<double> empirical_cf(std::span<const double> samples, double s) {
  if (samples.empty()) {
    throw DomainError("empirical_cf needs a non-empty sample");
  }
  if (!std::isfinite(s)) {
    throw DomainError("empirical_cf needs finite s");
  }
  double re = 0.0;
  double im = 0.0;
  for (double x : samples) {
    re += std::cos(s * x);
    im += std::sin(s * x);
  }
  const double n = static_cast<double>(samples.size());
  return {re / n, im / n};
}

std::complex<double> analytic_cf(const StableParams& params, double s) {
  validate(params);
  const double magnitude = std::exp(-std::pow(std::abs(params.gamma * s), params.alpha));
  return std::polar(magnitude, params.mu * s);
}

double impulsiveness_ratio(std::span<const double> samples) {
  if (samples.size() < 1000) {
    throw DomainError("impulsiveness_ratio needs at least 1000 samples, got " +
                      std::to_string(samples.size()));
  }
  std::vector<double> magnitudes(samples.size());
  std::transform(samples.begin(), samples.end(), magnitudes.begin(),
                 [](double x) { return std::abs(x); });
  std::sort(magnitudes.begin(), magnitudes.end());
  if (magnitudes.front() == magnitudes.back()) {
    throw DomainError("impulsiveness_ratio is undefined for constant samples");
  }
  // Nearest-rank percentiles over the sorted magnitudes.
  const auto rank = [&](double q) {
    const auto n = magnitudes.size();
    const auto idx = static_cast<std::size_t>(
        std::min<double>(std::ceil(q * static_cast<double>(n)),
                         static_cast<double>(n)));
    return magnitudes[idx == 0 ? 0 : idx - 1];
  };
  const double median = rank(0.50);
  const double p99 = rank(0.99);
  if (!(median > 0.0)) {
    throw DomainError("impulsiveness_ratio is undefined when the median magnitude is zero");
  }
  return p99 / median;
}

}  // namespace levy
