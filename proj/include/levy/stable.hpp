#pragma once

#include <complex>
#include <span>

#include "levy/common.hpp"

namespace levy {

/// Parameters of a symmetric alpha-stable law: characteristic exponent
/// alpha in (0, 2], location mu, scale gamma > 0. alpha = 2 is Gaussian
/// with variance 2*gamma^2, alpha = 1 is Cauchy with scale gamma.
struct StableParams {
  double alpha = 2.0;
  double mu = 0.0;
  double gamma = 1.0;
};

/// Throws DomainError if the parameters leave the valid range.
void validate(const StableParams& params);

/// One draw from the symmetric stable law, via the Chambers-Mallows-Stuck
/// construction (uniform angle + unit exponential). Exact, not approximate.
double sample_scalar(const StableParams& params, Rng& rng);

/// Vector of dim i.i.d. draws, consuming the stream component by component.
DataPoint sample_vector(const StableParams& params, int dim, Rng& rng);

/// Empirical characteristic function (1/n) * sum_k exp(i*s*x_k).
std::complex<double> empirical_cf(std::span<const double> samples, double s);

/// Analytic characteristic function exp(i*mu*s - |gamma*s|^alpha).
std::complex<double> analytic_cf(const StableParams& params, double s);

/// Tail-heaviness statistic: 99th percentile of |x| divided by the median
/// of |x|. Needs at least 1000 samples; rejects degenerate constant input.
double impulsiveness_ratio(std::span<const double> samples);

}  // namespace levy
