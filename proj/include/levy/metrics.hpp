#pragma once

#include <span>
#include <vector>

#include "levy/common.hpp"

namespace levy {

enum class NormKind { linf, l1, l2 };

double lp_norm(const DataPoint& tau, NormKind p);

struct Aggregate {
  double mean = 0.0;
  double median = 0.0;
};

// Median uses the lower-middle element for even counts so results are
// deterministic across platforms; no interpolation.
Aggregate aggregate(std::span<const double> values);

// Fraction of coordinates with magnitude above 1% of the max-magnitude
// coordinate. Lower means sparser.
double perturbation_sparsity(const DataPoint& tau);

struct NormStats {
  Aggregate linf;
  Aggregate l1;
  Aggregate l2;
};

// Aggregates over successful attacks only; failures are counted, not mixed in.
struct NormTable {
  NormStats norms;
  double mean_iterations = 0.0;
  int n_success = 0;
  int n_fail = 0;
};

NormTable build_norm_table(std::span<const DataPoint> perturbations,
                           std::span<const double> iterations, int n_fail);

}  // namespace levy
