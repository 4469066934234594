#include "levy/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace levy {

double lp_norm(const DataPoint& tau, NormKind p) {
  if (!tau.allFinite()) {
    throw DomainError("lp_norm requires finite input");
  }
  switch (p) {
    case NormKind::linf:
      return tau.size() == 0 ? 0.0 : tau.cwiseAbs().maxCoeff();
    case NormKind::l1:
      return tau.cwiseAbs().sum();
    case NormKind::l2:
      return tau.norm();
  }
  throw DomainError("unknown norm kind");
}

Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) {
    throw DomainError("aggregate requires a non-empty list");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = (sorted.size() - 1) / 2;
  return Aggregate{sum / static_cast<double>(values.size()), sorted[mid]};
}

double perturbation_sparsity(const DataPoint& tau) {
  if (tau.size() == 0) {
    throw DomainError("perturbation_sparsity requires a non-empty vector");
  }
  const double peak = tau.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) {
    throw DomainError("perturbation_sparsity requires a nonzero vector");
  }
  const double threshold = 0.01 * peak;
  const auto active =
      (tau.cwiseAbs().array() > threshold).count();
  return static_cast<double>(active) / static_cast<double>(tau.size());
}

NormTable build_norm_table(std::span<const DataPoint> perturbations,
                           std::span<const double> iterations, int n_fail) {
  if (perturbations.size() != iterations.size()) {
    throw DomainError("perturbation/iteration count mismatch");
  }
  if (n_fail < 0) {
    throw DomainError("n_fail must be non-negative");
  }
  NormTable table;
  table.n_success = static_cast<int>(perturbations.size());
  table.n_fail = n_fail;
  if (perturbations.empty()) {
    return table;
  }
  std::vector<double> linf, l1, l2;
  linf.reserve(perturbations.size());
  l1.reserve(perturbations.size());
  l2.reserve(perturbations.size());
  for (const auto& tau : perturbations) {
    linf.push_back(lp_norm(tau, NormKind::linf));
    l1.push_back(lp_norm(tau, NormKind::l1));
    l2.push_back(lp_norm(tau, NormKind::l2));
  }
  table.norms.linf = aggregate(linf);
  table.norms.l1 = aggregate(l1);
  table.norms.l2 = aggregate(l2);
  table.mean_iterations = aggregate(iterations).mean;
  return table;
}

}  // namespace levy
