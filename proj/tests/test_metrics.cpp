#include <limits>
#include <vector>

#include "doctest.h"

#include "levy/metrics.hpp"
#include "levy/stable.hpp"

TEST_CASE("lp norms on fixed vectors") {
  levy::DataPoint tau(2);
  tau << 3.0, -4.0;
  CHECK(levy::lp_norm(tau, levy::NormKind::l1) == doctest::Approx(7.0));
  CHECK(levy::lp_norm(tau, levy::NormKind::l2) == doctest::Approx(5.0));
  CHECK(levy::lp_norm(tau, levy::NormKind::linf) == doctest::Approx(4.0));

  const levy::DataPoint zero = levy::DataPoint::Zero(5);
  CHECK(levy::lp_norm(zero, levy::NormKind::l1) == 0.0);
  CHECK(levy::lp_norm(zero, levy::NormKind::l2) == 0.0);
  CHECK(levy::lp_norm(zero, levy::NormKind::linf) == 0.0);

  levy::DataPoint bad(2);
  bad << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(levy::lp_norm(bad, levy::NormKind::l1), levy::DomainError);
}

TEST_CASE("norm ordering linf <= l2 <= l1 over random vectors") {
  levy::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    levy::DataPoint tau(16);
    for (int i = 0; i < 16; ++i) tau[i] = rng.gaussian();
    const double linf = levy::lp_norm(tau, levy::NormKind::linf);
    const double l2 = levy::lp_norm(tau, levy::NormKind::l2);
    const double l1 = levy::lp_norm(tau, levy::NormKind::l1);
    CHECK(linf <= l2 + 1e-12);
    CHECK(l2 <= l1 + 1e-12);
  }
}

TEST_CASE("aggregate uses the lower-middle median convention") {
  const std::vector<double> even{1.0, 2.0, 3.0, 4.0};
  const auto agg = levy::aggregate(even);
  CHECK(agg.mean == doctest::Approx(2.5));
  CHECK(agg.median == 2.0);

  const std::vector<double> single{5.0};
  const auto one = levy::aggregate(single);
  CHECK(one.mean == 5.0);
  CHECK(one.median == 5.0);

  const std::vector<double> odd{9.0, 1.0, 5.0};
  CHECK(levy::aggregate(odd).median == 5.0);

  CHECK_THROWS_AS(levy::aggregate({}), levy::DomainError);
}

TEST_CASE("aggregate mean of uniform draws lands near one half") {
  levy::Rng rng(17);
  std::vector<double> draws(10000);
  for (auto& d : draws) d = rng.uniform_open();
  const auto agg = levy::aggregate(draws);
  // 3 sigma for the mean of 1e4 U(0,1) draws is about 0.0087.
  CHECK(agg.mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("perturbation sparsity extremes") {
  levy::DataPoint lone = levy::DataPoint::Zero(8);
  lone[3] = 2.5;
  CHECK(levy::perturbation_sparsity(lone) == doctest::Approx(1.0 / 8.0));

  const levy::DataPoint flat = levy::DataPoint::Constant(10, -0.3);
  CHECK(levy::perturbation_sparsity(flat) == doctest::Approx(1.0));

  const levy::DataPoint zero = levy::DataPoint::Zero(4);
  CHECK_THROWS_AS(levy::perturbation_sparsity(zero), levy::DomainError);
}

TEST_CASE("stable noise at alpha 0.5 is sparser than at alpha 2") {
  levy::Rng rng(29);
  levy::StableParams heavy;
  heavy.alpha = 0.5;
  levy::StableParams gauss;
  gauss.alpha = 2.0;
  double heavy_sum = 0.0;
  double gauss_sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    heavy_sum +=
        levy::perturbation_sparsity(levy::sample_vector(heavy, 100, rng));
    gauss_sum +=
        levy::perturbation_sparsity(levy::sample_vector(gauss, 100, rng));
  }
  CHECK(heavy_sum / 100.0 < gauss_sum / 100.0);
}

TEST_CASE("norm table aggregates successes and counts failures") {
  std::vector<levy::DataPoint> perturbations;
  levy::DataPoint a(3), b(3);
  a << 0.5, 0.0, -0.5;
  b << 1.0, 1.0, 1.0;
  perturbations = {a, b};
  const std::vector<double> iterations{100.0, 300.0};

  const auto table = levy::build_norm_table(perturbations, iterations, 3);
  CHECK(table.n_success == 2);
  CHECK(table.n_fail == 3);
  CHECK(table.mean_iterations == doctest::Approx(200.0));
  CHECK(table.norms.l1.mean == doctest::Approx((1.0 + 3.0) / 2.0));
  CHECK(table.norms.l1.median == doctest::Approx(1.0));
  CHECK(table.norms.linf.median <= table.norms.l2.median);
  CHECK(table.norms.l2.median <= table.norms.l1.median);

  CHECK_THROWS_AS(
      levy::build_norm_table(perturbations, std::vector<double>{1.0}, 0),
      levy::DomainError);

  const auto empty = levy::build_norm_table({}, {}, 4);
  CHECK(empty.n_success == 0);
  CHECK(empty.n_fail == 4);
}
