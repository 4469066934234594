#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "levy/sweep.hpp"

namespace {

struct Fixture {
  levy::LabeledDataset dataset;
  levy::OracleHandle oracle;

  static Fixture make() {
    levy::Rng data_rng(301);
    auto dataset = levy::make_synthetic_blobs(2, 8, 30, 6.0, data_rng);
    levy::Rng train_rng(302);
    auto trained = levy::train_toy_classifier(dataset, 200, train_rng);
    REQUIRE(trained.train_accuracy >= 0.95);
    return Fixture{std::move(dataset), std::move(trained.oracle)};
  }
};

levy::SweepSettings small_settings() {
  levy::SweepSettings settings;
  settings.alphas = {2.0, 0.5};
  settings.samples = 10;
  settings.base.max_steps = 300;
  settings.master_seed = 10;
  settings.worker_threads = 1;
  return settings;
}

std::string report_bytes(const levy::SweepReport& report) {
  return levy::report_json(report).dump(2) + "\n";
}

}  // namespace

TEST_CASE("sweep produces one row per alpha with sane aggregates") {
  auto fixture = Fixture::make();
  const auto settings = small_settings();
  const auto report = levy::run_sweep(fixture.oracle, fixture.dataset, settings);

  REQUIRE(report.rows.size() == 2);
  REQUIRE(report.results.size() == 2);
  for (std::size_t a = 0; a < report.rows.size(); ++a) {
    const auto& row = report.rows[a];
    CHECK(row.alpha == settings.alphas[a]);
    CHECK(row.table.n_success + row.table.n_fail == settings.samples);
    CHECK(row.table.n_success > 0);
    REQUIRE(report.results[a].size() == static_cast<std::size_t>(settings.samples));
    if (row.table.n_success > 0) {
      CHECK(row.table.norms.l2.mean > 0.0);
      CHECK(row.table.norms.linf.median <= row.table.norms.l2.median);
      CHECK(row.table.mean_iterations > 0.0);
      CHECK(row.mean_queries > 0.0);
    }
  }

  // The per-run query invariant holds for every stored result.
  for (const auto& per_alpha : report.results) {
    for (const auto& result : per_alpha) {
      CHECK(result.queries_used <=
            static_cast<std::uint64_t>(settings.base.max_init_attempts) +
                settings.base.max_steps + 2);
    }
  }
}

TEST_CASE("serial and parallel sweeps serialize to identical bytes") {
  auto fixture = Fixture::make();
  auto settings = small_settings();

  settings.worker_threads = 1;
  const auto serial = levy::run_sweep(fixture.oracle, fixture.dataset, settings);
  settings.worker_threads = 4;
  const auto parallel = levy::run_sweep(fixture.oracle, fixture.dataset, settings);

  CHECK(report_bytes(serial) == report_bytes(parallel));
}

TEST_CASE("repeated invocations serialize to identical bytes") {
  auto fixture = Fixture::make();
  const auto settings = small_settings();
  const auto first = levy::run_sweep(fixture.oracle, fixture.dataset, settings);
  const auto second = levy::run_sweep(fixture.oracle, fixture.dataset, settings);
  CHECK(report_bytes(first) == report_bytes(second));
}

TEST_CASE("sweep validates its inputs") {
  auto fixture = Fixture::make();
  auto settings = small_settings();

  SUBCASE("no alphas") {
    settings.alphas.clear();
    CHECK_THROWS_AS(levy::run_sweep(fixture.oracle, fixture.dataset, settings),
                    levy::DomainError);
  }
  SUBCASE("zero samples") {
    settings.samples = 0;
    CHECK_THROWS_AS(levy::run_sweep(fixture.oracle, fixture.dataset, settings),
                    levy::DomainError);
  }
  SUBCASE("more samples than dataset points") {
    settings.samples = fixture.dataset.size() + 1;
    CHECK_THROWS_AS(levy::run_sweep(fixture.oracle, fixture.dataset, settings),
                    levy::DomainError);
  }
  SUBCASE("invalid alpha") {
    settings.alphas = {2.5};
    CHECK_THROWS_AS(levy::run_sweep(fixture.oracle, fixture.dataset, settings),
                    levy::DomainError);
  }
}

TEST_CASE("worker thread resolution") {
  unsetenv("LEVY_ATTACK_THREADS");
  CHECK(levy::resolve_worker_threads(3) == 3);
  CHECK(levy::resolve_worker_threads(0) >= 1);

  setenv("LEVY_ATTACK_THREADS", "2", 1);
  CHECK(levy::resolve_worker_threads(8) == 2);
  CHECK(levy::resolve_worker_threads(1) == 1);

  setenv("LEVY_ATTACK_THREADS", "abc", 1);
  CHECK_THROWS_AS(levy::resolve_worker_threads(4), levy::DomainError);
  setenv("LEVY_ATTACK_THREADS", "0", 1);
  CHECK_THROWS_AS(levy::resolve_worker_threads(4), levy::DomainError);

  unsetenv("LEVY_ATTACK_THREADS");
  CHECK(levy::resolve_worker_threads(8) == 8);
}

TEST_CASE("report JSON carries the documented schema") {
  auto fixture = Fixture::make();
  const auto settings = small_settings();
  const auto report = levy::run_sweep(fixture.oracle, fixture.dataset, settings);
  const auto json = levy::report_json(report);

  REQUIRE(json.contains("config"));
  REQUIRE(json.contains("per_alpha"));
  CHECK(json["config"]["max_steps"] == 300);
  CHECK(json["config"]["samples"] == 10);
  CHECK(json["config"]["alphas"].size() == 2);

  REQUIRE(json["per_alpha"].size() == 2);
  for (const auto& row : json["per_alpha"]) {
    CHECK(row.contains("alpha"));
    CHECK(row.contains("mean_iterations"));
    CHECK(row.contains("n_success"));
    CHECK(row.contains("n_fail"));
    REQUIRE(row.contains("norms"));
    for (const char* norm : {"linf", "l1", "l2"}) {
      REQUIRE(row["norms"].contains(norm));
      CHECK(row["norms"][norm].contains("mean"));
      CHECK(row["norms"][norm].contains("median"));
    }
  }
}

TEST_CASE("write_report emits a parseable file") {
  auto fixture = Fixture::make();
  auto settings = small_settings();
  settings.samples = 4;
  settings.base.max_steps = 100;
  const auto report = levy::run_sweep(fixture.oracle, fixture.dataset, settings);

  const auto path =
      std::filesystem::temp_directory_path() / "levy_sweep_report_test.json";
  levy::write_report(path, report);
  REQUIRE(std::filesystem::exists(path));

  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto parsed = nlohmann::json::parse(buffer.str());
  CHECK(parsed.contains("config"));
  CHECK(parsed.contains("per_alpha"));
  CHECK(buffer.str() == report_bytes(report));
  std::filesystem::remove(path);
}
