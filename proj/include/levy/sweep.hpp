#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "levy/attack.hpp"
#include "levy/data.hpp"
#include "levy/metrics.hpp"
#include "levy/oracle.hpp"

#include "json.hpp"

namespace levy {

struct SweepSettings {
  std::vector<double> alphas;
  int samples = 20;
  AttackConfig base;       // alpha and seed are overridden per run
  RngSeed master_seed = 0;
  int worker_threads = 1;  // 0 = hardware concurrency; env cap applies either way
};

struct AlphaRow {
  double alpha = 0.0;
  NormTable table;
  double mean_queries = 0.0;
  double sparsity_mean = 0.0;
};

struct SweepReport {
  SweepSettings settings;
  std::vector<AlphaRow> rows;
  // Full per-run results, indexed [alpha][sample], for dumps and diagnostics.
  std::vector<std::vector<AttackResult>> results;
};

// Honors LEVY_ATTACK_THREADS as an upper bound; requested = 0 asks for
// hardware concurrency.
int resolve_worker_threads(int requested);

// Attacks the first `samples` dataset points once per alpha. Each run seeds
// its own stream from (master_seed, sample index), so reports are identical
// regardless of worker count, and the same sample sees the same stream at
// every alpha.
SweepReport run_sweep(const OracleHandle& oracle, const LabeledDataset& dataset,
                      const SweepSettings& settings);

nlohmann::ordered_json report_json(const SweepReport& report);
void write_report(const std::filesystem::path& path, const SweepReport& report);

}  // namespace levy
