#include "levy/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

namespace levy {

int resolve_worker_threads(int requested) {
  if (requested < 0) {
    throw DomainError("worker_threads must be >= 0");
  }
  int threads = requested;
  if (threads == 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  if (const char* env = std::getenv("LEVY_ATTACK_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw DomainError(std::string("LEVY_ATTACK_THREADS must be a positive "
                                    "integer, got \"") +
                        env + "\"");
    }
    threads = static_cast<int>(std::min<long>(threads, cap));
  }
  return threads;
}

SweepReport run_sweep(const OracleHandle& oracle, const LabeledDataset& dataset,
                      const SweepSettings& settings) {
  if (settings.alphas.empty()) {
    throw DomainError("sweep needs at least one alpha");
  }
  if (settings.samples < 1) {
    throw DomainError("sweep needs samples >= 1");
  }
  if (settings.samples > static_cast<int>(dataset.size())) {
    throw DomainError("sweep wants " + std::to_string(settings.samples) +
                      " samples but the dataset holds " +
                      std::to_string(dataset.size()));
  }
  if (dataset.dim() != oracle.input_dim()) {
    throw DomainError("dataset dimension does not match the oracle");
  }
  for (double alpha : settings.alphas) {
    AttackConfig probe = settings.base;
    probe.alpha = alpha;
    probe.validate();
  }

  const int num_alphas = static_cast<int>(settings.alphas.size());
  SweepReport report;
  report.settings = settings;
  report.results.assign(num_alphas,
                        std::vector<AttackResult>(settings.samples));

  struct Task {
    int alpha_index;
    int sample_index;
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(num_alphas) * settings.samples);
  for (int a = 0; a < num_alphas; ++a) {
    for (int i = 0; i < settings.samples; ++i) {
      tasks.push_back({a, i});
    }
  }

  const int threads = resolve_worker_threads(settings.worker_threads);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= tasks.size()) return;
      const Task task = tasks[index];
      try {
        OracleHandle local = oracle.clone();
        AttackConfig config = settings.base;
        config.alpha = settings.alphas[task.alpha_index];
        config.seed = derive_seed(settings.master_seed, task.sample_index);
        report.results[task.alpha_index][task.sample_index] =
            run_attack(local, dataset.points[task.sample_index],
                       dataset.labels[task.sample_index], config);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (int a = 0; a < num_alphas; ++a) {
    AlphaRow row;
    row.alpha = settings.alphas[a];
    std::vector<DataPoint> perturbations;
    std::vector<double> iterations;
    std::vector<double> queries;
    std::vector<double> sparsities;
    int failures = 0;
    for (const auto& result : report.results[a]) {
      if (!result.succeeded()) {
        ++failures;
        continue;
      }
      perturbations.push_back(result.perturbation);
      iterations.push_back(static_cast<double>(result.steps_taken));
      queries.push_back(static_cast<double>(result.queries_used));
      if (result.perturbation.cwiseAbs().maxCoeff() > 0.0) {
        sparsities.push_back(perturbation_sparsity(result.perturbation));
      }
    }
    row.table = build_norm_table(perturbations, iterations, failures);
    if (!queries.empty()) {
      row.mean_queries = aggregate(queries).mean;
    }
    if (!sparsities.empty()) {
      row.sparsity_mean = aggregate(sparsities).mean;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

nlohmann::ordered_json stats_json(const Aggregate& agg) {
  return {{"mean", agg.mean}, {"median", agg.median}};
}

}  // namespace

nlohmann::ordered_json report_json(const SweepReport& report) {
  nlohmann::ordered_json config;
  config["alphas"] = report.settings.alphas;
  config["samples"] = report.settings.samples;
  config["max_steps"] = report.settings.base.max_steps;
  config["psi"] = report.settings.base.termination_threshold;
  config["seed"] = report.settings.master_seed.value;
  config["initial_delta"] = report.settings.base.initial_delta;
  config["initial_epsilon"] = report.settings.base.initial_epsilon;
  config["adaptation_window"] = report.settings.base.adaptation_window;
  config["adaptation_factor"] = report.settings.base.adaptation_factor;
  config["probe_interval"] = report.settings.base.probe_interval;
  config["max_init_attempts"] = report.settings.base.max_init_attempts;
  config["median_convention"] = "lower_middle";

  nlohmann::ordered_json per_alpha = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json entry;
    entry["alpha"] = row.alpha;
    entry["norms"] = {{"linf", stats_json(row.table.norms.linf)},
                      {"l1", stats_json(row.table.norms.l1)},
                      {"l2", stats_json(row.table.norms.l2)}};
    entry["mean_iterations"] = row.table.mean_iterations;
    entry["n_success"] = row.table.n_success;
    entry["n_fail"] = row.table.n_fail;
    entry["mean_queries"] = row.mean_queries;
    entry["sparsity_mean"] = row.sparsity_mean;
    per_alpha.push_back(std::move(entry));
  }
  return {{"config", std::move(config)}, {"per_alpha", std::move(per_alpha)}};
}

void write_report(const std::filesystem::path& path,
                  const SweepReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << report_json(report).dump(2) << '\n';
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace levy
