#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "levy/attack.hpp"
#include "levy/data.hpp"
#include "levy/dump.hpp"
#include "levy/metrics.hpp"
#include "levy/oracle.hpp"
#include "levy/stable.hpp"
#include "levy/stats.hpp"
#include "levy/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::vector<double> alphas;
  int samples = 20;
  int max_steps = 5000;
  double psi = 1e-7;
  std::uint64_t seed = 0;
  std::string model_path;
  std::string images_path;
  std::string labels_path;
  bool synthetic = false;
  bool scale01 = false;
  std::string out_path;
  std::string dump_dir;

  int synthetic_dim = 50;
  int synthetic_classes = 2;
  int synthetic_per_class = 200;
  double synthetic_separation = 6.0;

  int epochs = 300;
  int hidden_units = 0;
  double learning_rate = 0.5;
  int sample_index = 0;
  long long validate_n = 100000;
};

void add_dataset_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--dataset-images", opt.images_path,
                  "IDX image file (big-endian, magic 0x803)");
  cmd->add_option("--dataset-labels", opt.labels_path,
                  "IDX label file (big-endian, magic 0x801)");
  cmd->add_flag("--synthetic", opt.synthetic,
                "use deterministic synthetic Gaussian blobs instead of files");
  cmd->add_flag("--scale-01", opt.scale01,
                "scale IDX pixels to [0, 1] (default keeps raw [0, 255])");
  cmd->add_option("--synthetic-dim", opt.synthetic_dim,
                  "synthetic blob dimensionality")
      ->capture_default_str();
  cmd->add_option("--synthetic-classes", opt.synthetic_classes,
                  "synthetic blob class count")
      ->capture_default_str();
  cmd->add_option("--synthetic-per-class", opt.synthetic_per_class,
                  "synthetic points per class")
      ->capture_default_str();
  cmd->add_option("--synthetic-separation", opt.synthetic_separation,
                  "blob center separation in noise-sigma units")
      ->capture_default_str();
}

void add_attack_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--alpha", opt.alphas,
                  "stability exponent in (0, 2]; repeatable");
  cmd->add_option("--max-steps", opt.max_steps, "random-walk query budget T")
      ->capture_default_str();
  cmd->add_option("--psi", opt.psi, "epsilon termination threshold")
      ->capture_default_str();
  cmd->add_option("--model", opt.model_path, "model weight file");
  cmd->add_option("--dump-dir", opt.dump_dir,
                  "directory for PGM/f64 adversarial dumps");
}

levy::LabeledDataset resolve_dataset(const CommonOptions& opt) {
  if (opt.synthetic) {
    levy::Rng rng(levy::derive_seed(opt.seed, 900001));
    return levy::make_synthetic_blobs(opt.synthetic_classes, opt.synthetic_dim,
                                      opt.synthetic_per_class,
                                      opt.synthetic_separation, rng);
  }
  if (opt.images_path.empty() || opt.labels_path.empty()) {
    throw levy::DomainError(
        "need --dataset-images and --dataset-labels, or --synthetic");
  }
  const auto images = levy::load_idx_images(opt.images_path);
  const auto labels = levy::load_idx_labels(opt.labels_path);
  return levy::assemble_dataset(images, labels, opt.scale01);
}

levy::OracleHandle resolve_oracle(const CommonOptions& opt,
                                  const levy::LabeledDataset& dataset) {
  if (!opt.model_path.empty()) {
    return levy::load_model(opt.model_path, dataset.bounds);
  }
  if (!opt.synthetic) {
    throw levy::DomainError("need --model when attacking a file dataset");
  }
  levy::TrainOptions train;
  train.epochs = opt.epochs;
  train.hidden_units = opt.hidden_units;
  train.learning_rate = opt.learning_rate;
  levy::Rng rng(levy::derive_seed(opt.seed, 900002));
  auto result = levy::train_toy_classifier(dataset, train, rng);
  std::fprintf(stderr, "trained in-process toy model: accuracy %.4f\n",
               result.train_accuracy);
  return std::move(result.oracle);
}

levy::AttackConfig base_config(const CommonOptions& opt) {
  levy::AttackConfig config;
  config.max_steps = opt.max_steps;
  config.termination_threshold = opt.psi;
  return config;
}

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", alpha);
  return buf;
}

void dump_result(const CommonOptions& opt, const levy::LabeledDataset& dataset,
                 double alpha, int sample_index,
                 const levy::AttackResult& result) {
  const int rows = dataset.rows > 0 ? dataset.rows : 1;
  const int cols = dataset.rows > 0 ? dataset.cols
                                    : static_cast<int>(dataset.dim());
  char stem[64];
  std::snprintf(stem, sizeof(stem), "alpha%s_sample%04d",
                alpha_tag(alpha).c_str(), sample_index);
  levy::dump_sample(opt.dump_dir, stem, dataset.points[sample_index],
                    result.adversarial, dataset.bounds, rows, cols);
}

int run_train(const CommonOptions& opt) {
  const auto dataset = resolve_dataset(opt);
  levy::TrainOptions train;
  train.epochs = opt.epochs;
  train.hidden_units = opt.hidden_units;
  train.learning_rate = opt.learning_rate;
  levy::Rng rng(levy::derive_seed(opt.seed, 900002));
  auto result = levy::train_toy_classifier(dataset, train, rng);
  std::printf("training accuracy %.4f, final loss %.6f\n",
              result.train_accuracy, result.final_loss);
  if (opt.out_path.empty()) {
    throw levy::DomainError("train needs --out for the model file");
  }
  levy::save_model(opt.out_path, result.oracle.model());
  std::printf("model written to %s\n", opt.out_path.c_str());
  return kExitOk;
}

int run_single_attack(const CommonOptions& opt) {
  if (opt.alphas.size() > 1) {
    throw levy::DomainError("attack takes a single --alpha; use sweep for lists");
  }
  const auto dataset = resolve_dataset(opt);
  auto oracle = resolve_oracle(opt, dataset);
  if (opt.sample_index < 0 ||
      opt.sample_index >= static_cast<int>(dataset.size())) {
    throw levy::DomainError("sample index out of range");
  }
  levy::AttackConfig config = base_config(opt);
  config.alpha = opt.alphas.empty() ? 2.0 : opt.alphas.front();
  config.seed = levy::derive_seed(opt.seed, opt.sample_index);
  config.validate();

  const auto& x = dataset.points[opt.sample_index];
  const auto y = dataset.labels[opt.sample_index];
  const auto result = levy::run_attack(oracle, x, y, config);

  std::printf("terminated_by %s after %d steps, %llu queries\n",
              levy::termination_name(result.terminated_by), result.steps_taken,
              static_cast<unsigned long long>(result.queries_used));
  if (result.succeeded()) {
    std::printf("final label %d (source %d)\n", result.final_label.class_index,
                y.class_index);
    std::printf("perturbation norms: linf %.6g  l1 %.6g  l2 %.6g\n",
                levy::lp_norm(result.perturbation, levy::NormKind::linf),
                levy::lp_norm(result.perturbation, levy::NormKind::l1),
                levy::lp_norm(result.perturbation, levy::NormKind::l2));
  }

  if (!opt.out_path.empty()) {
    nlohmann::ordered_json doc;
    doc["alpha"] = config.alpha;
    doc["sample_index"] = opt.sample_index;
    doc["terminated_by"] = levy::termination_name(result.terminated_by);
    doc["steps_taken"] = result.steps_taken;
    doc["queries_used"] = result.queries_used;
    doc["final_label"] = result.final_label.class_index;
    doc["norms"] = {
        {"linf", levy::lp_norm(result.perturbation, levy::NormKind::linf)},
        {"l1", levy::lp_norm(result.perturbation, levy::NormKind::l1)},
        {"l2", levy::lp_norm(result.perturbation, levy::NormKind::l2)}};
    auto trace = nlohmann::ordered_json::array();
    for (const auto& point : result.distance_trace) {
      trace.push_back({{"step", point.step}, {"distance", point.distance}});
    }
    doc["distance_trace"] = std::move(trace);
    std::ofstream out(opt.out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw levy::IoError("cannot write " + opt.out_path);
    }
    out << doc.dump(2) << '\n';
  }
  if (!opt.dump_dir.empty() && result.succeeded()) {
    dump_result(opt, dataset, config.alpha, opt.sample_index, result);
  }
  return result.succeeded() ? kExitOk : kExitRuntime;
}

int run_sweep_cmd(const CommonOptions& opt) {
  const auto dataset = resolve_dataset(opt);
  const auto oracle = resolve_oracle(opt, dataset);

  levy::SweepSettings settings;
  settings.alphas =
      opt.alphas.empty() ? std::vector<double>{2.0, 1.5, 1.0, 0.5} : opt.alphas;
  settings.samples = opt.samples;
  settings.base = base_config(opt);
  settings.master_seed = opt.seed;
  settings.worker_threads = 0;

  const auto report = levy::run_sweep(oracle, dataset, settings);
  const std::string out_path =
      opt.out_path.empty() ? "report.json" : opt.out_path;
  levy::write_report(out_path, report);
  std::printf("report written to %s\n", out_path.c_str());
  for (const auto& row : report.rows) {
    std::printf(
        "alpha %-4g  success %d/%d  mean iters %.1f  L1 median %.4g  "
        "L2 median %.4g\n",
        row.alpha, row.table.n_success, row.table.n_success + row.table.n_fail,
        row.table.mean_iterations, row.table.norms.l1.median,
        row.table.norms.l2.median);
  }

  if (!opt.dump_dir.empty()) {
    for (std::size_t a = 0; a < report.results.size(); ++a) {
      for (std::size_t i = 0; i < report.results[a].size(); ++i) {
        const auto& result = report.results[a][i];
        if (result.succeeded()) {
          dump_result(opt, dataset, settings.alphas[a], static_cast<int>(i),
                      result);
        }
      }
    }
  }
  return kExitOk;
}

int run_validate_sampler(const CommonOptions& opt) {
  if (opt.validate_n < 1000) {
    throw levy::DomainError("validate-sampler needs --n >= 1000");
  }
  const std::vector<double> alphas =
      opt.alphas.empty() ? std::vector<double>{0.5, 1.0, 1.5, 2.0} : opt.alphas;
  const std::vector<double> cf_points = {0.5, 1.0, 2.0};
  const auto n = static_cast<std::size_t>(opt.validate_n);

  bool all_pass = true;
  auto check = [&](bool ok) {
    all_pass = all_pass && ok;
    return ok ? "PASS" : "FAIL";
  };

  for (std::size_t k = 0; k < alphas.size(); ++k) {
    levy::StableParams params;
    params.alpha = alphas[k];
    levy::Rng rng(levy::derive_seed(opt.seed, k));
    std::vector<double> samples(n);
    for (auto& s : samples) {
      s = levy::sample_scalar(params, rng);
    }

    double worst = 0.0;
    for (double s : cf_points) {
      const auto ecf = levy::empirical_cf(samples, s);
      const auto cf = levy::analytic_cf(params, s);
      worst = std::max(worst, std::abs(ecf - cf));
    }
    std::printf("alpha %-4g  max CF residual %.5f (limit 0.02) %s\n",
                params.alpha, worst, check(worst < 0.02));

    if (params.alpha == 2.0) {
      const double ks = levy::ks_distance(samples, [](double x) {
        return levy::normal_cdf(x, 0.0, std::sqrt(2.0));
      });
      std::printf("alpha 2.0   KS vs Gaussian(0, sqrt(2)) %.5f (limit 0.01) %s\n",
                  ks, check(ks < 0.01));
    }
    if (params.alpha == 1.0) {
      const double q25 = levy::quantile(samples, 0.25);
      const double q75 = levy::quantile(samples, 0.75);
      const bool ok = std::abs(q25 + 1.0) <= 0.05 && std::abs(q75 - 1.0) <= 0.05;
      std::printf(
          "alpha 1.0   quartiles %.4f / %.4f (targets -1/+1, tol 0.05) %s\n",
          q25, q75, check(ok));
    }
  }
  std::printf("sampler validation: %s\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy-Attack: decision-based adversarial attack driven by "
               "alpha-stable random walks"};
  app.require_subcommand(1);

  CommonOptions opt;

  auto* train = app.add_subcommand("train", "fit a toy classifier and save it");
  add_dataset_flags(train, opt);
  train->add_option("--epochs", opt.epochs, "gradient-descent epochs")
      ->capture_default_str();
  train->add_option("--hidden-units", opt.hidden_units,
                    "hidden layer width (0 = logistic regression)")
      ->capture_default_str();
  train->add_option("--learning-rate", opt.learning_rate,
                    "gradient-descent step size")
      ->capture_default_str();
  train->add_option("--seed", opt.seed, "rng seed")->capture_default_str();
  train->add_option("--out", opt.out_path, "output model path")->required();

  auto* attack = app.add_subcommand("attack", "attack one dataset sample");
  add_dataset_flags(attack, opt);
  add_attack_flags(attack, opt);
  attack->add_option("--sample-index", opt.sample_index, "dataset row to attack")
      ->capture_default_str();
  attack->add_option("--seed", opt.seed, "rng seed")->capture_default_str();
  attack->add_option("--out", opt.out_path, "JSON result path");
  attack->add_option("--epochs", opt.epochs, "epochs for in-process training")
      ->capture_default_str();
  attack->add_option("--hidden-units", opt.hidden_units,
                     "hidden width for in-process training")
      ->capture_default_str();
  attack->add_option("--learning-rate", opt.learning_rate,
                     "step size for in-process training")
      ->capture_default_str();

  auto* sweep = app.add_subcommand(
      "sweep", "attack N samples per alpha and write a JSON report");
  add_dataset_flags(sweep, opt);
  add_attack_flags(sweep, opt);
  sweep->add_option("--samples", opt.samples, "samples per alpha")
      ->capture_default_str();
  sweep->add_option("--seed", opt.seed, "master seed")->capture_default_str();
  sweep->add_option("--out", opt.out_path, "report path (default report.json)");
  sweep->add_option("--epochs", opt.epochs, "epochs for in-process training")
      ->capture_default_str();
  sweep->add_option("--hidden-units", opt.hidden_units,
                    "hidden width for in-process training")
      ->capture_default_str();
  sweep->add_option("--learning-rate", opt.learning_rate,
                    "step size for in-process training")
      ->capture_default_str();

  auto* validate = app.add_subcommand(
      "validate-sampler", "run the stable-sampler diagnostic suite");
  validate->add_option("--alpha", opt.alphas, "alphas to check; repeatable");
  validate->add_option("--n", opt.validate_n, "samples per alpha (min 1000)")
      ->capture_default_str();
  validate->add_option("--seed", opt.seed, "rng seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(train)) return run_train(opt);
    if (app.got_subcommand(attack)) return run_single_attack(opt);
    if (app.got_subcommand(sweep)) return run_sweep_cmd(opt);
    if (app.got_subcommand(validate)) return run_validate_sampler(opt);
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitUsage;
  } catch (const levy::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const levy::FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitUsage;
  } catch (const levy::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return kExitRuntime;
  }
}
