#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "levy/common.hpp"
#include "levy/data.hpp"

namespace levy {

enum class Activation : std::uint8_t { identity = 0, relu = 1 };

struct Layer {
  Eigen::MatrixXd weights;  // rows x cols
  Eigen::VectorXd biases;   // rows
  Activation activation = Activation::identity;
};

// Plain feed-forward stack. The final layer's row count is the class count.
struct MlpModel {
  std::vector<Layer> layers;

  int input_dim() const;
  int num_classes() const;
  void validate() const;
  Eigen::VectorXd scores(const DataPoint& x) const;
};

// Decision-only view of a classifier: callers get labels, never scores, and
// every call is counted. Parallel workers must each own a clone(); the
// counter is not synchronized.
class OracleHandle {
 public:
  OracleHandle(MlpModel model, Bounds input_bounds);

  Label predict(const DataPoint& x);
  std::uint64_t query_count() const { return queries_; }
  OracleHandle clone() const;

  int num_classes() const { return model_.num_classes(); }
  int input_dim() const { return model_.input_dim(); }
  const Bounds& input_bounds() const { return bounds_; }
  const MlpModel& model() const { return model_; }

 private:
  MlpModel model_;
  Bounds bounds_;
  std::uint64_t queries_ = 0;
};

// Bit-exact weight file: magic "LVYM", version u32 LE = 1, layer count u32 LE;
// per layer rows u32 LE, cols u32 LE, activation tag u8 (0 identity, 1 relu),
// rows*cols f64 LE row-major weights, rows f64 LE biases. No padding.
void save_model(const std::filesystem::path& path, const MlpModel& model);
OracleHandle load_model(const std::filesystem::path& path,
                        Bounds input_bounds = Bounds{0.0, 1.0});

struct TrainOptions {
  int epochs = 200;
  double learning_rate = 0.5;
  int hidden_units = 0;  // 0 trains plain multinomial logistic regression
};

struct TrainResult {
  OracleHandle oracle;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

TrainResult train_toy_classifier(const LabeledDataset& dataset,
                                 const TrainOptions& options, Rng& rng);
TrainResult train_toy_classifier(const LabeledDataset& dataset, int epochs,
                                 Rng& rng);

}  // namespace levy
