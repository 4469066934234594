#include "levy/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

namespace levy {

namespace {

constexpr char kMagic[4] = {'L', 'V', 'Y', 'M'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

template <typename T>
T read_raw(std::ifstream& in, std::uint64_t offset, const char* field) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (in.gcount() != sizeof(T)) {
    throw FormatError(std::string("truncated model file while reading ") + field,
                      offset);
  }
  return value;
}

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

int MlpModel::input_dim() const {
  if (layers.empty()) {
    throw DomainError("model has no layers");
  }
  return static_cast<int>(layers.front().weights.cols());
}

int MlpModel::num_classes() const {
  if (layers.empty()) {
    throw DomainError("model has no layers");
  }
  return static_cast<int>(layers.back().weights.rows());
}

void MlpModel::validate() const {
  if (layers.empty()) {
    throw DomainError("model has no layers");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (layer.weights.rows() < 1 || layer.weights.cols() < 1) {
      throw DomainError("layer " + std::to_string(i) + " has empty weight matrix");
    }
    if (layer.biases.size() != layer.weights.rows()) {
      throw DomainError("layer " + std::to_string(i) + " bias length " +
                        std::to_string(layer.biases.size()) + " != rows " +
                        std::to_string(layer.weights.rows()));
    }
    if (i > 0 && layers[i - 1].weights.rows() != layer.weights.cols()) {
      throw DomainError("layer dimension chain mismatch between layer " +
                        std::to_string(i - 1) + " (rows " +
                        std::to_string(layers[i - 1].weights.rows()) +
                        ") and layer " + std::to_string(i) + " (cols " +
                        std::to_string(layer.weights.cols()) + ")");
    }
  }
}

Eigen::VectorXd MlpModel::scores(const DataPoint& x) const {
  Eigen::VectorXd h = x;
  for (const auto& layer : layers) {
    h = layer.weights * h + layer.biases;
    if (layer.activation == Activation::relu) {
      h = h.cwiseMax(0.0);
    }
  }
  return h;
}

OracleHandle::OracleHandle(MlpModel model, Bounds input_bounds)
    : model_(std::move(model)), bounds_(input_bounds) {
  model_.validate();
  if (!(bounds_.low < bounds_.high)) {
    throw DomainError("oracle bounds must satisfy low < high");
  }
}

Label OracleHandle::predict(const DataPoint& x) {
  if (x.size() != input_dim()) {
    throw DomainError("predict input dimension " + std::to_string(x.size()) +
                      " != oracle input_dim " + std::to_string(input_dim()));
  }
  if ((x.array() < bounds_.low).any() || (x.array() > bounds_.high).any()) {
    throw DomainError("predict input outside oracle bounds");
  }
  ++queries_;
  const Eigen::VectorXd s = model_.scores(x);
  // Lowest index wins ties, which Eigen's maxCoeff visitor already guarantees,
  // but spell it out so the tie-break rule does not hinge on that detail.
  int best = 0;
  for (int i = 1; i < s.size(); ++i) {
    if (s[i] > s[best]) best = i;
  }
  return Label{best};
}

OracleHandle OracleHandle::clone() const { return OracleHandle(model_, bounds_); }

void save_model(const std::filesystem::path& path, const MlpModel& model) {
  model.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  write_raw(out, static_cast<std::uint32_t>(model.layers.size()));
  for (const auto& layer : model.layers) {
    write_raw(out, static_cast<std::uint32_t>(layer.weights.rows()));
    write_raw(out, static_cast<std::uint32_t>(layer.weights.cols()));
    write_raw(out, static_cast<std::uint8_t>(layer.activation));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        write_raw(out, layer.weights(r, c));
      }
    }
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) {
      write_raw(out, layer.biases[r]);
    }
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

OracleHandle load_model(const std::filesystem::path& path, Bounds input_bounds) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open model file " + path.string());
  }
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("bad model magic, expected \"LVYM\"", 0);
  }
  const auto version = read_raw<std::uint32_t>(in, 4, "version");
  if (version != kVersion) {
    throw FormatError("unsupported model version " + std::to_string(version), 4);
  }
  const auto layer_count = read_raw<std::uint32_t>(in, 8, "layer count");
  if (layer_count == 0) {
    throw FormatError("model declares zero layers", 8);
  }

  MlpModel model;
  std::uint64_t offset = 12;
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    Layer layer;
    const auto rows = read_raw<std::uint32_t>(in, offset, "layer rows");
    const auto cols = read_raw<std::uint32_t>(in, offset + 4, "layer cols");
    const auto tag = read_raw<std::uint8_t>(in, offset + 8, "activation tag");
    offset += 9;
    if (tag > 1) {
      throw FormatError("unknown activation tag " + std::to_string(tag),
                        offset - 1);
    }
    layer.activation = static_cast<Activation>(tag);
    layer.weights.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        layer.weights(r, c) = read_raw<double>(in, offset, "weights");
        offset += 8;
      }
    }
    layer.biases.resize(rows);
    for (std::uint32_t r = 0; r < rows; ++r) {
      layer.biases[r] = read_raw<double>(in, offset, "biases");
      offset += 8;
    }
    model.layers.push_back(std::move(layer));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after final layer", offset);
  }
  return OracleHandle(std::move(model), input_bounds);
}

namespace {

void check_trainable(const LabeledDataset& dataset) {
  if (dataset.points.empty()) {
    throw DomainError("cannot train on an empty dataset");
  }
  dataset.validate();
  std::set<int> seen;
  for (const auto& label : dataset.labels) {
    seen.insert(label.class_index);
  }
  if (seen.size() < 2) {
    throw DomainError("degenerate labels: dataset contains a single class");
  }
  for (const auto& p : dataset.points) {
    if (!p.allFinite()) {
      throw DomainError("dataset contains non-finite features");
    }
  }
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const Eigen::VectorXd shifted = z.array() - z.maxCoeff();
  Eigen::VectorXd e = shifted.array().exp();
  return e / e.sum();
}

}  // namespace

TrainResult train_toy_classifier(const LabeledDataset& dataset,
                                 const TrainOptions& options, Rng& rng) {
  check_trainable(dataset);
  if (options.epochs < 1) {
    throw DomainError("epochs must be >= 1");
  }
  if (!(options.learning_rate > 0.0)) {
    throw DomainError("learning_rate must be > 0");
  }
  const int n = static_cast<int>(dataset.size());
  const int dim = static_cast<int>(dataset.dim());
  const int classes = dataset.num_classes;

  MlpModel model;
  if (options.hidden_units > 0) {
    Layer hidden;
    hidden.weights.resize(options.hidden_units, dim);
    // Slightly positive biases keep relu units alive on all-positive inputs.
    hidden.biases = Eigen::VectorXd::Constant(options.hidden_units, 0.1);
    hidden.activation = Activation::relu;
    for (Eigen::Index r = 0; r < hidden.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < hidden.weights.cols(); ++c) {
        hidden.weights(r, c) = 0.1 * rng.gaussian();
      }
    }
    model.layers.push_back(std::move(hidden));
    Layer out;
    out.weights.resize(classes, options.hidden_units);
    out.biases = Eigen::VectorXd::Zero(classes);
    for (Eigen::Index r = 0; r < out.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.weights.cols(); ++c) {
        out.weights(r, c) = 0.1 * rng.gaussian();
      }
    }
    model.layers.push_back(std::move(out));
  } else {
    Layer out;
    out.weights = Eigen::MatrixXd::Zero(classes, dim);
    out.biases = Eigen::VectorXd::Zero(classes);
    model.layers.push_back(std::move(out));
  }

  // Full-batch descent can step a relu net into a dead region late in the
  // run; keep the best weights seen so the returned model never regresses.
  double loss = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();
  MlpModel best_model;
  auto remember_if_best = [&](double candidate_loss) {
    if (candidate_loss < best_loss) {
      best_loss = candidate_loss;
      best_model = model;
    }
  };
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    loss = 0.0;
    if (model.layers.size() == 1) {
      Eigen::MatrixXd grad_w = Eigen::MatrixXd::Zero(classes, dim);
      Eigen::VectorXd grad_b = Eigen::VectorXd::Zero(classes);
      for (int i = 0; i < n; ++i) {
        const auto& x = dataset.points[i];
        const int y = dataset.labels[i].class_index;
        const Eigen::VectorXd p =
            softmax(model.layers[0].weights * x + model.layers[0].biases);
        loss -= std::log(std::max(p[y], 1e-300));
        Eigen::VectorXd delta = p;
        delta[y] -= 1.0;
        grad_w.noalias() += delta * x.transpose();
        grad_b += delta;
      }
      loss /= n;
      remember_if_best(loss);
      model.layers[0].weights -= (options.learning_rate / n) * grad_w;
      model.layers[0].biases -= (options.learning_rate / n) * grad_b;
    } else {
      auto& l1 = model.layers[0];
      auto& l2 = model.layers[1];
      Eigen::MatrixXd g_w1 = Eigen::MatrixXd::Zero(l1.weights.rows(), l1.weights.cols());
      Eigen::VectorXd g_b1 = Eigen::VectorXd::Zero(l1.biases.size());
      Eigen::MatrixXd g_w2 = Eigen::MatrixXd::Zero(l2.weights.rows(), l2.weights.cols());
      Eigen::VectorXd g_b2 = Eigen::VectorXd::Zero(l2.biases.size());
      for (int i = 0; i < n; ++i) {
        const auto& x = dataset.points[i];
        const int y = dataset.labels[i].class_index;
        const Eigen::VectorXd pre = l1.weights * x + l1.biases;
        const Eigen::VectorXd h = pre.cwiseMax(0.0);
        const Eigen::VectorXd p = softmax(l2.weights * h + l2.biases);
        loss -= std::log(std::max(p[y], 1e-300));
        Eigen::VectorXd delta2 = p;
        delta2[y] -= 1.0;
        g_w2.noalias() += delta2 * h.transpose();
        g_b2 += delta2;
        Eigen::VectorXd delta1 = l2.weights.transpose() * delta2;
        for (Eigen::Index j = 0; j < delta1.size(); ++j) {
          if (pre[j] <= 0.0) delta1[j] = 0.0;
        }
        g_w1.noalias() += delta1 * x.transpose();
        g_b1 += delta1;
      }
      loss /= n;
      remember_if_best(loss);
      l1.weights -= (options.learning_rate / n) * g_w1;
      l1.biases -= (options.learning_rate / n) * g_b1;
      l2.weights -= (options.learning_rate / n) * g_w2;
      l2.biases -= (options.learning_rate / n) * g_b2;
    }
  }

  // The last update never had its loss evaluated; give it the same chance.
  {
    double final_loss = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd p = softmax(model.scores(dataset.points[i]));
      final_loss -= std::log(std::max(p[dataset.labels[i].class_index], 1e-300));
    }
    remember_if_best(final_loss / n);
  }
  model = std::move(best_model);
  loss = best_loss;

  int correct = 0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd s = model.scores(dataset.points[i]);
    int best = 0;
    for (int c = 1; c < s.size(); ++c) {
      if (s[c] > s[best]) best = c;
    }
    if (best == dataset.labels[i].class_index) ++correct;
  }

  TrainResult result{OracleHandle(std::move(model), dataset.bounds),
                     static_cast<double>(correct) / n, loss};
  return result;
}

TrainResult train_toy_classifier(const LabeledDataset& dataset, int epochs,
                                 Rng& rng) {
  TrainOptions options;
  options.epochs = epochs;
  return train_toy_classifier(dataset, options, rng);
}

}  // namespace levy
