#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"

#include "levy/data.hpp"
#include "levy/oracle.hpp"

namespace {

namespace fs = std::filesystem;

levy::MlpModel identity_model() {
  levy::Layer layer;
  layer.weights = Eigen::MatrixXd::Identity(2, 2);
  layer.biases = Eigen::VectorXd::Zero(2);
  return levy::MlpModel{{layer}};
}

levy::MlpModel two_layer_model() {
  levy::Layer l1;
  l1.weights.resize(2, 2);
  l1.weights << 1.0, -1.0, 0.5, 2.0;
  l1.biases.resize(2);
  l1.biases << -0.5, 1.0;
  l1.activation = levy::Activation::relu;

  levy::Layer l2;
  l2.weights.resize(3, 2);
  l2.weights << 1.0, 0.0, -1.0, 1.0, 0.2, 0.3;
  l2.biases.resize(3);
  l2.biases << 0.0, 0.1, -0.2;
  return levy::MlpModel{{l1, l2}};
}

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("argmax prediction with lowest-index tie break") {
  levy::OracleHandle oracle(identity_model(), levy::Bounds{-10.0, 10.0});
  levy::DataPoint x(2);
  x << 3.0, 1.0;
  CHECK(oracle.predict(x) == levy::Label{0});
  x << 1.0, 1.0;
  CHECK(oracle.predict(x) == levy::Label{0});
  x << 1.0, 2.0;
  CHECK(oracle.predict(x) == levy::Label{1});
}

TEST_CASE("two-layer relu network matches a hand-computed forward pass") {
  // x = (1, 2): hidden pre-activation (-1.5, 5.5) -> relu (0, 5.5),
  // output scores (0, 5.6, 1.45), argmax class 1.
  levy::OracleHandle oracle(two_layer_model(), levy::Bounds{-10.0, 10.0});
  levy::DataPoint x(2);
  x << 1.0, 2.0;
  const auto scores = oracle.model().scores(x);
  CHECK(scores[0] == doctest::Approx(0.0));
  CHECK(scores[1] == doctest::Approx(5.6));
  CHECK(scores[2] == doctest::Approx(1.45));
  CHECK(oracle.predict(x) == levy::Label{1});
}

TEST_CASE("forward pass agrees with a brute-force reimplementation") {
  levy::Rng rng(17);
  levy::MlpModel model;
  levy::Layer l1;
  l1.weights.resize(5, 4);
  l1.biases.resize(5);
  l1.activation = levy::Activation::relu;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 4; ++c) l1.weights(r, c) = rng.gaussian();
    l1.biases[r] = rng.gaussian();
  }
  levy::Layer l2;
  l2.weights.resize(3, 5);
  l2.biases.resize(3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) l2.weights(r, c) = rng.gaussian();
    l2.biases[r] = rng.gaussian();
  }
  model.layers = {l1, l2};

  for (int trial = 0; trial < 50; ++trial) {
    levy::DataPoint x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.gaussian();

    std::vector<double> hidden(5);
    for (int r = 0; r < 5; ++r) {
      double acc = l1.biases[r];
      for (int c = 0; c < 4; ++c) acc += l1.weights(r, c) * x[c];
      hidden[r] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> out(3);
    for (int r = 0; r < 3; ++r) {
      double acc = l2.biases[r];
      for (int c = 0; c < 5; ++c) acc += l2.weights(r, c) * hidden[c];
      out[r] = acc;
    }
    const auto scores = model.scores(x);
    for (int r = 0; r < 3; ++r) {
      CHECK(scores[r] == doctest::Approx(out[r]).epsilon(1e-12));
    }
  }
}

TEST_CASE("query counter advances exactly once per predict") {
  levy::OracleHandle oracle(identity_model(), levy::Bounds{-10.0, 10.0});
  levy::DataPoint x(2);
  x << 0.5, -0.25;
  const auto first = oracle.predict(x);
  for (int k = 0; k < 999; ++k) {
    CHECK(oracle.predict(x) == first);
  }
  CHECK(oracle.query_count() == 1000);

  auto clone = oracle.clone();
  CHECK(clone.query_count() == 0);
  CHECK(clone.predict(x) == first);
  CHECK(clone.query_count() == 1);
  CHECK(oracle.query_count() == 1000);
}

TEST_CASE("predict validates dimensions and bounds") {
  levy::OracleHandle oracle(identity_model(), levy::Bounds{0.0, 1.0});
  levy::DataPoint wrong(3);
  wrong << 0.1, 0.2, 0.3;
  CHECK_THROWS_AS(oracle.predict(wrong), levy::DomainError);
  levy::DataPoint outside(2);
  outside << 0.5, 1.5;
  CHECK_THROWS_AS(oracle.predict(outside), levy::DomainError);
  CHECK(oracle.query_count() == 0);
}

TEST_CASE("model file round trip") {
  const auto path = temp_file("levy_test_identity.model");
  save_model(path, identity_model());
  auto oracle = levy::load_model(path, levy::Bounds{-10.0, 10.0});
  CHECK(oracle.query_count() == 0);
  CHECK(oracle.input_dim() == 2);
  CHECK(oracle.num_classes() == 2);
  levy::DataPoint x(2);
  x << 2.0, 1.0;
  CHECK(oracle.predict(x) == levy::Label{0});

  SUBCASE("reloaded model predicts identically on random probes") {
    const auto path2 = temp_file("levy_test_twolayer.model");
    save_model(path2, two_layer_model());
    levy::OracleHandle original(two_layer_model(), levy::Bounds{-10.0, 10.0});
    auto reloaded = levy::load_model(path2, levy::Bounds{-10.0, 10.0});
    levy::Rng rng(5);
    for (int k = 0; k < 100; ++k) {
      levy::DataPoint probe(2);
      probe << rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0);
      CHECK(original.predict(probe) == reloaded.predict(probe));
    }
    fs::remove(path2);
  }
  fs::remove(path);
}

TEST_CASE("model loader reports malformed files distinctly") {
  const auto path = temp_file("levy_test_bad.model");

  SUBCASE("missing file") {
    CHECK_THROWS_AS(levy::load_model(temp_file("levy_no_such.model")),
                    levy::IoError);
  }
  SUBCASE("bad magic") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "NOPE";
    out.close();
    CHECK_THROWS_WITH_AS(levy::load_model(path),
                         doctest::Contains("magic"), levy::FormatError);
  }
  SUBCASE("truncated header") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "LVYM";
    const std::uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.close();
    CHECK_THROWS_AS(levy::load_model(path), levy::FormatError);
  }
  SUBCASE("truncated payload") {
    save_model(path, identity_model());
    fs::resize_file(path, fs::file_size(path) - 9);
    CHECK_THROWS_AS(levy::load_model(path), levy::FormatError);
  }
  SUBCASE("trailing bytes") {
    save_model(path, identity_model());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << "x";
    out.close();
    CHECK_THROWS_WITH_AS(levy::load_model(path),
                         doctest::Contains("trailing"), levy::FormatError);
  }
  SUBCASE("dimension chain mismatch") {
    // Two layers whose shapes do not chain: 2x2 followed by 3x4.
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "LVYM";
    const std::uint32_t version = 1, layers = 2;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&layers), 4);
    auto write_layer = [&out](std::uint32_t rows, std::uint32_t cols) {
      out.write(reinterpret_cast<const char*>(&rows), 4);
      out.write(reinterpret_cast<const char*>(&cols), 4);
      const std::uint8_t tag = 0;
      out.write(reinterpret_cast<const char*>(&tag), 1);
      const double zero = 0.0;
      for (std::uint32_t k = 0; k < rows * cols + rows; ++k) {
        out.write(reinterpret_cast<const char*>(&zero), 8);
      }
    };
    write_layer(2, 2);
    write_layer(3, 4);
    out.close();
    CHECK_THROWS_WITH_AS(levy::load_model(path),
                         doctest::Contains("chain"), levy::DomainError);
  }
  SUBCASE("unknown activation tag") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "LVYM";
    const std::uint32_t version = 1, layers = 1, rows = 1, cols = 1;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&layers), 4);
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    const std::uint8_t tag = 7;
    out.write(reinterpret_cast<const char*>(&tag), 1);
    const double zero = 0.0;
    out.write(reinterpret_cast<const char*>(&zero), 8);
    out.write(reinterpret_cast<const char*>(&zero), 8);
    out.close();
    CHECK_THROWS_WITH_AS(levy::load_model(path),
                         doctest::Contains("activation"), levy::FormatError);
  }
  fs::remove(path);
}

TEST_CASE("toy training separates well-separated blobs") {
  levy::Rng data_rng(99);
  const auto dataset = levy::make_synthetic_blobs(2, 2, 500, 6.0, data_rng);

  levy::Rng rng(1);
  const auto result = levy::train_toy_classifier(dataset, 300, rng);
  CHECK(result.train_accuracy >= 0.99);

  SUBCASE("training is deterministic: identical weight files") {
    levy::Rng rng_a(1);
    levy::Rng rng_b(1);
    const auto a = levy::train_toy_classifier(dataset, 100, rng_a);
    const auto b = levy::train_toy_classifier(dataset, 100, rng_b);
    const auto path_a = temp_file("levy_train_a.model");
    const auto path_b = temp_file("levy_train_b.model");
    save_model(path_a, a.oracle.model());
    save_model(path_b, b.oracle.model());
    std::ifstream fa(path_a, std::ios::binary);
    std::ifstream fb(path_b, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
    CHECK(bytes_a == bytes_b);
    CHECK(!bytes_a.empty());
    fs::remove(path_a);
    fs::remove(path_b);
  }

  SUBCASE("hidden-layer variant also separates the blobs") {
    levy::TrainOptions options;
    options.epochs = 300;
    options.hidden_units = 8;
    levy::Rng rng_h(2);
    const auto hidden = levy::train_toy_classifier(dataset, options, rng_h);
    CHECK(hidden.train_accuracy >= 0.99);
  }
}

TEST_CASE("training rejects degenerate datasets") {
  levy::LabeledDataset empty;
  empty.num_classes = 2;
  levy::Rng rng(1);
  CHECK_THROWS_AS(levy::train_toy_classifier(empty, 10, rng),
                  levy::DomainError);

  levy::LabeledDataset single;
  single.num_classes = 2;
  single.bounds = levy::Bounds{0.0, 1.0};
  for (int k = 0; k < 10; ++k) {
    single.points.push_back(levy::DataPoint::Constant(2, 0.5));
    single.labels.push_back(levy::Label{1});
  }
  CHECK_THROWS_WITH_AS(levy::train_toy_classifier(single, 10, rng),
                       doctest::Contains("degenerate"), levy::DomainError);
}
