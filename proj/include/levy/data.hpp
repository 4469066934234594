#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "levy/common.hpp"

namespace levy {

/// In-memory dataset of (point, label) pairs with shared bounds.
/// rows/cols record the display shape for image data; 0 means "flat vector".
struct LabeledDataset {
  std::vector<DataPoint> points;
  std::vector<Label> labels;
  Bounds bounds;
  int num_classes = 0;
  int rows = 0;
  int cols = 0;

  std::size_t size() const { return points.size(); }
  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  void validate() const;
};

/// Raw contents of an IDX image file, pixel values kept as 0..255 reals.
struct IdxImages {
  std::int32_t count = 0;
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  std::vector<DataPoint> images;
};

/// Parses a big-endian IDX image file (magic 0x00000803, u8 payload).
IdxImages load_idx_images(const std::filesystem::path& path);

/// Parses a big-endian IDX label file (magic 0x00000801, u8 payload).
std::vector<Label> load_idx_labels(const std::filesystem::path& path);

void save_idx_images(const std::filesystem::path& path, const IdxImages& images);
void save_idx_labels(const std::filesystem::path& path, std::span<const Label> labels);

/// Joins images and labels into a dataset. scale01 divides pixels by 255
/// and sets bounds to [0, 1]; otherwise bounds stay [0, 255].
LabeledDataset assemble_dataset(const IdxImages& images,
                                const std::vector<Label>& labels,
                                bool scale01,
                                int num_classes = 10);

/// Gaussian blobs centered at the vertices of a coordinate-aligned scaled
/// simplex inside the unit box; separation is the pairwise center distance
/// in units of the per-coordinate noise sigma.
LabeledDataset make_synthetic_blobs(int num_classes, int dim, int points_per_class,
                                    double separation, Rng& rng);

}  // namespace levy
