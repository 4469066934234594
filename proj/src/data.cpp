#include "levy/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace levy {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be_u32(std::ifstream& in, std::uint64_t offset, const char* field) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (in.gcount() != 4) {
    throw FormatError(std::string("truncated IDX header while reading ") + field, offset);
  }
  return (static_cast<std::uint32_t>(buf[0]) << 24) |
         (static_cast<std::uint32_t>(buf[1]) << 16) |
         (static_cast<std::uint32_t>(buf[2]) << 8) |
         static_cast<std::uint32_t>(buf[3]);
}

void write_be_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<char*>(buf), 4);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return in;
}

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 0xf]; }

std::string hex_u32(std::uint32_t v) {
  std::string s = "0x";
  for (int shift = 28; shift >= 0; shift -= 4) s += hex_digit(v >> shift);
  return s;
}

}  // namespace

void LabeledDataset::validate() const {
  if (points.size() != labels.size()) {
    throw DomainError("dataset points/labels length mismatch: " +
                      std::to_string(points.size()) + " vs " +
                      std::to_string(labels.size()));
  }
  for (const auto& label : labels) {
    if (label.class_index < 0 || label.class_index >= num_classes) {
      throw DomainError("dataset label " + std::to_string(label.class_index) +
                        " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
  for (const auto& p : points) {
    if ((p.array() < bounds.low).any() || (p.array() > bounds.high).any()) {
      throw DomainError("dataset point outside declared bounds");
    }
  }
}

IdxImages load_idx_images(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::uint32_t magic = read_be_u32(in, 0, "magic");
  if (magic != kImageMagic) {
    throw FormatError("bad IDX image magic " + hex_u32(magic) + ", expected " +
                          hex_u32(kImageMagic),
                      0);
  }
  IdxImages out;
  out.count = static_cast<std::int32_t>(read_be_u32(in, 4, "count"));
  out.rows = static_cast<std::int32_t>(read_be_u32(in, 8, "rows"));
  out.cols = static_cast<std::int32_t>(read_be_u32(in, 12, "cols"));
  const std::int64_t pixels_per_image =
      static_cast<std::int64_t>(out.rows) * out.cols;
  out.images.reserve(static_cast<std::size_t>(out.count));
  std::vector<unsigned char> buf(static_cast<std::size_t>(pixels_per_image));
  for (std::int32_t i = 0; i < out.count; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), pixels_per_image);
    if (in.gcount() != pixels_per_image) {
      throw FormatError(
          "truncated IDX image payload, image " + std::to_string(i) + " of " +
              std::to_string(out.count),
          16 + static_cast<std::uint64_t>(i) * pixels_per_image + in.gcount());
    }
    DataPoint img(pixels_per_image);
    for (std::int64_t j = 0; j < pixels_per_image; ++j) {
      img[j] = static_cast<double>(buf[static_cast<std::size_t>(j)]);
    }
    out.images.push_back(std::move(img));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after IDX image payload",
                      16 + static_cast<std::uint64_t>(out.count) * pixels_per_image);
  }
  return out;
}

std::vector<Label> load_idx_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::uint32_t magic = read_be_u32(in, 0, "magic");
  if (magic != kLabelMagic) {
    throw FormatError("bad IDX label magic " + hex_u32(magic) + ", expected " +
                          hex_u32(kLabelMagic),
                      0);
  }
  const auto count = read_be_u32(in, 4, "count");
  std::vector<unsigned char> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()), count);
  if (in.gcount() != static_cast<std::streamsize>(count)) {
    throw FormatError("truncated IDX label payload",
                      8 + static_cast<std::uint64_t>(in.gcount()));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after IDX label payload",
                      8 + static_cast<std::uint64_t>(count));
  }
  std::vector<Label> labels(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    labels[i] = Label{static_cast<std::int32_t>(buf[i])};
  }
  return labels;
}

void save_idx_images(const std::filesystem::path& path, const IdxImages& images) {
  if (images.count != static_cast<std::int32_t>(images.images.size())) {
    throw DomainError("IdxImages count does not match image list");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  write_be_u32(out, kImageMagic);
  write_be_u32(out, static_cast<std::uint32_t>(images.count));
  write_be_u32(out, static_cast<std::uint32_t>(images.rows));
  write_be_u32(out, static_cast<std::uint32_t>(images.cols));
  const std::int64_t pixels = static_cast<std::int64_t>(images.rows) * images.cols;
  for (const auto& img : images.images) {
    if (img.size() != pixels) {
      throw DomainError("image size does not match rows*cols");
    }
    for (std::int64_t j = 0; j < pixels; ++j) {
      const double v = img[j];
      if (!(v >= 0.0) || !(v <= 255.0)) {
        throw DomainError("pixel value " + std::to_string(v) + " outside [0, 255]");
      }
      const auto byte = static_cast<unsigned char>(std::lround(v));
      out.write(reinterpret_cast<const char*>(&byte), 1);
    }
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

void save_idx_labels(const std::filesystem::path& path, std::span<const Label> labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  write_be_u32(out, kLabelMagic);
  write_be_u32(out, static_cast<std::uint32_t>(labels.size()));
  for (const auto& label : labels) {
    if (label.class_index < 0 || label.class_index > 255) {
      throw DomainError("label " + std::to_string(label.class_index) +
                        " not representable as a byte");
    }
    const auto byte = static_cast<unsigned char>(label.class_index);
    out.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

LabeledDataset assemble_dataset(const IdxImages& images,
                                const std::vector<Label>& labels,
                                bool scale01,
                                int num_classes) {
  if (static_cast<std::size_t>(images.count) != labels.size()) {
    throw DomainError("image/label count mismatch: " + std::to_string(images.count) +
                      " images vs " + std::to_string(labels.size()) + " labels");
  }
  LabeledDataset ds;
  ds.num_classes = num_classes;
  ds.rows = images.rows;
  ds.cols = images.cols;
  ds.bounds = scale01 ? Bounds{0.0, 1.0} : Bounds{0.0, 255.0};
  ds.labels = labels;
  ds.points.reserve(images.images.size());
  for (const auto& img : images.images) {
    ds.points.push_back(scale01 ? DataPoint(img / 255.0) : img);
  }
  ds.validate();
  return ds;
}

LabeledDataset make_synthetic_blobs(int num_classes, int dim, int points_per_class,
                                    double separation, Rng& rng) {
  if (dim < 2) {
    throw DomainError("make_synthetic_blobs needs dim >= 2");
  }
  if (num_classes < 2 || num_classes > dim) {
    throw DomainError("make_synthetic_blobs needs 2 <= num_classes <= dim");
  }
  if (points_per_class < 1) {
    throw DomainError("make_synthetic_blobs needs points_per_class >= 1");
  }
  if (!(separation > 0.0)) {
    throw DomainError("make_synthetic_blobs needs separation > 0");
  }

  constexpr double kSigma = 0.05;
  // Vertices c + s*(e_k - mean(e)) have pairwise distance sqrt(2)*s; the
  // scale below makes that distance equal separation*sigma.
  const double scale = separation * kSigma / std::sqrt(2.0);

  LabeledDataset ds;
  ds.num_classes = num_classes;
  ds.bounds = Bounds{0.0, 1.0};
  DataPoint center = DataPoint::Constant(dim, 0.5);
  DataPoint basis_mean = DataPoint::Zero(dim);
  for (int k = 0; k < num_classes; ++k) {
    basis_mean[k] += 1.0 / num_classes;
  }
  std::vector<DataPoint> vertices;
  vertices.reserve(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    DataPoint vertex = center - scale * basis_mean;
    vertex[k] += scale;
    vertices.push_back(std::move(vertex));
  }
  // Classes are interleaved so any prefix of the dataset stays balanced.
  for (int i = 0; i < points_per_class; ++i) {
    for (int k = 0; k < num_classes; ++k) {
      DataPoint p(dim);
      for (int j = 0; j < dim; ++j) {
        p[j] = vertices[k][j] + kSigma * rng.gaussian();
      }
      ds.points.push_back(clip(p, ds.bounds));
      ds.labels.push_back(Label{k});
    }
  }
  ds.validate();
  return ds;
}

}  // namespace levy
