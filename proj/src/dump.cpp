#include "levy/dump.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace levy {

namespace {

std::uint8_t clamp_byte(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

int read_pgm_int(std::ifstream& in, const std::filesystem::path& path) {
  // Skips whitespace and '#' comment lines between header tokens.
  while (true) {
    const int c = in.peek();
    if (c == std::char_traits<char>::eof()) {
      break;
    }
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) {
    throw FormatError("malformed PGM header in " + path.string(), 0);
  }
  return value;
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const PgmImage& image) {
  if (image.rows < 1 || image.cols < 1 ||
      image.pixels.size() !=
          static_cast<std::size_t>(image.rows) * image.cols) {
    throw DomainError("PGM dimensions do not match pixel count");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "P5\n" << image.cols << ' ' << image.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  char magic[2];
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
    throw FormatError("not a P5 PGM: " + path.string(), 0);
  }
  PgmImage image;
  image.cols = read_pgm_int(in, path);
  image.rows = read_pgm_int(in, path);
  const int maxval = read_pgm_int(in, path);
  if (image.cols < 1 || image.rows < 1 || maxval != 255) {
    throw FormatError("unsupported PGM header in " + path.string(), 0);
  }
  in.get();  // single whitespace byte after maxval
  const std::size_t count =
      static_cast<std::size_t>(image.rows) * image.cols;
  image.pixels.resize(count);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(count));
  if (in.gcount() != static_cast<std::streamsize>(count)) {
    throw FormatError("truncated PGM payload in " + path.string(),
                      static_cast<std::uint64_t>(in.gcount()));
  }
  return image;
}

void write_f64(const std::filesystem::path& path, const DataPoint& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

DataPoint read_f64(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  const auto bytes = static_cast<std::uint64_t>(in.tellg());
  if (bytes % sizeof(double) != 0) {
    throw FormatError("f64 file size not a multiple of 8: " + path.string(),
                      bytes);
  }
  in.seekg(0);
  DataPoint values(bytes / sizeof(double));
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(bytes));
  return values;
}

PgmImage quantize_to_pgm(const DataPoint& values, const Bounds& bounds,
                         int rows, int cols) {
  if (static_cast<std::size_t>(rows) * cols !=
      static_cast<std::size_t>(values.size())) {
    throw DomainError("display shape does not match vector length");
  }
  PgmImage image;
  image.rows = rows;
  image.cols = cols;
  image.pixels.resize(static_cast<std::size_t>(values.size()));
  const double range = bounds.range();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    image.pixels[static_cast<std::size_t>(i)] =
        clamp_byte((values[i] - bounds.low) / range * 255.0);
  }
  return image;
}

void dump_sample(const std::filesystem::path& dir, const std::string& stem,
                 const DataPoint& original, const DataPoint& adversarial,
                 const Bounds& bounds, int rows, int cols) {
  if (original.size() != adversarial.size()) {
    throw DomainError("original/adversarial size mismatch");
  }
  std::filesystem::create_directories(dir);

  const DataPoint diff = adversarial - original;
  const double peak = diff.size() > 0 ? diff.cwiseAbs().maxCoeff() : 0.0;
  const double scale = peak > 0.0 ? 127.0 / peak : 0.0;

  PgmImage diff_image;
  diff_image.rows = rows;
  diff_image.cols = cols;
  diff_image.pixels.resize(static_cast<std::size_t>(diff.size()));
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    diff_image.pixels[static_cast<std::size_t>(i)] =
        clamp_byte(128.0 + diff[i] * scale);
  }

  write_pgm(dir / (stem + "_original.pgm"),
            quantize_to_pgm(original, bounds, rows, cols));
  write_pgm(dir / (stem + "_adversarial.pgm"),
            quantize_to_pgm(adversarial, bounds, rows, cols));
  write_pgm(dir / (stem + "_diff.pgm"), diff_image);
  write_f64(dir / (stem + "_original.f64"), original);
  write_f64(dir / (stem + "_adversarial.f64"), adversarial);
  write_f64(dir / (stem + "_diff.f64"), diff);

  nlohmann::ordered_json meta;
  meta["rows"] = rows;
  meta["cols"] = cols;
  meta["low"] = bounds.low;
  meta["high"] = bounds.high;
  meta["diff_scale"] = scale;
  std::ofstream out(dir / (stem + "_meta.json"),
                    std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write dump metadata for " + stem);
  }
  out << meta.dump(2) << '\n';
}

}  // namespace levy
