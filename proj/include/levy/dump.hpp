#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "levy/common.hpp"

namespace levy {

struct PgmImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

void write_pgm(const std::filesystem::path& path, const PgmImage& image);
PgmImage read_pgm(const std::filesystem::path& path);

void write_f64(const std::filesystem::path& path, const DataPoint& values);
DataPoint read_f64(const std::filesystem::path& path);

// Quantizes bounds-range values onto 0..255.
PgmImage quantize_to_pgm(const DataPoint& values, const Bounds& bounds,
                         int rows, int cols);

// Writes {stem}_original/adversarial/diff as PGM plus raw f64 sidecars and a
// meta JSON recording the difference display scale (0 for a zero diff, which
// renders uniform mid-gray).
void dump_sample(const std::filesystem::path& dir, const std::string& stem,
                 const DataPoint& original, const DataPoint& adversarial,
                 const Bounds& bounds, int rows, int cols);

}  // namespace levy
