#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace levy {

/// Flat real vector used for inputs, perturbations, and proposal noise.
using DataPoint = Eigen::VectorXd;

/// Per-coordinate box constraint [low, high], shared by every coordinate.
struct Bounds {
  double low = 0.0;
  double high = 1.0;

  bool contains(double v) const { return v >= low && v <= high; }
  double range() const { return high - low; }
};

struct Label {
  std::int32_t class_index = 0;
  friend bool operator==(const Label&, const Label&) = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or violated preconditions.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failures (missing file, unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents; carries the byte offset where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}
  explicit FormatError(const std::string& what) : Error(what), offset_(0) {}

  std::uint64_t byte_offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

struct RngSeed {
  std::uint64_t value = 0;

  RngSeed() = default;
  RngSeed(std::uint64_t v) : value(v) {}  // deliberately implicit
};

/// Deterministic random stream. All variates are derived from the raw
/// mt19937_64 output so that a given seed yields the same byte stream on
/// every platform, independent of the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  /// Uniform on [low, high).
  double uniform(double low, double high) {
    return low + (high - low) * (static_cast<double>(next_u64() >> 11) * 0x1p-53);
  }

  /// Unit-mean exponential variate, strictly positive.
  double unit_exponential() { return -std::log(uniform_open()); }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double gaussian() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; decorrelates derived seeds.
inline std::uint64_t mix_bits(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable per-item seed derivation, so runs are order-independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_bits(mix_bits(master) ^ mix_bits(index + 0x51ed270b0f4dULL));
}

inline std::uint64_t derive_seed(RngSeed master, std::uint64_t index) {
  return derive_seed(master.value, index);
}

inline DataPoint clip(const DataPoint& x, Bounds b) {
  return x.cwiseMax(b.low).cwiseMin(b.high);
}

inline double squared_distance(const DataPoint& a, const DataPoint& b) {
  return (a - b).squaredNorm();
}

}  // namespace levy
