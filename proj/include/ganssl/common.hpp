#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ganssl {

inline constexpr const char* kToolVersion = "ganssl-lab 0.1.0";

// Density floor applied before any logarithm.
inline constexpr double kDensityFloor = 1e-12;

inline constexpr double kTwoLog2 = 2.0 * std::numbers::ln2;

// Error taxonomy; the CLI maps these onto exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// p(x) - eps*q(x) dipped below the floor at a specific cell.
struct SupportViolation : NumericError {
  SupportViolation(std::size_t cell, double p, double q, double eps)
      : NumericError("support violation at cell " + std::to_string(cell) +
                     ": p=" + std::to_string(p) + ", q=" + std::to_string(q) +
                     ", eps=" + std::to_string(eps) +
                     " gives non-positive perturbed density"),
        cell_index(cell) {}
  std::size_t cell_index;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ganssl
