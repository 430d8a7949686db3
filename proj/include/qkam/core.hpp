#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qkam {

using Complex = std::complex<double>;

// Integer lattice vectors. Dimensions above d are kept at zero so that
// comparison and hashing do not depend on d.
inline constexpr int kMaxDim = 3;
using IntVec = std::array<int, kMaxDim>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input or violated precondition. The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// A numerical check or integrator guard failed. Exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

struct ResonantFrequencyError : ValidationError {
  using ValidationError::ValidationError;
};

struct ZeroDivisorError : ValidationError {
  using ValidationError::ValidationError;
};

struct ParameterRangeError : ValidationError {
  using ValidationError::ValidationError;
};

inline IntVec operator+(const IntVec& a, const IntVec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline IntVec operator-(const IntVec& a, const IntVec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline IntVec operator-(const IntVec& a) { return {-a[0], -a[1], -a[2]}; }

inline bool is_zero(const IntVec& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; }

inline int dot(const IntVec& a, const IntVec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline int norm_inf(const IntVec& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

inline double norm2(const IntVec& a) { return std::sqrt(static_cast<double>(dot(a, a))); }

inline std::string to_string(const IntVec& a, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s + ")";
}

}  // namespace qkam
