#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qkam/core.hpp"

namespace qkam {

class FrequencyVector {
 public:
  FrequencyVector() : omega_{1.0} {}

  explicit FrequencyVector(std::vector<double> omega, double gamma_exp = -1.0,
                           std::optional<double> varsigma = std::nullopt)
      : omega_(std::move(omega)), varsigma_(varsigma) {
    if (omega_.empty() || static_cast<int>(omega_.size()) > kMaxDim)
      throw ValidationError("frequency vector must have 1..3 components");
    if (std::all_of(omega_.begin(), omega_.end(), [](double w) { return w == 0.0; }))
      throw ValidationError("frequency vector must be nonzero");
    gamma_exp_ = gamma_exp < 0 ? std::max(1.0, static_cast<double>(dim() - 1) + 0.5) : gamma_exp;
    if (dim() > 1 && gamma_exp_ <= dim() - 1)
      throw ValidationError("Diophantine exponent must exceed d-1");
    if (varsigma_ && *varsigma_ <= 0) throw ValidationError("varsigma must be positive");
  }

  int dim() const { return static_cast<int>(omega_.size()); }
  const std::vector<double>& values() const { return omega_; }
  double operator[](int i) const { return omega_[i]; }
  double gamma_exp() const { return gamma_exp_; }
  std::optional<double> varsigma() const { return varsigma_; }
  void set_varsigma(double v) { varsigma_ = v; }

  double dot(const IntVec& k) const {
    double s = 0;
    for (int i = 0; i < dim(); ++i) s += omega_[i] * k[i];
    return s;
  }

  // omega.k counts as zero when it is at rounding level of its own terms.
  bool resonant(const IntVec& k) const {
    double scale = 0;
    for (int i = 0; i < dim(); ++i) scale += std::abs(omega_[i] * k[i]);
    return std::abs(dot(k)) <= 8 * std::numeric_limits<double>::epsilon() * scale;
  }

  double norm() const {
    double s = 0;
    for (double w : omega_) s += w * w;
    return std::sqrt(s);
  }

 private:
  std::vector<double> omega_;
  double gamma_exp_ = 1.0;
  std::optional<double> varsigma_;
};

// Visits every k in the box |k|_inf <= K (first d components), k != 0.
template <class F>
void for_each_box_point(int d, int K, F&& f) {
  IntVec k{};
  for (int i = 0; i < d; ++i) k[i] = -K;
  while (true) {
    if (!is_zero(k)) f(k);
    int i = 0;
    while (i < d && k[i] == K) {
      k[i] = -K;
      ++i;
    }
    if (i == d) break;
    ++k[i];
  }
}

// Largest varsigma with |omega.k| >= varsigma/|k|^gamma on 0 < |k|_inf <= K_max.
inline double diophantine_estimate(const FrequencyVector& omega, double gamma_exp, int K_max) {
  if (K_max < 1) throw ValidationError("K_max must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  for_each_box_point(omega.dim(), K_max, [&](const IntVec& k) {
    if (omega.resonant(k))
      throw ResonantFrequencyError("omega.k = 0 at k = " + to_string(k, omega.dim()));
    best = std::min(best, std::abs(omega.dot(k)) * std::pow(norm2(k), gamma_exp));
  });
  return best;
}

inline double elementary_sup(double m, double s) {
  if (m <= 0 || s <= 0) throw ParameterRangeError("elementary_sup needs m, s > 0");
  return std::pow(m / (std::numbers::e * s), m);
}

}  // namespace qkam
