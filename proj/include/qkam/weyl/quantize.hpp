#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "qkam/lattice/symbol.hpp"

namespace qkam {

// Fourier modes e^{ij.x}, |j|_inf <= J, flattened with j[0] varying fastest.
class ModeBasis {
 public:
  ModeBasis(int d = 1, int J = 1) : d_(d), J_(J) {
    if (d < 1 || d > kMaxDim) throw ValidationError("basis dimension must be 1..3");
    if (J < 1) throw ValidationError("mode cutoff J must be >= 1");
    side_ = 2 * J + 1;
    size_ = 1;
    for (int i = 0; i < d; ++i) size_ *= side_;
  }

  int dim() const { return d_; }
  int cutoff() const { return J_; }
  int size() const { return size_; }

  bool contains(const IntVec& j) const { return norm_inf(j) <= J_; }

  int index(const IntVec& j) const {
    int idx = 0, stride = 1;
    for (int i = 0; i < d_; ++i) {
      idx += (j[i] + J_) * stride;
      stride *= side_;
    }
    return idx;
  }

  IntVec mode(int idx) const {
    IntVec j{};
    for (int i = 0; i < d_; ++i) {
      j[i] = idx % side_ - J_;
      idx /= side_;
    }
    return j;
  }

  // Indices of modes with |j|_inf <= inner, in this basis.
  std::vector<int> block(int inner) const {
    std::vector<int> out;
    for (int i = 0; i < size_; ++i)
      if (norm_inf(mode(i)) <= inner) out.push_back(i);
    return out;
  }

 private:
  int d_, J_, side_, size_;
};

struct OperatorMatrix {
  ModeBasis basis;
  double hbar = 1.0;
  Eigen::MatrixXcd entries;
  bool hermitian = false;
  bool unitary = false;
  bool truncation_warning = false;

  int J() const { return basis.cutoff(); }

  void refresh_tags() {
    hermitian = (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= 1e-12;
    const auto n = entries.rows();
    unitary = (entries.adjoint() * entries - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10;
  }
};

inline Eigen::MatrixXcd restrict_block(const Eigen::MatrixXcd& M, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd B(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) B(r, c) = M(idx[r], idx[c]);
  return B;
}

namespace detail {

// Adds Op_hbar(a) into M. Entry (j,l) = a^(j-l, hbar (j+l)/2).
inline bool add_quantized(Eigen::MatrixXcd& M, const ModeBasis& basis, const TorusSymbol& a, double hbar,
                          Complex scale = 1.0) {
  if (a.dim() != basis.dim()) throw ValidationError("symbol and basis dimensions differ");
  std::map<IntVec, std::vector<std::pair<IntVec, Complex>>> by_k;
  for (auto& [w, c] : a.coeffs()) by_k[w.k].push_back({w.m, c});
  const bool aliased = a.k_support() > 2 * basis.cutoff();
  const int d = basis.dim();
  const double mu = a.mu();
  for (int r = 0; r < basis.size(); ++r) {
    const IntVec j = basis.mode(r);
    for (auto& [k, ms] : by_k) {
      const IntVec l = j - k;
      if (!basis.contains(l)) continue;
      Complex e{};
      for (auto& [m, c] : ms) {
        double ph = 0;
        for (int i = 0; i < d; ++i) ph += mu * m[i] * 0.5 * hbar * (j[i] + l[i]);
        e += c * std::polar(1.0, ph);
      }
      M(r, basis.index(l)) += scale * e;
    }
  }
  return aliased;
}

inline void add_transport(Eigen::MatrixXcd& M, const ModeBasis& basis, const FrequencyVector& omega, double hbar,
                          double scale = 1.0) {
  if (omega.dim() != basis.dim()) throw ValidationError("frequency and basis dimensions differ");
  for (int r = 0; r < basis.size(); ++r) M(r, r) += scale * hbar * omega.dot(basis.mode(r));
}

inline void check_hbar(double hbar) {
  if (!(hbar > 0 && hbar <= 1)) throw ParameterRangeError("hbar must lie in (0, 1]");
}

}  // namespace detail

inline OperatorMatrix quantize(const TorusSymbol& a, double hbar, const ModeBasis& basis) {
  detail::check_hbar(hbar);
  OperatorMatrix op{basis, hbar, Eigen::MatrixXcd::Zero(basis.size(), basis.size())};
  op.truncation_warning = detail::add_quantized(op.entries, basis, a, hbar);
  op.hermitian = a.is_real();
  return op;
}

inline OperatorMatrix quantize(const TorusSymbol& a, double hbar, int J) {
  return quantize(a, hbar, ModeBasis(a.dim(), J));
}

inline OperatorMatrix quantize(const AffineSymbol& a, double hbar, const ModeBasis& basis) {
  OperatorMatrix op = quantize(a.periodic, hbar, basis);
  detail::add_transport(op.entries, basis, a.omega, hbar);
  return op;
}

inline OperatorMatrix quantize(const AffineSymbol& a, double hbar, int J) {
  return quantize(a, hbar, ModeBasis(a.periodic.dim(), J));
}

}  // namespace qkam
