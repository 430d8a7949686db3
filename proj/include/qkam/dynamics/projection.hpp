#pragma once

#include <functional>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "qkam/lattice/symbol.hpp"

namespace qkam {

// Lattice coefficients of a function on T^d x (R/L Z)^d sampled on a
// uniform grid with nx points per x-direction and nxi per xi-direction.
// Nyquist rows are dropped so that real data gives a real symbol.
struct ProjectionGrid {
  int d = 1;
  double L = kTwoPi;
  int nx = 32;
  int nxi = 32;

  int total() const {
    int n = 1;
    for (int i = 0; i < d; ++i) n *= nx * nxi;
    return n;
  }

  // Point of flat index idx; x components first.
  void point(int idx, std::vector<double>& x, std::vector<double>& xi) const {
    x.resize(d);
    xi.resize(d);
    // row-major over (x_0..x_{d-1}, xi_0..xi_{d-1}), last index fastest
    for (int i = 2 * d - 1; i >= 0; --i) {
      const int n = i < d ? nx : nxi;
      const int j = idx % n;
      idx /= n;
      if (i < d)
        x[i] = kTwoPi * j / nx;
      else
        xi[i - d] = L * j / nxi;
    }
  }
};

// FFTW planning is not thread safe.
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

inline TorusSymbol project_samples(const std::vector<Complex>& values, const ProjectionGrid& g,
                                   SymbolLimits limits = {}) {
  const int rank = 2 * g.d;
  std::vector<int> dims(rank);
  for (int i = 0; i < rank; ++i) dims[i] = i < g.d ? g.nx : g.nxi;
  const int N = g.total();
  if (static_cast<int>(values.size()) != N) throw ValidationError("sample count does not match grid");
  fftw_complex* in = fftw_alloc_complex(N);
  fftw_complex* out = fftw_alloc_complex(N);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_plan_mutex());
    plan = fftw_plan_dft(rank, dims.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (int i = 0; i < N; ++i) {
    in[i][0] = values[i].real();
    in[i][1] = values[i].imag();
  }
  fftw_execute(plan);
  TorusSymbol a(g.d, g.L, limits);
  for (int idx = 0; idx < N; ++idx) {
    int r = idx;
    Mode w;
    bool nyquist = false;
    for (int i = rank - 1; i >= 0; --i) {
      const int n = dims[i];
      int j = r % n;
      r /= n;
      if (n % 2 == 0 && j == n / 2) nyquist = true;
      if (j > n / 2) j -= n;
      (i < g.d ? w.k[i] : w.m[i - g.d]) = j;
    }
    if (nyquist) continue;
    const Complex c(out[idx][0] / N, out[idx][1] / N);
    if (std::abs(c) > 0 && a.in_box(w)) a.add(w, c);
  }
  {
    std::lock_guard lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  a.prune();
  return a;
}

inline TorusSymbol project_function(const std::function<Complex(const std::vector<double>&, const std::vector<double>&)>& f,
                                    const ProjectionGrid& g, SymbolLimits limits = {}) {
  std::vector<Complex> values(g.total());
  std::vector<double> x, xi;
  for (int i = 0; i < g.total(); ++i) {
    g.point(i, x, xi);
    values[i] = f(x, xi);
  }
  return project_samples(values, g, limits);
}

}  // namespace qkam
