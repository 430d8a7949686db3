#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qkam/dynamics/classical.hpp"
#include "qkam/dynamics/projection.hpp"
#include "qkam/dynamics/propagator.hpp"

namespace qkam {

struct NoEigenvalueNearShellError : NumericalError {
  using NumericalError::NumericalError;
};

struct ExperimentOptions {
  int steps = 0;          // propagator steps, 0 = auto
  int min_steps = 32;     // floor on the auto step count
  int pad = -1;           // modes added on each side, -1 = from the spreading estimate
  int flow_grid = 64;     // classical flow samples per direction
};

// Largest k-support among the symbols, at least 1.
inline int support_width(std::initializer_list<const TorusSymbol*> syms, const std::vector<TorusSymbol>& more = {}) {
  int w = 1;
  for (auto* s : syms) w = std::max(w, s->k_support());
  for (auto& s : more) w = std::max(w, s.k_support());
  return w;
}

// Extra modes so that conjugation by U_{-H}(t) does not feel the basis edge:
// e^{(i/hbar) t H} spreads a plane wave over about e t ||H||_0 / hbar steps of
// the k-support.
inline int spreading_pad(const LindstedtSeries& s, const TorusSymbol& V, double t, double hbar) {
  double h = 0, tn = 1;
  for (auto& Hn : s.H) {
    h += tn * analytic_norm(Hn, 0);
    tn *= t;
  }
  const int w = support_width({&V}, s.H);
  return w * (static_cast<int>(std::ceil(std::numbers::e * t * h / hbar)) + 12);
}

inline int experiment_pad(const LindstedtSeries& s, const TorusSymbol& V, double t, double hbar,
                          const ExperimentOptions& opt) {
  return opt.pad >= 0 ? opt.pad : spreading_pad(s, V, t, hbar);
}

// U_{-H}(t) on the given basis.
inline Eigen::MatrixXcd reverse_propagator(const LindstedtSeries& s, double t, double hbar, const ModeBasis& basis,
                                           const ExperimentOptions& opt) {
  const TimePolynomial H = TimePolynomial::generator(s, -1.0);
  PropagateOptions po;
  po.steps = opt.steps > 0 ? opt.steps : std::max(opt.min_steps, auto_steps(H, hbar, t));
  return propagate(H, hbar, basis, t, po).final().entries;
}

// Matrix of L_omega + Op(tV - R_N(t)).
inline OperatorMatrix renormalized_operator(const TorusSymbol& V, const LindstedtSeries& s, double t, double hbar,
                                            const ModeBasis& basis) {
  TorusSymbol P = t * V - counterterm(s, t);
  OperatorMatrix op = quantize(AffineSymbol{s.omega, P}, hbar, basis);
  op.refresh_tags();
  return op;
}

inline double interior_norm(const Eigen::MatrixXcd& M, const ModeBasis& basis, int J) {
  Eigen::MatrixXcd B = restrict_block(M, basis.block(J));
  B = 0.5 * (B + B.adjoint()).eval();
  return operator_norm(B, true);
}

// || U_{-H} (L + Op(tV - R_N)) U_{-H}^* - L || on the modes |j| <= J.
inline double conjugation_residual(const TorusSymbol& V, const LindstedtSeries& s, double t, double hbar, int J,
                                   const ExperimentOptions& opt = {}) {
  detail::check_hbar(hbar);
  if (t == 0) return 0;
  const ModeBasis basis(V.dim(), J + experiment_pad(s, V, t, hbar, opt));
  const Eigen::MatrixXcd A = renormalized_operator(V, s, t, hbar, basis).entries;
  const Eigen::MatrixXcd U = reverse_propagator(s, t, hbar, basis, opt);
  Eigen::MatrixXcd M = U * A * U.adjoint();
  detail::add_transport(M, basis, s.omega, hbar, -1.0);
  return interior_norm(M, basis, J);
}

// a o Phi_t re-expanded on the lattice.
inline TorusSymbol compose_with_flow(const TorusSymbol& a, const PhaseFlowMap& m, SymbolLimits limits = {}) {
  std::vector<Complex> vals(m.images.size());
  std::vector<double> x(m.d), xi(m.d);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    for (int j = 0; j < m.d; ++j) {
      x[j] = m.images[i][j];
      xi[j] = m.images[i][m.d + j];
    }
    vals[i] = a.evaluate(x, xi);
  }
  return project_samples(vals, m.grid, limits);
}

struct EgorovResult {
  double residual = 0;
  bool aliasing_warning = false;
};

// || U_{-H} Op(a) U_{-H}^* - Op(a o Phi_t) || on |j| <= J. `classical` supplies
// Phi_t and must be the hbar = 0 series of the same V.
inline EgorovResult egorov_residual(const TorusSymbol& a, const LindstedtSeries& quantum,
                                    const LindstedtSeries& classical, double t, double hbar, int J,
                                    const ExperimentOptions& opt = {}) {
  detail::check_hbar(hbar);
  EgorovResult r;
  FlowOptions fo;
  fo.nx = fo.nxi = opt.flow_grid;
  const PhaseFlowMap m = classical_flow(classical, t, fo);
  const TorusSymbol b = compose_with_flow(a, m);
  // Coefficients at the Nyquist edge mean the grid was too coarse for a o Phi_t.
  for (auto& [w, c] : b.coeffs())
    if (std::abs(c) > 1e-10 && norm_inf(w.k) >= opt.flow_grid / 2 - 1) r.aliasing_warning = true;

  const ModeBasis basis(a.dim(), J + experiment_pad(quantum, a, t, hbar, opt) + b.k_support());
  const Eigen::MatrixXcd A = quantize(a, hbar, basis).entries;
  const Eigen::MatrixXcd U = reverse_propagator(quantum, t, hbar, basis, opt);
  Eigen::MatrixXcd M = U * A * U.adjoint() - quantize(b, hbar, basis).entries;
  r.residual = interior_norm(M, basis, J);
  return r;
}

struct SpectrumResult {
  std::vector<double> eigenvalues;
  int targets = 0;
  int matched = 0;
  double tolerance = 0;
  double matched_fraction() const { return targets ? static_cast<double>(matched) / targets : 1.0; }
};

// One-to-one matching of targets to eigenvalues, closest pairs first.
inline int greedy_match(const std::vector<double>& eigs, const std::vector<double>& targets, double tol) {
  struct Pair {
    double dist;
    int e, t;
  };
  std::vector<Pair> pairs;
  for (int ti = 0; ti < static_cast<int>(targets.size()); ++ti) {
    auto lo = std::lower_bound(eigs.begin(), eigs.end(), targets[ti] - tol);
    for (auto it = lo; it != eigs.end() && *it <= targets[ti] + tol; ++it)
      pairs.push_back({std::abs(*it - targets[ti]), static_cast<int>(it - eigs.begin()), ti});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
  std::vector<char> used_e(eigs.size(), 0), used_t(targets.size(), 0);
  int n = 0;
  for (auto& p : pairs) {
    if (used_e[p.e] || used_t[p.t]) continue;
    used_e[p.e] = used_t[p.t] = 1;
    ++n;
  }
  return n;
}

// Eigenvalues of L + Op(tV - R_N(t)) against hbar omega.j for |j| <= J.
// Default tolerance 10 t^{N+1} plus the series truncation tail.
inline SpectrumResult spectrum_check(const TorusSymbol& V, const LindstedtSeries& s, double t, double hbar, int J,
                                     double tol = -1, const ExperimentOptions& opt = {}) {
  detail::check_hbar(hbar);
  SpectrumResult r;
  r.tolerance = tol >= 0 ? tol : 10 * std::pow(t, s.orders() + 1) + s.truncation_tail();
  const ModeBasis basis(V.dim(), J + (t == 0 ? 0 : experiment_pad(s, V, t, hbar, opt)));
  const OperatorMatrix op = renormalized_operator(V, s, t, hbar, basis);
  Eigen::MatrixXcd A = 0.5 * (op.entries + op.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
  r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<double> targets;
  for (int idx : basis.block(J)) targets.push_back(hbar * s.omega.dot(basis.mode(idx)));
  r.targets = static_cast<int>(targets.size());
  r.matched = greedy_match(r.eigenvalues, targets, r.tolerance);
  return r;
}

struct MeasureRow {
  double hbar = 0;
  double eigenvalue = 0;
  IntVec j{};
  double xi0 = 0;  // first component of hbar j
  double normalization = 0;  // <Op(1) Psi, Psi>
  std::vector<double> pairing;
  std::vector<double> reference;
  double deviation = 0;
};

struct MeasureEstimate {
  std::vector<TorusSymbol> tests;
  std::vector<MeasureRow> rows;
  double sup_deviation() const {
    double d = 0;
    for (auto& r : rows) d = std::max(d, r.deviation);
    return d;
  }
};

struct MeasureOptions {
  double shell = 1.0;
  int J_min = 16;
  int quadrature = 128;  // points per x direction for the Haar average
  ExperimentOptions experiment;
};

// Haar average over x of a(Phi_t(x, xi0)).
inline double flow_average(const TorusSymbol& a, const LindstedtSeries& classical, double t,
                           const std::vector<double>& xi0, int nq) {
  const int d = a.dim();
  ClassicalFlow flow(classical, t, 256);
  int total = 1;
  for (int i = 0; i < d; ++i) total *= nq;
  double acc = 0;
  std::vector<double> x(d), xi(d);
  for (int idx = 0; idx < total; ++idx) {
    PhasePoint z{};
    int r = idx;
    for (int i = 0; i < d; ++i) {
      z[i] = kTwoPi * (r % nq) / nq;
      r /= nq;
      z[d + i] = xi0[i];
    }
    const PhasePoint w = t == 0 ? z : flow(z);
    for (int i = 0; i < d; ++i) {
      x[i] = w[i];
      xi[i] = w[d + i];
    }
    acc += a.evaluate(x, xi).real();
  }
  return acc / total;
}

// For each hbar: the eigenfunction of L + Op(tV - R_N(t)) whose eigenvalue is
// nearest the shell, its Wigner pairings with the test symbols, and the
// pushed-forward Haar averages at xi0 = hbar j*.
inline MeasureEstimate semiclassical_measure(const TorusSymbol& V, const FrequencyVector& omega, int N, double t,
                                             const std::vector<TorusSymbol>& tests,
                                             const std::vector<double>& hbar_list, MeasureOptions opt = {}) {
  MeasureEstimate est;
  est.tests = tests;
  const LindstedtSeries classical = lindstedt_terms(V, omega, 0.0, N);
  for (double hbar : hbar_list) {
    detail::check_hbar(hbar);
    const LindstedtSeries s = lindstedt_terms(V, omega, hbar, N);
    const double wmin = [&] {
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < omega.dim(); ++i) m = std::min(m, std::abs(omega[i]));
      return m;
    }();
    const int inner = std::max(opt.J_min, static_cast<int>(std::ceil(opt.shell / (hbar * wmin))) + 8);
    const int pad = t == 0 ? 0 : experiment_pad(s, V, t, hbar, opt.experiment);
    const ModeBasis basis(V.dim(), inner + pad);
    const OperatorMatrix op = renormalized_operator(V, s, t, hbar, basis);
    Eigen::MatrixXcd A = 0.5 * (op.entries + op.entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);

    // Eigenvalue nearest the shell among eigenvectors living in the interior;
    // ties go to the larger plane-wave overlap.
    const auto interior = basis.block(inner);
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity(), best_overlap = 0;
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
      const auto v = es.eigenvectors().col(c);
      double inside = 0;
      for (int idx : interior) inside += std::norm(v(idx));
      if (inside < 1 - 1e-8) continue;
      const double overlap = v.cwiseAbs2().maxCoeff();
      const double dist = std::abs(es.eigenvalues()(c) - opt.shell);
      if (dist < best_dist - 1e-12 || (std::abs(dist - best_dist) <= 1e-12 && overlap > best_overlap)) {
        best = static_cast<int>(c);
        best_dist = dist;
        best_overlap = overlap;
      }
    }
    if (best < 0) throw NoEigenvalueNearShellError("no interior eigenvalue near the energy shell");
    // The torus label xi0 = hbar j*: the lattice value hbar omega.j closest to
    // the eigenvalue (the largest plane-wave component can sit elsewhere once
    // the eigenfunction spreads over many modes).
    int best_mode = -1;
    {
      double dmin = std::numeric_limits<double>::infinity(), wmax = 0;
      const auto v = es.eigenvectors().col(best);
      for (int idx = 0; idx < basis.size(); ++idx) {
        const double dist = std::abs(hbar * omega.dot(basis.mode(idx)) - es.eigenvalues()(best));
        const double w = std::norm(v(idx));
        if (dist < dmin - 1e-12 || (std::abs(dist - dmin) <= 1e-12 && w > wmax)) {
          best_mode = idx;
          dmin = dist;
          wmax = w;
        }
      }
    }

    MeasureRow row;
    row.hbar = hbar;
    row.eigenvalue = es.eigenvalues()(best);
    row.j = basis.mode(best_mode);
    std::vector<double> xi0(V.dim());
    for (int i = 0; i < V.dim(); ++i) xi0[i] = hbar * row.j[i];
    row.xi0 = xi0[0];
    const Eigen::VectorXcd psi = es.eigenvectors().col(best);
    auto pair_with = [&](const TorusSymbol& a) {
      return psi.dot(quantize(a, hbar, basis).entries * psi).real();
    };
    row.normalization = pair_with(TorusSymbol::constant(V.dim(), V.period(), 1.0));
    for (auto& a : tests) {
      const double p = pair_with(a);
      const double ref = flow_average(a, classical, t, xi0, opt.quadrature);
      row.pairing.push_back(p);
      row.reference.push_back(ref);
      row.deviation = std::max(row.deviation, std::abs(p - ref));
    }
    est.rows.push_back(std::move(row));
  }
  return est;
}

// Least-squares slope of log y against log x; points with y <= 0 are skipped.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

}  // namespace qkam
