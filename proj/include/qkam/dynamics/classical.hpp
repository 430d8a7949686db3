#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "qkam/dynamics/projection.hpp"
#include "qkam/dynamics/propagator.hpp"
#include "qkam/lindstedt/series.hpp"

namespace qkam {

struct StepSizeError : NumericalError {
  using NumericalError::NumericalError;
};

// Phase point (x, xi) in T^d x R^d, d <= 3, stored as 2*kMaxDim doubles.
using PhasePoint = std::array<double, 2 * kMaxDim>;

// Gradient evaluator for a time-polynomial Hamiltonian sign * sum tau^{n-1} H_n.
class HamiltonianField {
 public:
  explicit HamiltonianField(const TimePolynomial& H) : d_(H.terms.at(0).dim()), mu_(H.terms.at(0).mu()) {
    std::map<Mode, std::vector<Complex>> acc;
    const std::size_t N = H.terms.size();
    for (std::size_t n = 0; n < N; ++n)
      for (auto& [w, c] : H.terms[n].coeffs()) {
        auto& v = acc[w];
        v.resize(N);
        v[n] += H.sign * c;
      }
    for (auto& [w, v] : acc) modes_.push_back({w, v});
  }

  int dim() const { return d_; }

  double value(double tau, const PhasePoint& z) const {
    double h = 0;
    for (auto& e : modes_) h += (coeff(e, tau) * phase(e.w, z)).real();
    return h;
  }

  // (dH/dx, dH/dxi) in the first 2d slots.
  PhasePoint gradient(double tau, const PhasePoint& z) const {
    PhasePoint g{};
    for (auto& e : modes_) {
      const Complex v = kI * coeff(e, tau) * phase(e.w, z);
      for (int i = 0; i < d_; ++i) {
        g[i] += (static_cast<double>(e.w.k[i]) * v).real();
        g[d_ + i] += (mu_ * e.w.m[i] * v).real();
      }
    }
    return g;
  }

  // Hamiltonian vector field of -H: x' = -dH/dxi, xi' = dH/dx.
  PhasePoint reversed_field(double tau, const PhasePoint& z) const {
    PhasePoint g = gradient(tau, z), f{};
    for (int i = 0; i < d_; ++i) {
      f[i] = -g[d_ + i];
      f[d_ + i] = g[i];
    }
    return f;
  }

 private:
  struct Entry {
    Mode w;
    std::vector<Complex> c;
  };

  static Complex coeff(const Entry& e, double tau) {
    Complex s{};
    double p = 1;
    for (auto& c : e.c) {
      s += p * c;
      p *= tau;
    }
    return s;
  }

  Complex phase(const Mode& w, const PhasePoint& z) const {
    double ph = 0;
    for (int i = 0; i < d_; ++i) ph += w.k[i] * z[i] + mu_ * w.m[i] * z[d_ + i];
    return std::polar(1.0, ph);
  }

  int d_;
  double mu_;
  std::vector<Entry> modes_;
};

// Two-stage Gauss-Legendre (order 4, symplectic) for z' = f(tau, z) from
// tau0 to tau1 in `steps` equal steps (tau1 < tau0 is allowed).
template <class Field>
PhasePoint gauss_legendre(const Field& f, PhasePoint z, double tau0, double tau1, int steps, int dim2) {
  static const double s3 = std::sqrt(3.0);
  const double c1 = 0.5 - s3 / 6, c2 = 0.5 + s3 / 6;
  const double a11 = 0.25, a12 = 0.25 - s3 / 6, a21 = 0.25 + s3 / 6, a22 = 0.25;
  const double h = (tau1 - tau0) / steps;
  for (int s = 0; s < steps; ++s) {
    const double tau = tau0 + s * h;
    PhasePoint k1 = f(tau + c1 * h, z), k2 = f(tau + c2 * h, z);
    for (int it = 0; it < 100; ++it) {
      PhasePoint y1 = z, y2 = z;
      for (int i = 0; i < dim2; ++i) {
        y1[i] += h * (a11 * k1[i] + a12 * k2[i]);
        y2[i] += h * (a21 * k1[i] + a22 * k2[i]);
      }
      PhasePoint n1 = f(tau + c1 * h, y1), n2 = f(tau + c2 * h, y2);
      double diff = 0;
      for (int i = 0; i < dim2; ++i) diff = std::max({diff, std::abs(n1[i] - k1[i]), std::abs(n2[i] - k2[i])});
      k1 = n1;
      k2 = n2;
      if (diff <= 1e-15 * (1 + std::abs(h))) break;
    }
    for (int i = 0; i < dim2; ++i) z[i] += 0.5 * h * (k1[i] + k2[i]);
  }
  return z;
}

struct FlowOptions {
  int nx = 32;
  int nxi = 32;
  int steps = 0;             // 0: start at 16 and double until step doubling agrees
  double step_tol = 1e-11;   // max change of Phi under step doubling
  double analytic_s = 0.0;   // weight for the lattice norm of the displacement
  int symplectic_probes = 8;
};

// Phi_t = (phi_t^{-H})^{-1}: integrate the flow of -H backward from tau = t to 0.
struct PhaseFlowMap {
  double t = 0;
  int d = 1;
  double L = kTwoPi;
  ProjectionGrid grid;
  std::vector<PhasePoint> points;
  std::vector<PhasePoint> images;
  std::vector<TorusSymbol> displacement;  // 2d lattice symbols
  double sup_displacement = 0;
  double displacement_norm = 0;  // sum over components of the lattice norm at analytic_s
  double symplectic_residual = 0;
  int steps = 0;
};

class ClassicalFlow {
 public:
  ClassicalFlow(const LindstedtSeries& s, double t, int steps)
      : field_(TimePolynomial::generator(s)), t_(t), steps_(steps) {}

  PhasePoint operator()(const PhasePoint& z) const {
    auto f = [&](double tau, const PhasePoint& p) { return field_.reversed_field(tau, p); };
    return gauss_legendre(f, z, t_, 0.0, steps_, 2 * field_.dim());
  }

  int dim() const { return field_.dim(); }

 private:
  HamiltonianField field_;
  double t_;
  int steps_;
};

inline PhaseFlowMap classical_flow(const LindstedtSeries& s, double t, FlowOptions opt = {}) {
  const TorusSymbol& H1 = s.Hn(1);
  const int d = H1.dim();
  PhaseFlowMap m;
  m.t = t;
  m.d = d;
  m.L = H1.period();
  m.grid = ProjectionGrid{d, m.L, opt.nx, opt.nxi};
  const int N = m.grid.total();
  m.points.resize(N);
  std::vector<double> x, xi;
  for (int i = 0; i < N; ++i) {
    m.grid.point(i, x, xi);
    PhasePoint z{};
    for (int j = 0; j < d; ++j) {
      z[j] = x[j];
      z[d + j] = xi[j];
    }
    m.points[i] = z;
  }
  auto run = [&](int steps) {
    ClassicalFlow flow(s, t, steps);
    std::vector<PhasePoint> out(N);
    for (int i = 0; i < N; ++i) out[i] = t == 0 ? m.points[i] : flow(m.points[i]);
    return out;
  };
  int steps = opt.steps > 0 ? opt.steps : 16;
  m.images = run(steps);
  if (opt.steps <= 0 && t != 0) {
    for (;;) {
      auto finer = run(2 * steps);
      double diff = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < 2 * d; ++j) diff = std::max(diff, std::abs(finer[i][j] - m.images[i][j]));
      m.images = std::move(finer);
      steps *= 2;
      if (diff <= opt.step_tol) break;
      if (steps > 4096) throw StepSizeError("classical flow did not settle under step doubling");
    }
  }
  m.steps = steps;

  for (int j = 0; j < 2 * d; ++j) {
    std::vector<Complex> vals(N);
    for (int i = 0; i < N; ++i) {
      vals[i] = m.images[i][j] - m.points[i][j];
      m.sup_displacement = std::max(m.sup_displacement, std::abs(vals[i].real()));
    }
    TorusSymbol comp = project_samples(vals, m.grid);
    m.displacement_norm += analytic_norm(comp, opt.analytic_s);
    m.displacement.push_back(std::move(comp));
  }

  // D^T J D = J at a few probe points, central differences.
  ClassicalFlow flow(s, t, steps);
  const double h = 1e-4;
  for (int p = 0; p < opt.symplectic_probes && p < N; ++p) {
    const PhasePoint z = m.points[(p * 7919) % N];
    Eigen::MatrixXd D(2 * d, 2 * d);
    for (int j = 0; j < 2 * d; ++j) {
      PhasePoint zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      const PhasePoint fp = t == 0 ? zp : flow(zp), fm = t == 0 ? zm : flow(zm);
      for (int i = 0; i < 2 * d; ++i) D(i, j) = (fp[i] - fm[i]) / (2 * h);
    }
    Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (int i = 0; i < d; ++i) {
      Jm(i, d + i) = 1;
      Jm(d + i, i) = -1;
    }
    m.symplectic_residual = std::max(m.symplectic_residual, (D.transpose() * Jm * D - Jm).cwiseAbs().maxCoeff());
  }
  return m;
}

// max over the grid of |(L_omega + tV - R(t))(Phi_t z) - L_omega(z)|.
inline double classical_residual(const PhaseFlowMap& m, const TorusSymbol& V, const LindstedtSeries& s, double t) {
  const TorusSymbol R = counterterm(s, t);
  double worst = 0;
  std::vector<double> x(m.d), xi(m.d), x1(m.d), xi1(m.d);
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    double L0 = 0, L1 = 0;
    for (int j = 0; j < m.d; ++j) {
      xi[j] = m.points[i][m.d + j];
      x1[j] = m.images[i][j];
      xi1[j] = m.images[i][m.d + j];
      L0 += s.omega[j] * xi[j];
      L1 += s.omega[j] * xi1[j];
    }
    const double lhs = L1 + (t * V.evaluate(x1, xi1) - R.evaluate(x1, xi1)).real();
    worst = std::max(worst, std::abs(lhs - L0));
  }
  return worst;
}

}  // namespace qkam
