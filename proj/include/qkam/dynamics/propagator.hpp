#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qkam/lindstedt/series.hpp"
#include "qkam/weyl/estimates.hpp"
#include "qkam/weyl/quantize.hpp"

namespace qkam {

struct UnitarityDriftError : NumericalError {
  using NumericalError::NumericalError;
};

// H(tau) = sign * sum_n tau^{n-1} terms[n-1].
struct TimePolynomial {
  std::vector<TorusSymbol> terms;
  double sign = 1.0;

  static TimePolynomial generator(const LindstedtSeries& s, double sign = 1.0) { return {s.H, sign}; }

  TorusSymbol at(double tau) const {
    TorusSymbol h = terms.at(0).like();
    double p = sign;
    for (auto& term : terms) {
      h += p * term;
      p *= tau;
    }
    return h;
  }

  TorusSymbol derivative(double tau) const {
    TorusSymbol h = terms.at(0).like();
    double p = sign;
    for (std::size_t n = 1; n < terms.size(); ++n) {
      h += (p * static_cast<double>(n)) * terms[n];
      p *= tau;
    }
    return h;
  }

  bool time_independent() const {
    for (std::size_t n = 1; n < terms.size(); ++n)
      if (!terms[n].empty()) return false;
    return true;
  }

  bool is_zero() const {
    for (auto& t : terms)
      if (!t.empty()) return false;
    return true;
  }
};

struct PropagateOptions {
  int steps = 0;         // 0 picks a step count from the commutator scale
  int record_every = 0;  // 0 keeps only the endpoints
  double unitarity_tol = 1e-8;
};

struct PropagatorPath {
  std::vector<double> times;
  std::vector<OperatorMatrix> unitaries;
  std::string scheme = "midpoint-exponential";
  int steps = 0;
  double unitarity_error = 0;

  const OperatorMatrix& final() const { return unitaries.back(); }
};

// Step count with dt * sqrt(||[H, H']_hbar||_0 / hbar) <= 0.1 at mid-interval,
// never fewer than 8 unless H is constant in time.
inline int auto_steps(const TimePolynomial& H, double hbar, double t) {
  if (H.time_independent() || t == 0) return 1;
  const double mid = 0.5 * t;
  const double scale = std::sqrt(analytic_norm(moyal_commutator(H.at(mid), H.derivative(mid), hbar), 0) / hbar);
  return std::max(8, static_cast<int>(std::ceil(t * scale / 0.1)));
}

namespace detail {

// exp(-i (dt/hbar) G)
inline Eigen::MatrixXcd step_exponential(const Eigen::MatrixXcd& G, double dt, double hbar, bool hermitian) {
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    Eigen::VectorXcd ph(G.rows());
    for (Eigen::Index i = 0; i < G.rows(); ++i) ph(i) = std::polar(1.0, -dt / hbar * es.eigenvalues()(i));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  }
  Eigen::MatrixXcd A = Complex(0, -dt / hbar) * G;
  return A.exp();
}

}  // namespace detail

// dU/dt = -(i/hbar) Op(H(t)) U, U(0) = I, by the exponential midpoint rule.
inline PropagatorPath propagate(const TimePolynomial& H, double hbar, const ModeBasis& basis, double t,
                                PropagateOptions opt = {}) {
  detail::check_hbar(hbar);
  if (t < 0) throw ParameterRangeError("propagation time must be >= 0");
  const int n = basis.size();
  PropagatorPath path;
  path.steps = opt.steps > 0 ? opt.steps : auto_steps(H, hbar, t);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  auto record = [&](double time, const Eigen::MatrixXcd& U) {
    path.times.push_back(time);
    OperatorMatrix op{basis, hbar, U};
    op.unitary = true;
    path.unitaries.push_back(std::move(op));
  };
  record(0, I);
  if (H.is_zero() || t == 0) {
    if (t > 0) record(t, I);
    return path;
  }
  std::vector<Eigen::MatrixXcd> mats;
  bool hermitian = true;
  for (auto& term : H.terms) {
    OperatorMatrix q = quantize(term, hbar, basis);
    hermitian = hermitian && q.hermitian;
    mats.push_back(std::move(q.entries));
  }
  const double dt = t / path.steps;
  Eigen::MatrixXcd U = I;
  for (int k = 0; k < path.steps; ++k) {
    const double mid = (k + 0.5) * dt;
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
    double p = H.sign;
    for (auto& M : mats) {
      G += p * M;
      p *= mid;
    }
    if (hermitian) G = 0.5 * (G + G.adjoint()).eval();
    U = detail::step_exponential(G, dt, hbar, hermitian) * U;
    const bool last = k + 1 == path.steps;
    if (last || (opt.record_every > 0 && (k + 1) % opt.record_every == 0)) record((k + 1) * dt, U);
  }
  path.unitarity_error = (U.adjoint() * U - I).cwiseAbs().maxCoeff();
  if (path.unitarity_error > opt.unitarity_tol)
    throw UnitarityDriftError("unitarity drift " + std::to_string(path.unitarity_error) + " exceeds tolerance");
  return path;
}

}  // namespace qkam
