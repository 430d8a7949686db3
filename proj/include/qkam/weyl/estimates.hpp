#pragma once

#include <Eigen/Dense>

#include "qkam/weyl/moyal.hpp"
#include "qkam/weyl/quantize.hpp"

namespace qkam {

inline double operator_norm(const Eigen::MatrixXcd& M, bool hermitian = false) {
  if (M.size() == 0) return 0;
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()(0);
}

struct CalderonVaillancourt {
  double ratio = 0;
  double op_norm = 0;
  double symbol_norm = 0;
};

// ||Op_hbar(a)|| / ||a||_s on modes |j| <= J.
inline CalderonVaillancourt check_calderon_vaillancourt(const TorusSymbol& a, double hbar, int J, double s) {
  CalderonVaillancourt r;
  r.symbol_norm = analytic_norm(a, s);
  if (r.symbol_norm == 0) return r;
  OperatorMatrix op = quantize(a, hbar, J);
  r.op_norm = operator_norm(op.entries, op.hermitian);
  r.ratio = r.op_norm / r.symbol_norm;
  return r;
}

struct CommutatorLoss {
  double lhs = 0;
  double rhs = 0;
  bool holds() const { return lhs <= rhs * (1 + 1e-12); }
};

// ||[a,b]_hbar||_{s-s1-s2} against 2/(e^2 s1 (s1+s2)) ||a||_s ||b||_{s-s2}.
inline CommutatorLoss check_commutator_loss(const TorusSymbol& a, const TorusSymbol& b, double hbar, double s,
                                            double sigma1, double sigma2) {
  if (!(sigma1 > 0) || sigma2 < 0 || !(sigma1 + sigma2 < s))
    throw ParameterRangeError("commutator loss needs sigma1 > 0, sigma2 >= 0, sigma1 + sigma2 < s");
  const double e2 = std::exp(2.0);
  CommutatorLoss r;
  r.lhs = analytic_norm(moyal_commutator(a, b, hbar), s - sigma1 - sigma2);
  r.rhs = 2.0 / (e2 * sigma1 * (sigma1 + sigma2)) * analytic_norm(a, s) * analytic_norm(b, s - sigma2);
  return r;
}

}  // namespace qkam
