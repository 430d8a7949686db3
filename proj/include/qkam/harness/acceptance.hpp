#pragma once

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkam/divisors/bounds.hpp"
#include "qkam/dynamics/experiments.hpp"
#include "qkam/harness/scenario.hpp"
#include "qkam/lindstedt/conjugation.hpp"
#include "qkam/lindstedt/tree_expansion.hpp"
#include "qkam/trees/coefficients.hpp"
#include "qkam/weyl/estimates.hpp"

namespace qkam {

// Real symbol with `pairs` conjugate pairs of modes, |k|_inf <= K, |m|_inf <= M.
inline TorusSymbol random_real_symbol(std::mt19937_64& rng, int d, int pairs, int K, int M, double L = kTwoPi) {
  std::uniform_int_distribution<int> dk(-K, K), dm(-M, M);
  std::uniform_real_distribution<double> dc(-1, 1);
  TorusSymbol a(d, L);
  for (int p = 0; p < pairs; ++p) {
    Mode w;
    for (int i = 0; i < d; ++i) {
      w.k[i] = dk(rng);
      w.m[i] = dm(rng);
    }
    const Complex c(dc(rng), dc(rng));
    if (w == -w) {
      a.add(w, c.real());
    } else {
      a.add(w, c);
      a.add(-w, std::conj(c));
    }
  }
  return a;
}

inline TorusSymbol cos_x_symbol() {
  TorusSymbol V(1);
  V.add({{1}, {0}}, 0.5);
  V.add({{-1}, {0}}, 0.5);
  return V;
}

// cos x + cos x cos xi, the non-degenerate companion of cos x.
inline TorusSymbol mixed_symbol() {
  TorusSymbol V = cos_x_symbol();
  for (int a : {1, -1})
    for (int b : {1, -1}) V.add({{a}, {b}}, 0.25);
  return V;
}

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  int workers = 0;  // 0: from WORKERS
};

namespace acceptance {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline bool close_rel(Complex a, Complex b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline CriterionResult tree_counts() {
  CriterionResult r{"1", "tree counts match Catalan numbers and #Delta(n) <= 4^n"};
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream d;
  bool ok = true;
  for (int n = 1; n <= 10; ++n) {
    const auto count = static_cast<long long>(enumerate_delta(n).size());
    // C_{n-1} = binom(2m, m) / (m + 1)
    const int m = n - 1;
    long long cat = 1;
    for (int i = 1; i <= m; ++i) cat = cat * (m + i) / i;
    cat /= (m + 1);
    ok = ok && count == cat && static_cast<double>(count) <= std::pow(4.0, n);
    d << (n > 1 ? "," : "") << count;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = ok && secs < 60;
  r.detail = "counts " + d.str() + " in " + fmt("%.2f s", secs);
  return r;
}

inline CriterionResult rational_identities(std::uint64_t seed) {
  CriterionResult r{"2", "exact rational coefficient identities"};
  int comps = 0, fail = 0;
  for (int n = 1; n <= 7; ++n)
    for (auto& c : compositions(n)) {
      ++comps;
      if (!permutation_sum_check(c)) ++fail;
    }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, 6), val(1, 12);
  int jfail = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<int> ls(len(rng));
    for (auto& x : ls) x = val(rng);
    if (!jacobi_coefficient_check(val(rng), ls)) ++jfail;
  }
  r.pass = fail == 0 && jfail == 0;
  r.detail = std::to_string(comps) + " compositions, " + std::to_string(fail) + " failures; 500 Jacobi instances, " +
             std::to_string(jfail) + " failures";
  return r;
}

inline CriterionResult moyal_layer(std::uint64_t seed) {
  CriterionResult r{"3", "Moyal layer identities"};
  std::mt19937_64 rng(seed + 3);
  std::uniform_real_distribution<double> uw(0.3, 2.0), uh(0.05, 1.0);

  // (i/hbar)[L, Op(a)] against Op([L_omega, a]_hbar) on a mode block.
  double transport = 0;
  for (int i = 0; i < 50; ++i) {
    const int d = 1 + i % 2;
    std::vector<double> w(d);
    for (auto& x : w) x = uw(rng);
    const FrequencyVector omega(w);
    const TorusSymbol a = random_real_symbol(rng, d, 4, 3, 3);
    const double hbar = uh(rng);
    const ModeBasis basis(d, d == 1 ? 12 : 6);
    const TorusSymbol c = moyal_commutator(AffineSymbol{omega, a.like()}, a, hbar);
    const Eigen::MatrixXcd A = quantize(a, hbar, basis).entries;
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
    detail::add_transport(L, basis, omega, hbar);
    const Eigen::MatrixXcd lhs = Complex(0, 1.0 / hbar) * (L * A - A * L);
    transport = std::max(transport, (lhs - quantize(c, hbar, basis).entries).cwiseAbs().maxCoeff());
  }

  double jac = 0;
  for (int i = 0; i < 200; ++i) {
    const double hbar = std::array{1.0, 0.5, 0.1}[i % 3];
    const TorusSymbol a = random_real_symbol(rng, 1 + i % 2, 3, 2, 2);
    const TorusSymbol b = random_real_symbol(rng, a.dim(), 3, 2, 2);
    const TorusSymbol c = random_real_symbol(rng, a.dim(), 3, 2, 2);
    const TorusSymbol J = moyal_commutator(a, moyal_commutator(b, c, hbar), hbar) +
                          moyal_commutator(b, moyal_commutator(c, a, hbar), hbar) +
                          moyal_commutator(c, moyal_commutator(a, b, hbar), hbar);
    jac = std::max(jac, analytic_norm(J, 0));
  }

  double sjac = 0;
  std::uniform_int_distribution<int> di(-2, 2);
  for (int i = 0; i < 1000; ++i) {
    FourierWeight w[3];
    for (auto& x : w)
      for (int j = 0; j < 2; ++j) {
        x.k[j] = di(rng);
        x.eta[j] = di(rng);
      }
    const double h = uh(rng);
    const double lhs = sigma1(w[0], w[1] + w[2], h) * sigma1(w[1], w[2], h);
    const double rhs = sigma1(w[0] + w[1], w[2], h) * sigma1(w[0], w[1], h) +
                       sigma1(w[1], w[0] + w[2], h) * sigma1(w[0], w[2], h);
    sjac = std::max(sjac, std::abs(lhs - rhs));
  }

  double worst_slope = 1e300;
  for (int i = 0; i < 5; ++i) {
    const TorusSymbol a = random_real_symbol(rng, 1 + i % 2, 3, 2, 2);
    const TorusSymbol b = random_real_symbol(rng, a.dim(), 3, 2, 2);
    const TorusSymbol pb = poisson_bracket(a, b);
    std::vector<double> hs = log_grid(0.0125, 0.2, 5), diff;
    for (double h : hs) diff.push_back(analytic_norm(moyal_commutator(a, b, h) - pb, 0));
    worst_slope = std::min(worst_slope, loglog_slope(hs, diff));
  }
  r.pass = transport <= 1e-13 && jac <= 1e-11 && sjac <= 1e-12 && worst_slope >= 1.9;
  r.detail = "transport " + fmt("%.2e", transport) + ", Jacobi " + fmt("%.2e", jac) + ", sigma Jacobi " +
             fmt("%.2e", sjac) + ", min slope " + fmt("%.3f", worst_slope);
  return r;
}

struct OmegaSweep {
  long cases = 0, mismatches = 0, collisions = 0, zero_root = 0;
  double worst = 0, rho_ratio = 0;
};

template <class F>
void for_each_weight(int n, int lo, int hi, F&& f) {
  std::vector<int> v(n, lo);
  while (true) {
    f(v);
    int i = 0;
    while (i < n && v[i] == hi) v[i++] = lo;
    if (i == n) break;
    ++v[i];
  }
}

inline OmegaSweep omega_sweep_tree(const TreeIndexSet& t, int range) {
  OmegaSweep s;
  const FrequencyVector omega({1.0});
  const ComplexArithmetic ar{omega};
  const int n = t.size();
  for_each_weight(n, -range, range, [&](const std::vector<int>& v) {
    const DecoratedTree dt = DecoratedTree::scalar(t.delta(), v);
    const Complex rec = omega_recursive(dt, omega).omega1;
    const Complex rs = omega1_resonance_sum(dt, ar);
    const ClassPartition P = partition_admissible(dt);
    const Complex cs = omega1_class_sum(dt, P, ar);
    ++s.cases;
    if (is_zero(dt.gamma(n))) ++s.zero_root;
    const double e = std::max(std::abs(rec - rs), std::abs(rec - cs)) / std::max(1.0, std::abs(rec));
    s.worst = std::max(s.worst, e);
    if (e > 1e-10) ++s.mismatches;
    const double rho = static_cast<double>(P.classes.size());
    s.rho_ratio = std::max(s.rho_ratio, rho / std::pow(8.0, n));
    std::vector<TImage> imgs;
    for (auto& c : P.classes) imgs.push_back(tmap(P.resonances, P.admissible[c.minimal].idx));
    std::sort(imgs.begin(), imgs.end());
    if (std::adjacent_find(imgs.begin(), imgs.end()) != imgs.end()) ++s.collisions;
  });
  return s;
}

inline CriterionResult omega_agreement(int workers) {
  CriterionResult r{"4", "Omega recursive = resonance sum = class sum; rho <= 8^n; T injective"};
  std::vector<TreeIndexSet> trees;
  for (int n = 1; n <= 5; ++n)
    for (auto& t : enumerate_delta(n)) trees.push_back(t);
  auto parts = parallel_map<OmegaSweep>(
      static_cast<int>(trees.size()), [&](int i) { return omega_sweep_tree(trees[i], 2); }, workers);
  OmegaSweep tot;
  for (auto& p : parts) {
    tot.cases += p.cases;
    tot.mismatches += p.mismatches;
    tot.collisions += p.collisions;
    tot.zero_root += p.zero_root;
    tot.worst = std::max(tot.worst, p.worst);
    tot.rho_ratio = std::max(tot.rho_ratio, p.rho_ratio);
  }
  r.pass = tot.mismatches == 0 && tot.collisions == 0 && tot.rho_ratio <= 1.0;
  r.detail = std::to_string(tot.cases) + " cases (" + std::to_string(tot.zero_root) + " zero-sum roots), worst rel " +
             fmt("%.2e", tot.worst) + ", max rho/8^n " + fmt("%.4f", tot.rho_ratio) + ", T collisions " +
             std::to_string(tot.collisions);
  return r;
}

inline CriterionResult eliasson(double gamma_exp, int workers) {
  CriterionResult r{"5", "Eliasson bound on the n <= 6 sweep"};
  const FrequencyVector omega({1.0}, gamma_exp);
  const double varsigma = diophantine_estimate(omega, gamma_exp, 64);
  std::vector<std::pair<TreeIndexSet, int>> cells;
  for (int n = 1; n <= 6; ++n)
    for (auto& t : enumerate_delta(n)) cells.push_back({t, n <= 5 ? 2 : 1});
  struct Out {
    long cases = 0, violations = 0;
    double ratio = 0;
  };
  auto parts = parallel_map<Out>(
      static_cast<int>(cells.size()),
      [&](int i) {
        Out o;
        for_each_weight(cells[i].first.size(), -cells[i].second, cells[i].second, [&](const std::vector<int>& v) {
          const BoundCheck b = eliasson_bound_check(DecoratedTree::scalar(cells[i].first.delta(), v), omega,
                                                    gamma_exp, varsigma);
          ++o.cases;
          if (!b.holds()) ++o.violations;
          if (b.rhs > 0) o.ratio = std::max(o.ratio, b.lhs / b.rhs);
        });
        return o;
      },
      workers);
  Out tot;
  for (auto& p : parts) {
    tot.cases += p.cases;
    tot.violations += p.violations;
    tot.ratio = std::max(tot.ratio, p.ratio);
  }
  r.pass = tot.violations == 0;
  r.detail = std::to_string(tot.cases) + " cases, varsigma " + fmt("%.4g", varsigma) + ", violations " +
             std::to_string(tot.violations) + ", max lhs/rhs " + fmt("%.3e", tot.ratio);
  return r;
}

inline CriterionResult lindstedt_cross(std::uint64_t seed) {
  CriterionResult r{"6", "Lindstedt direct recursion vs tree expansion; cohomological residuals"};
  std::mt19937_64 rng(seed + 6);
  const FrequencyVector omega({1.0, (std::sqrt(5.0) - 1) / 2});
  double worst = 0, coh = 0;
  for (int i = 0; i < 20; ++i) {
    const TorusSymbol V = random_real_symbol(rng, 2, 2, 2, 2);  // at most 4 modes
    const double hbar = i % 2 ? 0.5 : 0.0;
    const LindstedtSeries a = lindstedt_terms(V, omega, hbar, 3);
    const LindstedtSeries b = lindstedt_terms_tree(V, omega, hbar, 3);
    for (int n = 1; n <= 3; ++n) {
      const double sh = std::max(analytic_norm(a.Hn(n), 0), 1e-300);
      const double sr = std::max(analytic_norm(a.Rn(n), 0), 1e-300);
      worst = std::max(worst, analytic_norm(a.Hn(n) - b.Hn(n), 0) / std::max(sh, 1.0));
      worst = std::max(worst, analytic_norm(a.Rn(n) - b.Rn(n), 0) / std::max(sr, 1.0));
      coh = std::max(coh, cohomological_residual(a, V, n));
    }
  }
  r.pass = worst <= 1e-9 && coh <= 1e-11;
  r.detail = "worst relative difference " + fmt("%.2e", worst) + ", cohomological residual " + fmt("%.2e", coh);
  return r;
}

inline const std::vector<double>& residual_hbar_grid() {
  static const std::vector<double> g{1.0, 0.5, 0.1, 0.02};
  return g;
}

inline CriterionResult renormalization_order(const std::string& id, const TorusSymbol& V, int workers) {
  CriterionResult r{id, "conjugation residual slope >= 2.7 in t, residual/t^3 within 10x across hbar"};
  const FrequencyVector omega({1.0});
  const auto ts = log_grid(1e-3, 1e-1, 5);
  const auto& hs = residual_hbar_grid();
  struct Row {
    double slope = 0, constant = 0, max_res = 0;
  };
  auto rows = parallel_map<Row>(
      static_cast<int>(hs.size()),
      [&](int i) {
        const LindstedtSeries s = lindstedt_terms(V, omega, hs[i], 2);
        std::vector<double> res;
        double c = 0;
        for (double t : ts) {
          res.push_back(conjugation_residual(V, s, t, hs[i], 16));
          c += res.back() / std::pow(t, 3) / ts.size();
        }
        return Row{loglog_slope(ts, res), c, *std::max_element(res.begin(), res.end())};
      },
      workers);
  bool ok = true;
  double cmin = 1e300, cmax = 0;
  std::ostringstream d;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    ok = ok && rows[i].slope >= 2.7;
    cmin = std::min(cmin, rows[i].constant);
    cmax = std::max(cmax, rows[i].constant);
    d << "hbar=" << hs[i] << ": slope " << fmt("%.3f", rows[i].slope) << " max residual "
      << fmt("%.2e", rows[i].max_res) << "; ";
  }
  const double spread = cmin > 0 ? cmax / cmin : std::numeric_limits<double>::infinity();
  r.pass = ok && spread < 10;
  d << "constant spread " << fmt("%.3g", spread);
  r.detail = d.str();
  return r;
}

inline CriterionResult isospectrality() {
  CriterionResult r{"8", "interior eigenvalues matched to hbar*omega*j at tolerance 10 t^3"};
  const TorusSymbol V = cos_x_symbol();
  const FrequencyVector omega({1.0});
  bool ok = true;
  std::ostringstream d;
  for (double hbar : residual_hbar_grid()) {
    const LindstedtSeries s = lindstedt_terms(V, omega, hbar, 2);
    const SpectrumResult sp = spectrum_check(V, s, 0.05, hbar, 32, 10 * std::pow(0.05, 3));
    ok = ok && sp.matched_fraction() >= 0.95;
    d << "hbar=" << hbar << ": " << fmt("%.3f", sp.matched_fraction()) << "; ";
  }
  r.pass = ok;
  r.detail = d.str();
  return r;
}

inline CriterionResult classical_order(const std::string& id, const TorusSymbol& V) {
  CriterionResult r{id, "classical conjugation residual slope >= 2.7; |Phi_t - Id| <= C t"};
  const LindstedtSeries s = lindstedt_terms(V, FrequencyVector({1.0}), 0.0, 2);
  const auto ts = log_grid(1e-3, 1e-1, 5);
  std::vector<double> res;
  double C = 0, sympl = 0;
  for (double t : ts) {
    const PhaseFlowMap m = classical_flow(s, t);
    res.push_back(classical_residual(m, V, s, t));
    C = std::max(C, m.displacement_norm / t);
    sympl = std::max(sympl, m.symplectic_residual);
  }
  const double slope = loglog_slope(ts, res);
  r.pass = slope >= 2.7 && std::isfinite(C) && sympl <= 1e-6;
  r.detail = "slope " + fmt("%.3f", slope) + ", max residual " + fmt("%.2e", *std::max_element(res.begin(), res.end())) +
             ", C " + fmt("%.4g", C) + ", symplecticity " + fmt("%.2e", sympl);
  return r;
}

inline std::vector<TorusSymbol> measure_test_symbols() {
  // cos x, sin x, cos 2x, cos xi, sin xi, cos 2xi, cos x cos xi, sin(x + xi),
  // cos(x - xi), cos x + sin 2xi
  std::vector<TorusSymbol> out;
  auto cosine = [](int k, int m, double amp = 1.0) {
    TorusSymbol a(1);
    a.add({{k}, {m}}, 0.5 * amp);
    a.add({{-k}, {-m}}, 0.5 * amp);
    return a;
  };
  auto sine = [](int k, int m) {
    TorusSymbol a(1);
    a.add({{k}, {m}}, Complex(0, -0.5));
    a.add({{-k}, {-m}}, Complex(0, 0.5));
    return a;
  };
  out.push_back(cosine(1, 0));
  out.push_back(sine(1, 0));
  out.push_back(cosine(2, 0));
  out.push_back(cosine(0, 1));
  out.push_back(sine(0, 1));
  out.push_back(cosine(0, 2));
  out.push_back(cosine(1, 1, 0.5) + cosine(1, -1, 0.5));
  out.push_back(sine(1, 1));
  out.push_back(cosine(1, -1));
  out.push_back(cosine(1, 0) + sine(0, 2));
  return out;
}

inline CriterionResult measures() {
  CriterionResult r{"10", "semiclassical measure pairings vs pushed-forward Haar averages"};
  const auto tests = measure_test_symbols();
  const FrequencyVector omega({1.0});
  const double hbar = 1.0 / 200;
  const MeasureEstimate live = semiclassical_measure(cos_x_symbol(), omega, 2, 0.05, tests, {hbar});
  const MeasureEstimate still = semiclassical_measure(cos_x_symbol(), omega, 2, 0.0, tests, {hbar});
  TorusSymbol vxi(1);
  vxi.add({{0}, {1}}, 0.5);
  vxi.add({{0}, {-1}}, 0.5);
  const MeasureEstimate flat = semiclassical_measure(vxi, omega, 2, 0.05, tests, {hbar});
  double norm_err = 0;
  for (auto* e : {&live, &still, &flat})
    for (auto& row : e->rows) norm_err = std::max(norm_err, std::abs(row.normalization - 1));
  r.pass = live.sup_deviation() <= 0.05 && still.sup_deviation() <= 1e-10 && flat.sup_deviation() <= 1e-10 &&
           norm_err <= 1e-10;
  r.detail = "t=0.05 deviation " + fmt("%.3e", live.sup_deviation()) + " (xi0 " + fmt("%.4f", live.rows[0].xi0) +
             "), t=0 " + fmt("%.2e", still.sup_deviation()) + ", x-independent V " + fmt("%.2e", flat.sup_deviation()) +
             ", normalization " + fmt("%.2e", norm_err);
  return r;
}

inline CriterionResult norm_estimates(std::uint64_t seed) {
  CriterionResult r{"11", "Calderon-Vaillancourt, commutator loss, propagator bound"};
  std::mt19937_64 rng(seed + 11);
  double cv = 0;
  for (int i = 0; i < 100; ++i) {
    const TorusSymbol a = random_real_symbol(rng, 1 + i % 2, 4, 3, 3);
    for (double hbar : residual_hbar_grid())
      cv = std::max(cv, check_calderon_vaillancourt(a, hbar, a.dim() == 1 ? 16 : 6, 0.5).ratio);
  }
  std::uniform_real_distribution<double> u(0, 1);
  int loss_viol = 0;
  for (int i = 0; i < 200; ++i) {
    const double s = 0.2 + u(rng);
    const double s1 = 0.05 + 0.5 * s * u(rng);
    const double s2 = (s - s1) * 0.9 * u(rng);
    const TorusSymbol a = random_real_symbol(rng, 1 + i % 2, 3, 3, 3);
    const TorusSymbol b = random_real_symbol(rng, a.dim(), 3, 3, 3);
    if (!check_commutator_loss(a, b, std::array{1.0, 0.5, 0.1, 0.02}[i % 4], s, s1, s2).holds()) ++loss_viol;
  }
  int held = 0, prop_viol = 0;
  for (int i = 0; i < 60; ++i) {
    const int d = 1 + i % 2;
    std::vector<double> w{1.0};
    if (d == 2) w.push_back((std::sqrt(5.0) - 1) / 2);
    const TorusSymbol V = random_real_symbol(rng, d, 2, 2, 2);
    const TorusSymbol a = random_real_symbol(rng, d, 3, 2, 2);
    const double hbar = std::array{1.0, 0.5, 0.1}[i % 3];
    const LindstedtSeries s = lindstedt_terms(V, FrequencyVector(w), hbar, 3);
    const double t = std::array{0.001, 0.003, 0.01, 0.03}[i % 4];
    const ConjugationResult c = symbolic_conjugation(a, s, t, 1.0, 0.5);
    if (c.precondition_holds) {
      ++held;
      if (c.lhs > c.rhs * (1 + 1e-12)) ++prop_viol;
    }
  }
  r.pass = std::isfinite(cv) && cv <= 1 + 1e-12 && loss_viol == 0 && prop_viol == 0 && held > 0;
  r.detail = "max CV ratio " + fmt("%.4f", cv) + ", commutator-loss violations " + std::to_string(loss_viol) +
             "/200, propagator bound " + std::to_string(prop_viol) + " violations in " + std::to_string(held) +
             " admissible cases";
  return r;
}

template <class F>
CriterionResult timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = f();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace acceptance

// Runs the battery; `report` sees each result as it completes.
template <class Report>
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, Report&& report) {
  using namespace acceptance;
  const int workers = opt.workers > 0 ? opt.workers : worker_count();
  std::vector<CriterionResult> out;
  auto run = [&](const char* id, auto&& f) {
    CriterionResult r = timed(f);
    if (r.id.empty()) r.id = id;
    report(r);
    out.push_back(std::move(r));
  };
  run("1", [] { return tree_counts(); });
  run("2", [&] { return rational_identities(opt.seed); });
  run("3", [&] { return moyal_layer(opt.seed); });
  run("4", [&] { return omega_agreement(workers); });
  run("5", [&] { return eliasson(1.0, workers); });
  run("6", [&] { return lindstedt_cross(opt.seed); });
  run("7", [&] { return renormalization_order("7", cos_x_symbol(), workers); });
  run("7b", [&] { return renormalization_order("7b", mixed_symbol(), workers); });
  run("8", [] { return isospectrality(); });
  run("9", [] { return classical_order("9", cos_x_symbol()); });
  run("9b", [] { return classical_order("9b", mixed_symbol()); });
  run("10", [] { return measures(); });
  run("11", [&] { return norm_estimates(opt.seed); });
  return out;
}

inline std::string format_result(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "%s criterion %-3s ", r.pass ? "PASS" : "FAIL", r.id.c_str());
  return std::string(head) + r.title + " | " + r.detail + " [" + acceptance::fmt("%.1f s", r.seconds) + "]";
}

inline nlohmann::json acceptance_summary(const std::vector<CriterionResult>& rs, std::uint64_t seed) {
  nlohmann::json crit = nlohmann::json::array();
  bool all = true;
  for (auto& r : rs) {
    crit.push_back({{"id", r.id}, {"title", r.title}, {"status", r.pass ? "PASS" : "FAIL"}, {"detail", r.detail},
                    {"seconds", r.seconds}});
    all = all && r.pass;
  }
  return {{"seed", seed}, {"created", utc_timestamp()}, {"all_passed", all}, {"criteria", crit}};
}

}  // namespace qkam
