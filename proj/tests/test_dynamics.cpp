#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "qkam/harness/acceptance.hpp"
#include "qkam/lindstedt/tree_expansion.hpp"

using namespace qkam;

namespace {

TorusSymbol cos_xi(double scale = 1.0) {
  TorusSymbol a(1);
  a.add({{0}, {1}}, 0.5 * scale);
  a.add({{0}, {-1}}, 0.5 * scale);
  return a;
}

double coeff_diff(const TorusSymbol& a, const TorusSymbol& b) { return analytic_norm(a - b, 0); }

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Cohomological, CosX) {
  const auto sol = solve_cohomological(cos_x_symbol(), FrequencyVector({1.0}));
  EXPECT_TRUE(sol.avg.empty());
  EXPECT_LT(std::abs(sol.F[Mode{{1}, {0}}] - Complex(0, -0.5)), 1e-16);
  EXPECT_LT(std::abs(sol.F[Mode{{-1}, {0}}] - Complex(0, 0.5)), 1e-16);
  EXPECT_EQ(sol.F.size(), 2u);
}

TEST(Cohomological, XIndependent) {
  const auto sol = solve_cohomological(cos_xi(), FrequencyVector({1.0}));
  EXPECT_TRUE(sol.F.empty());
  EXPECT_EQ(coeff_diff(sol.avg, cos_xi()), 0.0);
}

TEST(Cohomological, ProductModeAndBound) {
  TorusSymbol V(1);
  for (int k : {-1, 1})
    for (int m : {-1, 1}) V.add({{k}, {m}}, 0.25);
  const FrequencyVector one({1.0});
  const auto sol = solve_cohomological(V, one);
  // sin x cos xi
  for (int m : {-1, 1}) {
    EXPECT_LT(std::abs(sol.F[Mode{{1}, {m}}] - Complex(0, -0.25)), 1e-16);
    EXPECT_LT(std::abs(sol.F[Mode{{-1}, {m}}] - Complex(0, 0.25)), 1e-16);
  }
  EXPECT_LT(coeff_diff(transport_derivative(one, sol.F), V - sol.avg), 1e-16);
  const double varsigma = diophantine_estimate(one, 1.0, 16);
  EXPECT_LE(analytic_norm(sol.F, 0.75), cohomological_bound(V, 1.0, 0.25, varsigma, 1.0));
}

TEST(Cohomological, ResonantModeThrows) {
  TorusSymbol V(2);
  V.add({{1, 1}, {0, 0}}, 1.0);
  EXPECT_THROW(solve_cohomological(V, FrequencyVector({1.0, -1.0})), ResonantFrequencyError);
}

TEST(Lindstedt, XIndependentPotential) {
  const auto s = lindstedt_terms(cos_xi(), FrequencyVector({1.0}), 0.5, 4);
  for (int n = 1; n <= 4; ++n) EXPECT_TRUE(s.Hn(n).empty());
  EXPECT_EQ(coeff_diff(s.Rn(1), cos_xi()), 0.0);
  for (int n = 2; n <= 4; ++n) EXPECT_TRUE(s.Rn(n).empty());
}

TEST(Lindstedt, ResidualsRealityAndTreeAgreement) {
  const TorusSymbol V = mixed_symbol();
  const FrequencyVector one({1.0});
  const auto s = lindstedt_terms(V, one, 0.5, 4);
  for (int n = 1; n <= 4; ++n) {
    EXPECT_LE(cohomological_residual(s, V, n), 1e-11) << "n=" << n;
    EXPECT_TRUE(s.Hn(n).is_real());
    EXPECT_TRUE(s.Rn(n).is_real());
    EXPECT_TRUE(s.Rn(n).is_x_independent());
  }
  const auto tree = lindstedt_terms_tree(V, one, 0.5, 3);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_LE(coeff_diff(tree.Hn(n), s.Hn(n)), 1e-9 * std::max(1.0, analytic_norm(s.Hn(n), 0)));
    EXPECT_LE(coeff_diff(tree.Rn(n), s.Rn(n)), 1e-9 * std::max(1.0, analytic_norm(s.Rn(n), 0)));
  }
}

TEST(Lindstedt, TwoDimensionalTreeAgreement) {
  std::mt19937_64 rng(41);
  const TorusSymbol V = random_real_symbol(rng, 2, 2, 1, 1);
  const FrequencyVector w({1.0, (1 + std::sqrt(5.0)) / 2});
  for (double hbar : {0.0, 0.7}) {
    const auto a = lindstedt_terms(V, w, hbar, 3);
    const auto b = lindstedt_terms_tree(V, w, hbar, 3);
    for (int n = 1; n <= 3; ++n) EXPECT_LE(coeff_diff(a.Hn(n), b.Hn(n)), 1e-9 * std::max(1.0, analytic_norm(a.Hn(n), 0)));
  }
}

TEST(Counterterm, Cases) {
  const FrequencyVector one({1.0});
  const auto flat = lindstedt_terms(cos_xi(), one, 0.5, 1);
  EXPECT_TRUE(counterterm(flat, 0.0).empty());
  EXPECT_LT(coeff_diff(counterterm(flat, 0.3), 0.3 * cos_xi()), 1e-16);

  // R(t) against Simpson quadrature of R'(tau) = sum tau^{n-1} R'_n
  const auto s = lindstedt_terms(mixed_symbol(), one, 0.5, 3);
  const double t = 0.2;
  const int panels = 200;
  TorusSymbol q = s.Rn(1).like();
  for (int i = 0; i <= panels; ++i) {
    const double tau = t * i / panels;
    const double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
    TorusSymbol r = s.Rn(1).like();
    double p = 1;
    for (int n = 1; n <= s.orders(); ++n, p *= tau) r += p * s.Rn(n);
    q += (w * t / (3 * panels)) * r;
  }
  EXPECT_LT(coeff_diff(counterterm(s, t), q), 1e-13);
}

TEST(NormGrowth, XIndependentAndCosX) {
  const FrequencyVector one({1.0});
  const auto flat = norm_growth_report(lindstedt_terms(cos_xi(), one, 0.0, 3), cos_xi(), 1.0, 0.5);
  for (auto& r : flat.rows) EXPECT_EQ(r.h_norm, 0.0);
  EXPECT_NEAR(flat.rows[0].r_norm, analytic_norm(cos_xi(), 0.5), 1e-15);
  EXPECT_EQ(flat.rows[1].r_norm, 0.0);
  const auto rep = norm_growth_report(lindstedt_terms(cos_x_symbol(), one, 0.0, 5), cos_x_symbol(), 1.0, 0.5);
  ASSERT_EQ(rep.rows.size(), 5u);
  EXPECT_TRUE(std::isfinite(rep.empirical_C));
  EXPECT_GT(rep.empirical_C, 0.0);
}

TEST(Propagate, ZeroGenerator) {
  const auto path = propagate(TimePolynomial{{TorusSymbol(1)}}, 0.5, ModeBasis(1, 4), 0.3);
  EXPECT_TRUE(path.final().entries.isApprox(Eigen::MatrixXcd::Identity(9, 9)));
}

TEST(Propagate, DiagonalGenerator) {
  const double hbar = 0.3, t = 0.7;
  const ModeBasis basis(1, 6);
  PropagateOptions po;
  po.steps = 5;
  const auto U = propagate(TimePolynomial{{cos_xi()}}, hbar, basis, t, po).final().entries;
  for (int r = 0; r < basis.size(); ++r)
    for (int c = 0; c < basis.size(); ++c) {
      const int j = basis.mode(r)[0];
      const Complex want = r == c ? std::exp(Complex(0, -t / hbar * std::cos(hbar * j))) : Complex{};
      EXPECT_LT(std::abs(U(r, c) - want), 1e-12);
    }
}

TEST(Propagate, MidpointIsSecondOrder) {
  std::mt19937_64 rng(42);
  const TimePolynomial H{{random_real_symbol(rng, 1, 3, 2, 2), random_real_symbol(rng, 1, 3, 2, 2)}};
  const ModeBasis basis(1, 10);
  auto run = [&](int steps) {
    PropagateOptions po;
    po.steps = steps;
    return propagate(H, 0.5, basis, 0.1, po).final().entries;
  };
  const Eigen::MatrixXcd ref = run(1024);
  std::vector<double> dts, errs;
  for (int steps : {4, 8, 16, 32}) {
    dts.push_back(0.1 / steps);
    errs.push_back((run(steps) - ref).norm());
  }
  EXPECT_GE(loglog_slope(dts, errs), 1.9);
}

TEST(Propagate, AdjointEquationAtFiveNodes) {
  std::mt19937_64 rng(43);
  const double hbar = 0.5, t = 0.1;
  const int steps = 1000;
  const TimePolynomial H{{random_real_symbol(rng, 1, 3, 2, 2), random_real_symbol(rng, 1, 3, 2, 2)}};
  const ModeBasis basis(1, 8);
  const Eigen::MatrixXcd A = quantize(random_real_symbol(rng, 1, 3, 2, 2), hbar, basis).entries;
  PropagateOptions po;
  po.steps = steps;
  po.record_every = 1;
  const auto path = propagate(H, hbar, basis, t, po);
  ASSERT_EQ(path.unitaries.size(), static_cast<std::size_t>(steps + 1));
  auto conj = [&](int k) {
    const auto& U = path.unitaries[k].entries;
    return Eigen::MatrixXcd(U.adjoint() * A * U);
  };
  const double dt = t / steps;
  for (int k : {100, 300, 500, 700, 900}) {
    // hbar D_t X = -i hbar dX/dt
    const Eigen::MatrixXcd lhs = Complex(0, -hbar) * (conj(k + 1) - conj(k - 1)) / (2 * dt);
    const Eigen::MatrixXcd G = quantize(H.at(k * dt), hbar, basis).entries;
    const auto& U = path.unitaries[k].entries;
    const Eigen::MatrixXcd rhs = U.adjoint() * (G * A - A * G) * U;
    EXPECT_LT((lhs - rhs).norm(), 1e-6 * rhs.norm()) << "node " << k;
  }
}

TEST(Experiments, ConjugationResidualTrivialCases) {
  const FrequencyVector one({1.0});
  const TorusSymbol zero(1);
  EXPECT_LE(conjugation_residual(zero, lindstedt_terms(zero, one, 0.5, 2), 0.1, 0.5, 8), 1e-10);
  EXPECT_LE(conjugation_residual(cos_xi(), lindstedt_terms(cos_xi(), one, 0.5, 2), 0.1, 0.5, 8), 1e-12);
}

TEST(Experiments, SpectrumTrivialCases) {
  const FrequencyVector one({1.0});
  const auto s = lindstedt_terms(cos_x_symbol(), one, 0.5, 2);
  EXPECT_EQ(spectrum_check(cos_x_symbol(), s, 0.0, 0.5, 16).matched_fraction(), 1.0);
  const auto flat = lindstedt_terms(cos_xi(), one, 0.5, 2);
  EXPECT_EQ(spectrum_check(cos_xi(), flat, 0.05, 0.5, 16).matched_fraction(), 1.0);
}

TEST(Experiments, EgorovTrivialCases) {
  const FrequencyVector one({1.0});
  const TorusSymbol unit = TorusSymbol::constant(1, kTwoPi, 1.0);
  const auto q = lindstedt_terms(cos_x_symbol(), one, 0.5, 2);
  const auto c = lindstedt_terms(cos_x_symbol(), one, 0.0, 2);
  EXPECT_LE(egorov_residual(unit, q, c, 0.1, 0.5, 8).residual, 1e-10);
  const auto q0 = lindstedt_terms(cos_xi(), one, 0.5, 2);
  const auto c0 = lindstedt_terms(cos_xi(), one, 0.0, 2);
  EXPECT_LE(egorov_residual(cos_x_symbol(), q0, c0, 0.1, 0.5, 8).residual, 1e-10);
}

TEST(Experiments, EgorovVanishesWithHbar) {
  const TorusSymbol V = mixed_symbol();
  const FrequencyVector one({1.0});
  const auto c = lindstedt_terms(V, one, 0.0, 2);
  std::vector<double> hs{1.0, 0.5, 0.25, 0.125}, res;
  for (double h : hs) res.push_back(egorov_residual(cos_xi(), lindstedt_terms(V, one, h, 2), c, 0.1, h, 12).residual);
  EXPECT_GE(loglog_slope(hs, res), 0.9);
}

TEST(Classical, IdentityForXIndependentPotential) {
  const FrequencyVector one({1.0});
  const auto s = lindstedt_terms(cos_xi(), one, 0.0, 2);
  FlowOptions fo;
  fo.nx = fo.nxi = 8;
  const auto m = classical_flow(s, 0.1, fo);
  EXPECT_LE(m.sup_displacement, 1e-14);
  EXPECT_LE(classical_residual(m, cos_xi(), s, 0.1), 1e-10);
}

TEST(Classical, CosXShearsMomentum) {
  const auto s = lindstedt_terms(cos_x_symbol(), FrequencyVector({1.0}), 0.0, 1);
  FlowOptions fo;
  fo.nx = fo.nxi = 8;
  const double t = 0.2;
  const auto m = classical_flow(s, t, fo);
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    EXPECT_NEAR(m.images[i][0], m.points[i][0], 1e-10);
    EXPECT_NEAR(m.images[i][1], m.points[i][1] - t * std::cos(m.points[i][0]), 1e-10);
  }
  EXPECT_LE(classical_residual(m, cos_x_symbol(), s, t), 1e-10);
  EXPECT_LE(m.symplectic_residual, 1e-6);
}

TEST(Measures, PlaneWavesAtTimeZero) {
  const auto est = semiclassical_measure(cos_x_symbol(), FrequencyVector({1.0}), 2, 0.0, {cos_xi(), cos_x_symbol()},
                                         {0.1, 0.05});
  ASSERT_EQ(est.rows.size(), 2u);
  for (auto& r : est.rows) {
    EXPECT_NEAR(r.pairing[0], std::cos(r.xi0), 1e-10);
    EXPECT_NEAR(r.pairing[1], 0.0, 1e-10);
    EXPECT_NEAR(r.normalization, 1.0, 1e-10);
    EXPECT_NEAR(std::abs(r.eigenvalue - 1.0), std::abs(r.xi0 - 1.0), 1e-12);
  }
}

TEST(Measures, XIndependentPotentialMatchesHaar) {
  const auto est =
      semiclassical_measure(cos_xi(0.3), FrequencyVector({1.0}), 2, 0.05, {cos_xi(), cos_x_symbol()}, {0.1});
  EXPECT_LE(est.sup_deviation(), 1e-10);
}

TEST(SymbolicConjugation, TrivialCases) {
  std::mt19937_64 rng(44);
  const TorusSymbol a = random_real_symbol(rng, 1, 3, 2, 2);
  const std::vector<TorusSymbol> none{TorusSymbol(1), TorusSymbol(1)};
  EXPECT_EQ(coeff_diff(symbolic_conjugation(a, none, 0.1, 0.5, 1.0, 0.5).symbol, a), 0.0);
  const auto s = lindstedt_terms(cos_x_symbol(), FrequencyVector({1.0}), 0.5, 1);
  const auto r = symbolic_conjugation(a, s.H, 0.01, 0.5, 1.0, 0.5, 1);
  EXPECT_LT(coeff_diff(r.symbol, a + 0.01 * moyal_commutator(s.Hn(1), a, 0.5)), 1e-15);
  EXPECT_TRUE(r.precondition_holds);
  EXPECT_LE(r.lhs, r.rhs);
}

TEST(SymbolicConjugation, MatchesMatrixConjugation) {
  std::mt19937_64 rng(45);
  const TorusSymbol a = random_real_symbol(rng, 1, 3, 2, 2);
  const double hbar = 0.5;
  const int N = 3, J = 8;
  const auto s = lindstedt_terms(mixed_symbol(), FrequencyVector({1.0}), hbar, N);
  ExperimentOptions opt;
  opt.steps = 400;
  std::vector<double> ts = log_grid(0.01, 0.1, 4), err;
  for (double t : ts) {
    const TorusSymbol b = symbolic_conjugation(a, s.H, t, hbar, 1.0, 0.5).symbol;
    const ModeBasis basis(1, J + spreading_pad(s, a, t, hbar) + b.k_support());
    const Eigen::MatrixXcd U = reverse_propagator(s, t, hbar, basis, opt);
    const Eigen::MatrixXcd A = quantize(a, hbar, basis).entries;
    err.push_back(interior_norm(U * A * U.adjoint() - quantize(b, hbar, basis).entries, basis, J));
  }
  EXPECT_GE(loglog_slope(ts, err), N + 1 - 0.3);
}

TEST(Scenario, Validation) {
  const nlohmann::json good = {{"V", to_json(cos_x_symbol())}, {"omega", {1.0}}, {"orders", 2},
                               {"hbar", {0.5}},                {"t", {0.01, 0.1}}, {"J", 8}};
  EXPECT_NO_THROW(scenario_from_json(good));
  auto bad = good;
  bad.erase("V");
  EXPECT_THROW(scenario_from_json(bad), ValidationError);
  bad = good;
  bad["hbar"] = {0.0};
  EXPECT_THROW(scenario_from_json(bad), ValidationError);
  bad = good;
  bad["orders"] = 9;
  EXPECT_THROW(scenario_from_json(bad), ValidationError);
  bad = good;
  bad["t"] = nlohmann::json::array();
  EXPECT_THROW(scenario_from_json(bad), ValidationError);
  TorusSymbol V2(2);
  V2.add({{1, 0}, {0, 0}}, 0.5);
  V2.add({{-1, 0}, {0, 0}}, 0.5);
  bad = good;
  bad["V"] = to_json(V2);
  bad["omega"] = {1.0, -1.0};
  bad["gamma"] = 1.5;
  EXPECT_THROW(scenario_from_json(bad), ResonantFrequencyError);
}

TEST(Scenario, HashIgnoresOutputDirectory) {
  nlohmann::json j = {{"V", to_json(cos_x_symbol())}, {"omega", {1.0}}, {"hbar", {0.5}}, {"t", {0.1}}};
  const std::string h = scenario_hash(scenario_from_json(j));
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h, scenario_hash(scenario_from_json(j)));
  j["out_dir"] = "/tmp/elsewhere";
  EXPECT_EQ(h, scenario_hash(scenario_from_json(j)));
  j["t"] = {0.2};
  EXPECT_NE(h, scenario_hash(scenario_from_json(j)));
}

TEST(Scenario, CsvIsDeterministic) {
  const auto dir = std::filesystem::temp_directory_path() / "qkam_csv_test";
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name) {
    CsvWriter w(dir / name, "verify", "abc", 7, {"t", "hbar", "N"});
    for (int i = 1; i <= 3; ++i) w.cell(0.1 * i).cell(1.0 / 3).cell(i).end_row();
  };
  write("a.csv");
  write("b.csv");
  auto a = read_lines(dir / "a.csv"), b = read_lines(dir / "b.csv");
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a[0].rfind("# command=verify scenario=abc seed=7 created=", 0), 0u);
  EXPECT_EQ(std::vector<std::string>(a.begin() + 1, a.end()), std::vector<std::string>(b.begin() + 1, b.end()));
  EXPECT_EQ(a[1], "t,hbar,N");
  EXPECT_EQ(a[2], "1.000000000000e-01,3.333333333333e-01,1");
  std::filesystem::remove_all(dir);
}

TEST(Harness, ParallelMapPreservesOrder) {
  const auto out = parallel_map<int>(50, [](int i) { return i * i; }, 4);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(out[i], i * i);
}
