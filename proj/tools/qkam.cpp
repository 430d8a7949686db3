#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkam/harness/acceptance.hpp"
#include "qkam/harness/scenario.hpp"
#include "qkam/lattice/symbol_io.hpp"
#include "qkam/lindstedt/series.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qkam;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct AssertionFailure : NumericalError {
  using NumericalError::NumericalError;
  json failures;
};

// --emit takes a format keyword or, as in `verify --emit out/`, a directory.
struct EmitSpec {
  bool json = true;
  bool csv = true;
  std::string dir;
};

EmitSpec parse_emit(const std::string& v, const std::string& out) {
  EmitSpec e;
  e.dir = out;
  if (v.empty() || v == "both") return e;
  if (v == "json") {
    e.csv = false;
  } else if (v == "csv") {
    e.json = false;
  } else {
    e.dir = v;
  }
  return e;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("not an integer: " + item);
    }
  }
  return out;
}

// "1,-1,2" for d = 1, or "1:0,-1:1" with one ':'-separated block per node.
std::vector<IntVec> parse_weights(const std::string& s, int d) {
  std::vector<IntVec> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::replace(item.begin(), item.end(), ':', ',');
    const auto comps = parse_ints(item);
    if (static_cast<int>(comps.size()) != d) throw ValidationError("weight " + item + " does not have d components");
    IntVec v{};
    std::copy(comps.begin(), comps.end(), v.begin());
    out.push_back(v);
  }
  return out;
}

Rational parse_rational(const std::string& s) {
  try {
    return Rational(s);
  } catch (const std::exception&) {
    throw ValidationError("not a rational number: " + s);
  }
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json gaussian_json(const GaussianRational& z) { return {{"re", to_string(z.re)}, {"im", to_string(z.im)}}; }

struct RunContext {
  Scenario sc;
  std::string hash;
  fs::path dir;
  EmitSpec emit;

  json wrap(json body, const std::string& command) const {
    return {{"command", command}, {"scenario", hash}, {"seed", sc.seed}, {"created", utc_timestamp()},
            {"data", std::move(body)}};
  }
  CsvWriter csv(const std::string& name, const std::string& command, const std::vector<std::string>& cols) const {
    return CsvWriter(dir / name, command, hash, sc.seed, cols);
  }
};

RunContext open_run(const std::string& scenario_path, const EmitSpec& emit) {
  RunContext ctx;
  ctx.sc = load_scenario(scenario_path);
  ctx.hash = scenario_hash(ctx.sc);
  ctx.emit = emit;
  ctx.dir = run_directory(emit.dir.empty() ? ctx.sc.out_dir : emit.dir, ctx.hash);
  write_json(ctx.dir / "scenario.json", ctx.wrap(ctx.sc.source, "scenario"));
  return ctx;
}

// Series per hbar, computed on the worker pool.
std::vector<LindstedtSeries> series_grid(const Scenario& sc) {
  return parallel_map<LindstedtSeries>(static_cast<int>(sc.hbar.size()), [&](int i) {
    return lindstedt_terms(sc.V, sc.frequency(), sc.hbar[i], sc.orders);
  });
}

int cmd_trees(int n, bool count, int max_n, const EmitSpec& emit) {
  if (count) {
    if (max_n < 1 || max_n > 12) throw ValidationError("--max must lie in 1..12");
    std::cout << "n,count\n";
    json table = json::array();
    for (int k = 1; k <= max_n; ++k) {
      const auto c = enumerate_delta(k).size();
      std::cout << k << "," << c << "\n";
      table.push_back({{"n", k}, {"count", c}});
    }
    if (!emit.dir.empty()) {
      fs::create_directories(emit.dir);
      write_json(fs::path(emit.dir) / "tree_counts.json", table);
    }
    return 0;
  }
  if (n < 1 || n > 12) throw ValidationError("--n must lie in 1..12");
  json list = json::array();
  for (auto& t : enumerate_delta(n)) {
    std::vector<int> parent(n);
    for (int c = 1; c <= n; ++c) parent[c - 1] = t.parent(c);
    std::cout << delta_string(t.delta()) << " diameter=" << t.diameter() << " c=" << to_string(coefficient_c(t))
              << "\n";
    list.push_back({{"delta", t.delta()}, {"parent", parent}, {"diameter", t.diameter()},
                    {"c", to_string(coefficient_c(t))}, {"postorder", postorder_delta(t)}});
  }
  if (!emit.dir.empty()) {
    fs::create_directories(emit.dir);
    if (emit.json) write_json(fs::path(emit.dir) / ("trees_" + std::to_string(n) + ".json"), list);
    if (emit.csv) {
      std::ofstream out(fs::path(emit.dir) / ("trees_" + std::to_string(n) + ".csv"));
      out << "delta,diameter,c\n";
      for (auto& e : list) {
        std::string d;
        for (int x : e["delta"]) d += (d.empty() ? "" : " ") + std::to_string(x);
        out << d << "," << e["diameter"] << "," << e["c"].get<std::string>() << "\n";
      }
    }
  }
  return 0;
}

int cmd_omega(const std::string& delta_s, const std::string& v_s, const std::string& omega_s, bool exact) {
  const auto delta = parse_ints(delta_s);
  std::vector<double> w;
  std::vector<Rational> wq;
  {
    std::stringstream ss(omega_s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      wq.push_back(parse_rational(item));
      w.push_back(to_double(wq.back()));
    }
  }
  const int d = static_cast<int>(w.size());
  if (d < 1 || d > kMaxDim) throw ValidationError("--omega needs 1..3 components");
  const DecoratedTree dt(TreeIndexSet(delta), parse_weights(v_s, d), d);
  const FrequencyVector omega(w);
  const auto rec = omega_recursive(dt, omega);
  const ClassPartition P = partition_admissible(dt);
  json out = {{"delta", delta},
              {"omega1", complex_json(rec.omega1)},
              {"omega2", complex_json(rec.omega2)},
              {"resonance_sum", complex_json(omega1_resonance_sum(dt, omega))},
              {"class_sum", complex_json(omega1_class_sum(dt, P, ComplexArithmetic{omega}))},
              {"resonances", P.resonances.size()},
              {"admissible_families", P.admissible.size()},
              {"rho", P.classes.size()}};
  if (exact) {
    if (d != 1) throw ValidationError("--exact needs a scalar frequency");
    const auto ex = omega_recursive_exact(dt, wq[0]);
    out["exact"] = {{"omega1", gaussian_json(ex.omega1)}, {"omega2", gaussian_json(ex.omega2)}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_lindstedt(const std::string& scenario, const EmitSpec& emit, double s0, double sigma) {
  const RunContext ctx = open_run(scenario, emit);
  const auto series = series_grid(ctx.sc);
  json H = json::array(), R = json::array();
  std::optional<CsvWriter> csv;
  if (emit.csv)
    csv.emplace(ctx.csv("norms.csv", "lindstedt",
                        {"hbar", "n", "H_norm", "R_norm", "H_root", "R_root", "cohomological_residual"}));
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    json hs = json::array(), rs = json::array();
    for (int n = 1; n <= s.orders(); ++n) {
      hs.push_back(to_json(s.Hn(n)));
      rs.push_back(to_json(s.Rn(n)));
    }
    H.push_back({{"hbar", s.hbar}, {"H", hs}});
    R.push_back({{"hbar", s.hbar}, {"Rprime", rs}});
    if (csv) {
      const NormGrowthReport rep = norm_growth_report(s, ctx.sc.V, s0, sigma);
      for (auto& row : rep.rows) {
        csv->cell(s.hbar).cell(row.n).cell(row.h_norm).cell(row.r_norm).cell(row.h_root).cell(row.r_root);
        csv->cell(cohomological_residual(s, ctx.sc.V, row.n)).end_row();
      }
    }
  }
  if (emit.json) {
    write_json(ctx.dir / "Hn.json", ctx.wrap(H, "lindstedt"));
    write_json(ctx.dir / "Rn.json", ctx.wrap(R, "lindstedt"));
  }
  std::cout << ctx.dir.string() << "\n";
  return 0;
}

int cmd_renormalize(const std::string& scenario, const EmitSpec& emit, double s0) {
  const RunContext ctx = open_run(scenario, emit);
  const auto series = series_grid(ctx.sc);
  json out = json::array();
  std::optional<CsvWriter> csv;
  if (emit.csv) csv.emplace(ctx.csv("counterterm.csv", "renormalize", {"hbar", "t", "N", "R_norm", "H_norm"}));
  for (auto& s : series)
    for (double t : ctx.sc.t) {
      const TorusSymbol R = counterterm(s, t);
      const TorusSymbol H = generator_at(s, t);
      out.push_back({{"hbar", s.hbar}, {"t", t}, {"R", to_json(R)}, {"H", to_json(H)}});
      if (csv) csv->cell(s.hbar).cell(t).cell(s.orders()).cell(analytic_norm(R, s0)).cell(analytic_norm(H, s0)).end_row();
    }
  if (emit.json) write_json(ctx.dir / "counterterm.json", ctx.wrap(out, "renormalize"));
  std::cout << ctx.dir.string() << "\n";
  return 0;
}

void run_residuals(const RunContext& ctx, const std::vector<LindstedtSeries>& series, json& failures) {
  const Scenario& sc = ctx.sc;
  CsvWriter csv = ctx.csv("residuals.csv", "verify", {"t", "hbar", "N", "residual", "slope_window"});
  struct Cell {
    int h;
    double t;
  };
  std::vector<Cell> cells;
  for (int h = 0; h < static_cast<int>(series.size()); ++h)
    for (double t : sc.t) cells.push_back({h, t});
  const auto res = parallel_map<double>(static_cast<int>(cells.size()), [&](int i) {
    return conjugation_residual(sc.V, series[cells[i].h], cells[i].t, sc.hbar[cells[i].h], sc.J);
  });
  for (int h = 0; h < static_cast<int>(series.size()); ++h) {
    std::vector<double> ts, rs;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].h == h) {
        ts.push_back(cells[i].t);
        rs.push_back(res[i]);
      }
    const double slope = loglog_slope(ts, rs);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      csv.cell(ts[i]).cell(sc.hbar[h]).cell(sc.orders).cell(rs[i]);
      csv.cell(std::isfinite(slope) ? acceptance::fmt("%.6f", slope) : std::string("nan")).end_row();
      const double bound = sc.tol.residual_abs + sc.tol.residual_constant * std::pow(ts[i], sc.orders + 1);
      if (!(rs[i] <= bound))
        failures.push_back({{"check", "residual"}, {"hbar", sc.hbar[h]}, {"t", ts[i]}, {"value", rs[i]}, {"bound", bound}});
    }
  }
}

void run_spectra(const RunContext& ctx, const std::vector<LindstedtSeries>& series, json& failures) {
  const Scenario& sc = ctx.sc;
  CsvWriter csv = ctx.csv("spectra.csv", "spectra", {"hbar", "t", "N", "targets", "matched", "fraction", "tolerance"});
  for (std::size_t h = 0; h < series.size(); ++h)
    for (double t : sc.t) {
      const double tol = sc.tol.spectrum_constant * std::pow(t, sc.orders + 1) + series[h].truncation_tail() + 1e-10;
      const SpectrumResult r = spectrum_check(sc.V, series[h], t, sc.hbar[h], sc.J, tol);
      csv.cell(sc.hbar[h]).cell(t).cell(sc.orders).cell(r.targets).cell(r.matched).cell(r.matched_fraction());
      csv.cell(r.tolerance).end_row();
      if (r.matched_fraction() < 0.95)
        failures.push_back({{"check", "spectrum"}, {"hbar", sc.hbar[h]}, {"t", t}, {"value", r.matched_fraction()}});
    }
}

void run_measures(const RunContext& ctx, json& failures) {
  const Scenario& sc = ctx.sc;
  if (sc.V.dim() != 1) throw ValidationError("measure experiments support d = 1");
  CsvWriter csv = ctx.csv("measures.csv", "measures",
                          {"hbar", "t", "eigenvalue", "xi0", "test", "pairing", "reference", "deviation"});
  const auto tests = acceptance::measure_test_symbols();
  const MeasureEstimate est =
      semiclassical_measure(sc.V, sc.frequency(), sc.orders, sc.measure_t, tests, {sc.measure_hbar});
  for (auto& row : est.rows) {
    csv.cell(row.hbar).cell(sc.measure_t).cell(row.eigenvalue).cell(row.xi0).cell(std::string("identity"));
    csv.cell(row.normalization).cell(1.0).cell(std::abs(row.normalization - 1)).end_row();
    for (std::size_t i = 0; i < tests.size(); ++i) {
      csv.cell(row.hbar).cell(sc.measure_t).cell(row.eigenvalue).cell(row.xi0).cell("a" + std::to_string(i));
      csv.cell(row.pairing[i]).cell(row.reference[i]).cell(std::abs(row.pairing[i] - row.reference[i])).end_row();
    }
  }
  if (est.sup_deviation() > sc.tol.measure)
    failures.push_back({{"check", "measure"}, {"value", est.sup_deviation()}, {"bound", sc.tol.measure}});
}

int finish_checks(const RunContext& ctx, const json& failures, const std::string& command) {
  write_json(ctx.dir / (command + "_checks.json"),
             ctx.wrap({{"passed", failures.empty()}, {"failures", failures}}, command));
  std::cout << ctx.dir.string() << "\n";
  if (!failures.empty()) {
    AssertionFailure e(command + ": " + std::to_string(failures.size()) + " numerical check(s) failed");
    e.failures = failures;
    throw e;
  }
  return 0;
}

int cmd_verify(const std::string& scenario, const EmitSpec& emit, bool residuals, bool spectra, bool measures,
               const std::string& command) {
  const RunContext ctx = open_run(scenario, emit);
  json failures = json::array();
  if (residuals || spectra) {
    const auto series = series_grid(ctx.sc);
    if (residuals) run_residuals(ctx, series, failures);
    if (spectra) run_spectra(ctx, series, failures);
  }
  if (measures) run_measures(ctx, failures);
  return finish_checks(ctx, failures, command);
}

int cmd_suite(const std::string& scenario, const std::string& out) {
  AcceptanceOptions opt;
  std::string hash = "default";
  std::string root = out;
  if (!scenario.empty()) {
    const Scenario sc = load_scenario(scenario);
    opt.seed = sc.seed ? sc.seed : opt.seed;
    hash = scenario_hash(sc);
    if (root.empty()) root = sc.out_dir;
  }
  const auto results = run_acceptance(opt, [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; });
  json summary = acceptance_summary(results, opt.seed);
  summary["scenario"] = hash;
  const fs::path dir = run_directory(root, hash);
  write_json(dir / "summary.json", summary);
  std::cout << (dir / "summary.json").string() << "\n";
  return summary["all_passed"].get<bool>() ? 0 : kExitNumerical;
}

void report_error(const char* kind, const std::string& message, const json& extra = nullptr) {
  json e = {{"status", "error"}, {"kind", kind}, {"message", message}};
  if (!extra.is_null()) e["failures"] = extra;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum renormalization of transport operators on the torus"};
  app.require_subcommand(1);
  std::string out;
  app.add_option("--out", out, "Output root (default $OUT_DIR, else ./out)");

  int n = 4, max_n = 10;
  bool count = false;
  std::string emit_s;
  auto* trees = app.add_subcommand("trees", "Enumerate Delta(n)");
  trees->add_option("--n", n, "Tree size");
  trees->add_flag("--count", count, "Print #Delta(n) for n = 1..max");
  trees->add_option("--max", max_n, "Largest n for --count");
  trees->add_option("--emit", emit_s, "json|csv|both, or an output directory");

  std::string delta_s, v_s, omega_s = "1";
  bool exact = false;
  auto* omega = app.add_subcommand("omega", "Omega_1, Omega_2 of a decorated tree by three routes");
  omega->add_option("--delta", delta_s, "Children counts, e.g. 0,1,1")->required();
  omega->add_option("--v", v_s, "Node weights, e.g. 1,-1,1 or 1:0,0:1 for d = 2")->required();
  omega->add_option("--omega", omega_s, "Frequency components (rationals allowed for --exact)");
  omega->add_flag("--exact", exact, "Also evaluate in exact Gaussian rationals (d = 1)");

  std::string scenario;
  double s0 = 1.0, sigma = 0.5;
  auto add_scenario = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--scenario", scenario, "Scenario JSON");
    if (required) opt->required();
    sub->add_option("--emit", emit_s, "json|csv|both, or an output directory");
  };
  auto* lind = app.add_subcommand("lindstedt", "Lindstedt coefficients H_n, R'_n per hbar");
  add_scenario(lind);
  lind->add_option("--s0", s0, "Analyticity width for the norm table");
  lind->add_option("--sigma", sigma, "Width loss for the norm table");
  auto* renorm = app.add_subcommand("renormalize", "Counterterm R(t) and generator H(t) on the scenario grid");
  add_scenario(renorm);
  renorm->add_option("--s0", s0, "Analyticity width for reported norms");
  auto* verify = app.add_subcommand("verify", "Residuals, spectra and measures for a scenario");
  add_scenario(verify);
  auto* spectra = app.add_subcommand("spectra", "Eigenvalue matching for a scenario");
  add_scenario(spectra);
  auto* measures = app.add_subcommand("measures", "Semiclassical measure pairings for a scenario");
  add_scenario(measures);
  auto* suite = app.add_subcommand("suite", "Full acceptance battery");
  add_scenario(suite, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("validation", e.what());
    return kExitValidation;
  }

  try {
    const EmitSpec emit = parse_emit(emit_s, out);
    if (*trees) return cmd_trees(n, count, max_n, emit);
    if (*omega) return cmd_omega(delta_s, v_s, omega_s, exact);
    if (*lind) return cmd_lindstedt(scenario, emit, s0, sigma);
    if (*renorm) return cmd_renormalize(scenario, emit, s0);
    if (*verify) return cmd_verify(scenario, emit, true, true, true, "verify");
    if (*spectra) return cmd_verify(scenario, emit, false, true, false, "spectra");
    if (*measures) return cmd_verify(scenario, emit, false, false, true, "measures");
    if (*suite) return cmd_suite(scenario, emit.dir);
  } catch (const AssertionFailure& e) {
    report_error("numerical", e.what(), e.failures);
    return kExitNumerical;
  } catch (const ValidationError& e) {
    report_error("validation", e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    report_error("numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    report_error("numerical", e.what());
    return kExitNumerical;
  }
  return 0;
}
