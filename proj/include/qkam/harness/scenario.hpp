#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qkam/lattice/symbol_io.hpp"

namespace qkam {

struct Tolerances {
  double residual_abs = 1e-10;       // floor on every residual check
  double residual_constant = 10.0;   // residual <= abs + constant * t^{N+1}
  double spectrum_constant = 10.0;   // eigenvalue match tolerance constant * t^{N+1}
  double measure = 0.05;             // sup deviation of measure pairings
};

struct Scenario {
  nlohmann::json source;  // as read, with the symbol inlined
  std::string symbol_path;
  TorusSymbol V;
  std::vector<double> omega;
  double gamma = 1.0;
  int orders = 2;
  std::vector<double> hbar;
  std::vector<double> t;
  int J = 16;
  int K_max = 64;
  int M_max = 64;
  Tolerances tol;
  std::uint64_t seed = 0;
  double measure_t = 0.05;
  double measure_hbar = 1.0 / 200;
  std::string out_dir;

  FrequencyVector frequency() const { return FrequencyVector(omega, gamma); }
};

namespace detail {

template <class T>
std::vector<T> nonempty_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("scenario is missing \"") + key + "\"");
  auto v = j.at(key).is_array() ? j.at(key).get<std::vector<T>>() : std::vector<T>{j.at(key).get<T>()};
  if (v.empty()) throw ValidationError(std::string("scenario grid \"") + key + "\" is empty");
  return v;
}

}  // namespace detail

// Scenario JSON: {"V": symbol object or path, "omega": [...], "gamma": g,
// "orders": N, "hbar": [...], "t": [...], "J": int} plus optional "K_max",
// "M_max", "seed", "tolerances", "measure_t", "measure_hbar", "out_dir".
inline Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  try {
    Scenario s;
    s.source = j;
    s.K_max = j.value("K_max", 64);
    s.M_max = j.value("M_max", 64);
    if (s.K_max < 1 || s.M_max < 0) throw ValidationError("K_max must be >= 1 and M_max >= 0");
    SymbolLimits lim;
    lim.k_max = s.K_max;
    lim.m_max = s.M_max;
    if (!j.contains("V")) throw ValidationError("scenario is missing \"V\"");
    if (j.at("V").is_string()) {
      std::filesystem::path p = j.at("V").get<std::string>();
      if (p.is_relative() && !base.empty()) p = base / p;
      s.symbol_path = p.string();
      s.V = load_symbol(s.symbol_path, lim);
      s.source["V"] = to_json(s.V);
    } else {
      s.V = symbol_from_json(j.at("V"), lim);
    }
    if (!s.V.is_real()) throw ValidationError("scenario potential V must be real");
    s.omega = detail::nonempty_list<double>(j, "omega");
    if (static_cast<int>(s.omega.size()) != s.V.dim()) throw ValidationError("omega length differs from symbol dimension");
    s.gamma = j.value("gamma", 1.0);
    if (!(s.gamma > s.V.dim() - 1)) throw ValidationError("Diophantine exponent gamma must exceed d-1");
    s.orders = j.value("orders", 2);
    if (s.orders < 1 || s.orders > 8) throw ValidationError("orders must lie in 1..8");
    s.hbar = detail::nonempty_list<double>(j, "hbar");
    for (double h : s.hbar)
      if (!(h > 0 && h <= 1)) throw ValidationError("hbar values must lie in (0, 1]");
    s.t = detail::nonempty_list<double>(j, "t");
    for (double t : s.t)
      if (!(t >= 0)) throw ValidationError("t values must be >= 0");
    s.J = j.value("J", 16);
    if (s.J < 1) throw ValidationError("J must be >= 1");
    s.seed = j.value("seed", std::uint64_t{0});
    s.measure_t = j.value("measure_t", 0.05);
    s.measure_hbar = j.value("measure_hbar", 1.0 / 200);
    if (!(s.measure_hbar > 0 && s.measure_hbar <= 1)) throw ValidationError("measure_hbar must lie in (0, 1]");
    if (j.contains("tolerances")) {
      auto& tj = j.at("tolerances");
      s.tol.residual_abs = tj.value("residual_abs", s.tol.residual_abs);
      s.tol.residual_constant = tj.value("residual_constant", s.tol.residual_constant);
      s.tol.spectrum_constant = tj.value("spectrum_constant", s.tol.spectrum_constant);
      s.tol.measure = tj.value("measure", s.tol.measure);
      if (!(s.tol.residual_abs > 0 && s.tol.residual_constant > 0 && s.tol.spectrum_constant > 0 && s.tol.measure > 0))
        throw ValidationError("tolerances must be positive");
    }
    s.out_dir = j.value("out_dir", std::string{});
    FrequencyVector check(s.omega, s.gamma);
    for_each_box_point(check.dim(), std::min(s.K_max, 8), [&](const IntVec& k) {
      if (check.resonant(k)) throw ResonantFrequencyError("omega is resonant at k = " + to_string(k, check.dim()));
    });
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scenario JSON: ") + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scenario JSON: ") + e.what());
  }
  return scenario_from_json(j, std::filesystem::path(path).parent_path());
}

// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON dump.
inline std::string scenario_hash(const Scenario& s) {
  nlohmann::json j = s.source;
  j.erase("out_dir");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Output directory: explicit argument, else $OUT_DIR, else ./out; one
// subdirectory per scenario hash.
inline std::filesystem::path run_directory(const std::string& root, const std::string& hash) {
  std::string base = root;
  if (base.empty())
    if (const char* env = std::getenv("OUT_DIR")) base = env;
  if (base.empty()) base = "out";
  std::filesystem::path dir = std::filesystem::path(base) / hash;
  std::filesystem::create_directories(dir);
  return dir;
}

inline int worker_count() {
  if (const char* env = std::getenv("WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(0..n-1) on a pool of worker threads; results land by index.
template <class R>
std::vector<R> parallel_map(int n, const std::function<R(int)>& f, int workers = worker_count()) {
  std::vector<R> out(n);
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (int i; (i = next++) < n;) {
        try {
          out[i] = f(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// CSV with a commented provenance header; the body is deterministic.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& command, const std::string& hash,
            std::uint64_t seed, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    out_ << "# command=" << command << " scenario=" << hash << " seed=" << seed << " created=" << utc_timestamp()
         << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  CsvWriter& cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return raw(buf);
  }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& cell(const std::string& v) { return raw(v); }

  void end_row() {
    out_ << "\n";
    first_ = true;
  }

 private:
  CsvWriter& raw(const std::string& s) {
    if (!first_) out_ << ",";
    out_ << s;
    first_ = false;
    return *this;
  }

  std::ofstream out_;
  bool first_ = true;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace qkam
