#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "qkam/lattice/symbol.hpp"

namespace qkam {

inline nlohmann::json to_json(const TorusSymbol& a) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (auto& [w, c] : a.coeffs()) {
    std::vector<int> k(w.k.begin(), w.k.begin() + a.dim());
    std::vector<int> m(w.m.begin(), w.m.begin() + a.dim());
    coeffs.push_back({{"k", k}, {"m", m}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"d", a.dim()}, {"L", a.period()}, {"real", a.is_real()}, {"coeffs", coeffs}};
}

inline TorusSymbol symbol_from_json(const nlohmann::json& j, SymbolLimits limits = {}) {
  try {
    const int d = j.at("d").get<int>();
    const double L = j.value("L", kTwoPi);
    TorusSymbol a(d, L, limits);
    std::set<Mode> seen;
    for (auto& e : j.at("coeffs")) {
      auto k = e.at("k").get<std::vector<int>>();
      auto m = e.value("m", std::vector<int>(d, 0));
      if (static_cast<int>(k.size()) != d || static_cast<int>(m.size()) != d)
        throw ValidationError("coefficient index length differs from d");
      Mode w;
      std::copy(k.begin(), k.end(), w.k.begin());
      std::copy(m.begin(), m.end(), w.m.begin());
      if (!seen.insert(w).second) throw ValidationError("duplicate (k,m) entry in symbol");
      if (!a.in_box(w)) throw ValidationError("coefficient outside K_max/M_max box");
      a.add(w, Complex(e.value("re", 0.0), e.value("im", 0.0)));
    }
    if (j.value("real", false) && !a.is_real())
      throw ValidationError("symbol flagged real but coefficients are not conjugate-symmetric");
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed symbol JSON: ") + e.what());
  }
}

inline TorusSymbol load_symbol(const std::string& path, SymbolLimits limits = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open symbol file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed symbol JSON: ") + e.what());
  }
  return symbol_from_json(j, limits);
}

inline void save_symbol(const TorusSymbol& a, const std::string& path) {
  std::ofstream out(path);
  out << to_json(a).dump(2) << "\n";
}

}  // namespace qkam
