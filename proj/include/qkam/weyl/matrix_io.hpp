#pragma once

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "qkam/weyl/quantize.hpp"

namespace qkam {

inline nlohmann::json to_json(const OperatorMatrix& op) {
  const auto n = op.entries.rows();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < n; ++r) {
    std::vector<double> rr(n), ii(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      rr[c] = op.entries(r, c).real();
      ii[c] = op.entries(r, c).imag();
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"J", op.J()}, {"d", op.basis.dim()}, {"hbar", op.hbar}, {"re", re}, {"im", im}};
}

inline OperatorMatrix matrix_from_json(const nlohmann::json& j) {
  const int J = j.at("J").get<int>();
  const int d = j.value("d", 1);
  OperatorMatrix op{ModeBasis(d, J), j.at("hbar").get<double>()};
  const int n = op.basis.size();
  auto& re = j.at("re");
  auto& im = j.at("im");
  if (static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n)
    throw ValidationError("matrix JSON size does not match J");
  op.entries.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) op.entries(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
  op.refresh_tags();
  return op;
}

inline constexpr char kMatrixMagic[8] = {'W', 'E', 'Y', 'L', 'M', 'A', 'T', '1'};

// Layout: magic[8], int32 d, int32 J, float64 hbar, int64 n, then n*n
// (re, im) float64 pairs in column-major order. Host byte order.
inline void save_matrix_binary(const OperatorMatrix& op, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  const std::int32_t d = op.basis.dim(), J = op.J();
  const std::int64_t n = op.entries.rows();
  out.write(kMatrixMagic, 8);
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  out.write(reinterpret_cast<const char*>(&J), sizeof J);
  out.write(reinterpret_cast<const char*>(&op.hbar), sizeof op.hbar);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(op.entries.data()), static_cast<std::streamsize>(n * n * sizeof(Complex)));
}

inline OperatorMatrix load_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0) throw ValidationError("bad matrix file magic");
  std::int32_t d = 0, J = 0;
  double hbar = 0;
  std::int64_t n = 0;
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  in.read(reinterpret_cast<char*>(&J), sizeof J);
  in.read(reinterpret_cast<char*>(&hbar), sizeof hbar);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  OperatorMatrix op{ModeBasis(d, J), hbar};
  if (n != op.basis.size()) throw ValidationError("matrix file size does not match J");
  op.entries.resize(n, n);
  in.read(reinterpret_cast<char*>(op.entries.data()), static_cast<std::streamsize>(n * n * sizeof(Complex)));
  if (!in) throw ValidationError("truncated matrix file");
  op.refresh_tags();
  return op;
}

}  // namespace qkam
