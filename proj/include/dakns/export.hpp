#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "dakns/dynamics.hpp"
#include "dakns/json_io.hpp"

namespace dakns {

// CSV layouts (indices i, j one-based, values as "p/q" or shortest round-trip decimals):
//   trajectory  step,time,n,i,j,value
//   matrix fn   n,i,j,value
//   series fn   n,degree,i,j,value

inline std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream out;
  out << "step,time,n,i,j,value\n";
  for (const auto& s : tr.snapshots) {
    const Window& w = s.U.window();
    for (int n = w.store_lo(); n <= w.store_hi(); ++n) {
      const Matrix<double>& u = s.U.at(n);
      for (int i = 0; i < u.dim(); ++i)
        for (int j = 0; j < u.dim(); ++j)
          out << s.step << ',' << format_scalar(s.time) << ',' << n << ',' << i + 1 << ',' << j + 1 << ','
              << format_scalar(u(i, j)) << '\n';
    }
  }
  return out.str();
}

/// One snapshot per JSON entry, U in the lattice encoding.
inline json trajectory_json(const Trajectory& tr) {
  json snaps = json::array();
  for (const auto& s : tr.snapshots)
    snaps.push_back({{"step", s.step}, {"time", format_scalar(s.time)}, {"U", lattice_to_json(s.U)}});
  return json{{"flow", {tr.flow.k, tr.flow.alpha + 1}},
              {"h", format_scalar(tr.h)},
              {"integrator", tr.integrator},
              {"max_leakage", tr.max_leakage},
              {"max_diagonal", tr.max_diagonal},
              {"warnings", tr.warnings},
              {"snapshots", std::move(snaps)}};
}

/// Rebuilds snapshots from trajectory CSV; `shape` supplies window, dimension and step.
inline std::vector<Snapshot> trajectory_from_csv(const std::string& text, const MatFn<double>& shape) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "step,time,n,i,j,value") throw input_error("trajectory CSV header missing");
  std::vector<Snapshot> out;
  const int m = shape.at(shape.window().store_lo()).dim();
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw input_error("trajectory CSV line " + std::to_string(lineno) + ": expected 6 fields");
    try {
      const int step = std::stoi(f[0]);
      if (out.empty() || out.back().step != step) {
        MatFn<double> U(shape.window(), Matrix<double>(m), Matrix<double>(m), Matrix<double>(m), shape.step());
        out.push_back({step, parse_scalar<double>(f[1]), std::move(U)});
      }
      const int n = std::stoi(f[2]), i = std::stoi(f[3]) - 1, j = std::stoi(f[4]) - 1;
      if (i < 0 || i >= m || j < 0 || j >= m) throw input_error("index out of range");
      out.back().U[n](i, j) = parse_scalar<double>(f[5]);
    } catch (const std::logic_error& e) {
      throw input_error("trajectory CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <Scalar T>
std::string matfn_csv(const MatFn<T>& f) {
  std::ostringstream out;
  out << "n,i,j,value\n";
  const Window& w = f.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) {
    const Matrix<T>& a = f.at(n);
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < a.dim(); ++j) out << n << ',' << i + 1 << ',' << j + 1 << ',' << format_scalar(a(i, j)) << '\n';
  }
  return out.str();
}

/// Sites from claim_lo to claim_hi, degrees over each stored band.
template <Scalar T>
std::string seriesfn_csv(const SeriesFn<T>& f, int n_lo, int n_hi) {
  std::ostringstream out;
  out << "n,degree,i,j,value\n";
  for (int n = n_lo; n <= n_hi; ++n) {
    const Series<T>& s = f.at(n);
    for (int d = s.hi(); d >= s.lo(); --d) {
      const Matrix<T> a = s.at(d);
      for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
          out << n << ',' << d << ',' << i + 1 << ',' << j + 1 << ',' << format_scalar(a(i, j)) << '\n';
    }
  }
  return out.str();
}

/// Dressing coefficients w_k as n,degree,i,j,value with degree = -k.
template <Scalar T>
std::string dressing_csv(const Dressing<T>& d) {
  std::ostringstream out;
  out << "n,degree,i,j,value\n";
  const Window& w = d.w.front().window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n)
    for (int k = 0; k <= d.N; ++k) {
      const Matrix<T>& a = d.w[static_cast<std::size_t>(k)].at(n);
      for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
          out << n << ',' << -k << ',' << i + 1 << ',' << j + 1 << ',' << format_scalar(a(i, j)) << '\n';
    }
  return out.str();
}

}  // namespace dakns
