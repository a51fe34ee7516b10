#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "dakns/json_io.hpp"

namespace dakns {

inline constexpr const char* kVersion = "0.1.0";

struct CheckEntry {
  std::string check;
  json parameters = json::object();
  std::string residual;
  std::string threshold;
  std::string mode;
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::vector<CheckEntry> checks;
  std::string config_hash;
  std::uint64_t seed = 0;

  bool verdict() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.pass ? 0 : 1;
    return n;
  }
};

inline const char* verdict_name(bool pass) { return pass ? "pass" : "fail"; }

inline json to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"check", c.check},
                      {"parameters", c.parameters},
                      {"residual", c.residual},
                      {"threshold", c.threshold},
                      {"mode", c.mode},
                      {"verdict", verdict_name(c.pass)}});
  return json{{"suite", r.suite},
              {"verdict", verdict_name(r.verdict())},
              {"provenance", {{"config_hash", r.config_hash}, {"version", kVersion}, {"seed", r.seed}}},
              {"checks", std::move(checks)}};
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

/// Columns: check,parameters,residual,threshold,mode,verdict.
inline std::string report_csv(const VerificationReport& r) {
  std::ostringstream out;
  out << "check,parameters,residual,threshold,mode,verdict\n";
  for (const auto& c : r.checks)
    out << detail::csv_field(c.check) << ',' << detail::csv_field(c.parameters.dump()) << ','
        << detail::csv_field(c.residual) << ',' << detail::csv_field(c.threshold) << ',' << c.mode << ','
        << verdict_name(c.pass) << '\n';
  return out.str();
}

/// Rejects documents that do not follow the report schema.
inline void validate_report_json(const json& j) {
  for (const char* k : {"suite", "verdict", "provenance", "checks"})
    if (!j.contains(k)) throw input_error(std::string("report lacks '") + k + "'");
  bool all = true;
  for (const auto& c : j.at("checks")) {
    for (const char* k : {"check", "parameters", "residual", "threshold", "mode", "verdict"})
      if (!c.contains(k)) throw input_error(std::string("report check lacks '") + k + "'");
    all = all && c.at("verdict") == "pass";
  }
  if (j.at("verdict") != verdict_name(all)) throw input_error("report verdict is not the conjunction of its checks");
}

}  // namespace dakns
