#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "godel/catalog.hpp"

namespace godel {

/// start:stop:count
struct GridSpec {
  double start = 0.0, stop = 0.0;
  int count = 0;

  /// Throws ConfigError on malformed text; count may be 0 only when allow_empty.
  static GridSpec parse(std::string_view text, bool allow_empty = false);
  std::vector<double> points() const;
  std::string str() const;
};

struct ScanSpec {
  std::string entry;  ///< catalog id, optionally with variant: "PAR-4:reparametrized"
  std::string param;  ///< m, mu, omega, alpha, lambda, rho, k, c, theta, theta0, kappa, k1, k2, eps
  GridSpec range;
};

struct RunConfig {
  std::string profile;
  GridSpec r{0.8, 1.6, 16};
  /// Non-radial u-directions span [start, stop]; count is points per axis.
  GridSpec box{-0.5, 0.5, 5};
  Tolerances tol;
  std::vector<std::string> entries;
  std::string out;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string format = "table";
  std::optional<ScanSpec> scan;
  std::optional<std::array<double, 4>> coeffs;

  /// Defaults, then the JSON document, with GODEL_GEO_TOL_SCALE applied last.
  /// Throws ConfigError with the line of the offending text.
  static RunConfig from_json(std::string_view text);
  Window window() const { return {r.start, r.stop}; }
  nlohmann::json to_json() const;
};

struct CheckRecord {
  std::string name;
  std::string reference;  ///< quoted anchor, or "plumbing"
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

struct Report {
  std::string command;
  std::string profile;
  std::vector<CheckRecord> records;
  /// Command-specific payload (certificates, manifest, adjudication, classification).
  nlohmann::json payload = nlohmann::json::object();
  /// Scan output; empty for other commands.
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t passed() const;
  std::size_t failed() const;
  std::size_t skipped() const;
  /// 0 iff every non-skipped record passed.
  int exit_code() const { return failed() == 0 ? 0 : 1; }

  nlohmann::json to_json() const;
  std::string to_table() const;
  std::string to_csv() const;
  /// format is json, csv or table.
  std::string render(std::string_view format) const;
};

Report cmd_verify_geometry(const RunConfig& cfg);
Report cmd_certify_catalog(const RunConfig& cfg);
Report cmd_scan(const RunConfig& cfg);
Report cmd_classify_normal(const RunConfig& cfg, const std::array<double, 4>& coeffs);

/// Dispatches on verify-geometry, certify-catalog, scan, classify-normal.
Report run_command(std::string_view command, const RunConfig& cfg);

/// Locale-independent number formatting used by every report.
std::string format_number(double x);

}  // namespace godel
