#pragma once

#include "sboi/analytic.hpp"
#include "sboi/lattice.hpp"
#include "sboi/metrology.hpp"
#include "sboi/noise.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sboi::scan {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "sboi 1.0.0";

/// Times in Bloch periods. With `refine_revivals` every stretch within
/// 0.05 of an integer gets five times the base density.
struct TimeGrid {
  double start = 5.5;
  double stop = 7.5;
  int points = 201;
  bool refine_revivals = false;

  std::vector<double> times() const;
};

struct SigmaGrid {
  double time = 7.0;  // Bloch periods
  double start = 0.1;
  double stop = 3.0;
  int points = 30;

  std::vector<double> values() const;
};

/// One width curve of a noise scan.
struct NoiseCase {
  double relative_sigma = 0.0;  // sigma_J / J0
  double lambda = 0.0;          // detector resolution
};

struct DesignInputs {
  double tau = 1.0;       // s
  double mass_u = 39.0;   // atomic mass units
  std::int64_t atom_number = 10000;
};

struct PhysicalInputs {
  double mass_u = 39.0;
  double acceleration = constants::standard_gravity;  // m/s^2
  double spacing = 1e-6;                               // m
};

/// J/delta and N, optionally with the SI lattice behind them. Physical inputs
/// add SI Delta g columns to time scans.
struct ScenarioSpec {
  double hopping_ratio = 1.0;
  std::int64_t atom_number = 40000;
  std::optional<PhysicalInputs> physical;

  LatticeParams lattice() const;
};

/// Resolved scan configuration. Parsed from a JSON document carrying
/// `schema_version`; every omitted key takes the default listed in README.
struct ScanConfig {
  ScenarioSpec scenario;
  double initial_sigma = 0.0;  // 0 selects the single-site start
  TimeGrid time_grid;
  std::vector<Protocol> protocols{Protocol::qfi, Protocol::ml, Protocol::width};
  WidthVarianceMode width_mode = WidthVarianceMode::approximate;
  int nu = 1;
  int quadrature_order = 21;
  std::vector<NoiseCase> noise_cases;
  SigmaGrid sigma_grid;
  DesignInputs design;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  static ScanConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Reads and validates a configuration file. IoError when unreadable,
/// ConfigError on malformed or invalid content.
ScanConfig load_config(const std::filesystem::path& path);

/// Plot-ready output: one row per grid point, +infinity allowed.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::json scenario;  // resolved configuration echo
  std::string tool_version{kToolVersion};
};

ResultTable run_time_scan(const ScanConfig& config, int threads = 1);
ResultTable run_sigma_scan(const ScanConfig& config, const SigmaGrid& grid, int threads = 1);
ResultTable run_noise_scan(const ScanConfig& config, int threads = 1);
ResultTable run_design_report(const DesignInputs& inputs);

enum class Format { csv, json };

Format parse_format(std::string_view name);

/// CSV: `# tool` and `# config` comment lines, one header row, then data.
/// JSON: {"tool_version", "scenario", "columns", "rows"}. Numbers carry 17
/// significant digits; infinities are written as "inf".
std::string render(const ResultTable& table, Format format);

/// Writes render(table, format) to `path`; IoError names the path on failure.
void emit(const ResultTable& table, Format format, const std::filesystem::path& path);

}  // namespace sboi::scan
