#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opdyn/serialize.hpp"

namespace opdyn {

/// Config does not match the schema (exit code 2).
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested horizons exceed the built-in caps (exit code 4).
class ResourceCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kMaxHorizon = 20'000'000;

struct TargetSpec {
  std::string vector;
  double eps = 0.0;
};

/// Scenario configuration. Unset fields take the scenario's defaults.
struct ExperimentConfig {
  std::string scenario;
  std::optional<std::string> side;
  std::optional<std::string> weights;
  std::optional<std::complex<double>> premult;
  std::optional<std::string> scaling;
  std::vector<TargetSpec> targets;
  std::optional<std::int64_t> N, K, N0, n_max, gap, tau, q, m;
  std::vector<std::int64_t> orders;
  std::optional<double> eps, tol, cap, G, eps_rel, a, density_tol;
  std::vector<std::string> symbols;
  std::string report_path;
  std::string csv_dir;
};

/// Strict parse: unknown keys and wrong types raise SchemaError.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  json doc;
  std::vector<Assertion> assertions;
  /// (file name, contents) pairs written next to the report.
  std::vector<std::pair<std::string, std::string>> csv_files;

  bool passed() const;
  std::vector<std::string> failed() const;
  /// Pretty-printed JSON with a trailing newline; byte-stable for equal inputs.
  std::string render() const;
};

/// Runs E1..E7. Results do not depend on the worker count.
Report run_scenario(const ExperimentConfig& cfg, int workers = 0);
/// Writes the report to cfg.report_path (if set) and CSVs into cfg.csv_dir (if set).
void write_outputs(const Report& r, const ExperimentConfig& cfg);

struct VerifyOutcome {
  std::vector<Assertion> checks;
  bool ok() const;
};

/// Re-derives every embedded certificate from its echoed inputs.
VerifyOutcome verify_report(const json& doc, int workers = 0);

}  // namespace opdyn
