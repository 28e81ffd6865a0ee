#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specq/calibration.hpp"
#include "specq/io.hpp"
#include "specq/operators.hpp"
#include "specq/types.hpp"

namespace specq {

struct TaskSpec {
  std::string type;  // radius | spectrum | resolvent | gelfand | classify | properties | infimum-study
  std::string op;
  std::string calibration;
  std::string second;                     // properties only
  std::vector<std::string> calibrations;  // infimum-study only
  std::vector<Complex> lambdas;           // resolvent only
  std::vector<double> m_values;           // infimum-study, optional
  int terms = 0;                          // 0 = tolerance default
};

struct Scenario {
  std::string name;
  int dim = 0;
  std::vector<std::pair<std::string, Calibration>> calibrations;
  std::vector<std::pair<std::string, Operator>> operators;
  std::vector<TaskSpec> tasks;
  Tolerances tolerances;       // defaults merged with the scenario's override block
  Json tolerance_overrides;    // the override block as written, echoed into reports

  const Calibration* find_calibration(const std::string& name) const;
  const Operator* find_operator(const std::string& name) const;
};

struct ValidationIssue {
  std::string pointer;  // JSON pointer into the scenario document
  std::string message;
};

struct ParseResult {
  std::optional<Scenario> scenario;
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

ParseResult parse_scenario(const Json& doc);
ParseResult load_scenario(const std::string& path);

/// kind: triangular-nested | diagonal | shift | random-invariant; n <= 500.
/// Deterministic in (kind, n, seed) down to the emitted bytes.
Json generate_scenario(const std::string& kind, int n, std::uint64_t seed);

struct RunOptions {
  std::optional<double> tol_radius;
  std::optional<double> tol_neumann;
  std::optional<double> zero_relax;
  std::optional<int> max_terms;
};

struct TaskOutcome {
  int index = 0;
  std::string type;
  bool ok = true;
  std::string error;
  std::vector<std::string> files;
};

struct RunResult {
  std::vector<TaskOutcome> outcomes;
  int exit_code = 0;  // 0 all pass, 1 property failure or task error
};

RunResult run_scenario(const Scenario& scenario, const std::string& out_dir,
                       const RunOptions& options);

}  // namespace specq
