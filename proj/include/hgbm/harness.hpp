#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hgbm/simulation.hpp"
#include "hgbm/statistics.hpp"

namespace hgbm {

class RunError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string scenario = "simulate";
  int n = 4;
  int k = 2;
  double T = 1.0;
  double dt = 1e-3;
  long paths = 100;
  std::uint64_t seed = 1;
  Route route = Route::zeta;
  double alpha = 0.0;
  // Start w0 with w0(j, j) = sqrt(lambda0_j); empty means the origin.
  std::vector<double> lambda0;
  unsigned threads = 0;  // 0: hardware concurrency
  double max_failure_fraction = 0.01;
  int max_halvings = 20;
  int jmax = 5000;
  double series_tolerance = 1e-4;

  // Throws ConfigError: dt > 0, T >= dt (or T = 0 for the initial-value table), paths >= 1.
  void validate() const;
  PathConfig path_config() const;
};

struct PathRow {
  long path_id = 0;
  PathResult result;
  double girsanov = 1.0;
};

struct RunTable {
  RunConfig config;
  std::vector<PathRow> rows;  // one per path, in path order
  long failures = 0;

  double failure_fraction() const;
  // Values of a column over the rows with status ok, e.g. "trace_integral", "area_im",
  // "theta", "varrho", "girsanov", "lambda_1".
  std::vector<double> column(const std::string& name) const;
};

// Runs config.paths independent paths on a thread pool. Path p uses PathRng(seed, p), so the
// table does not depend on scheduling. Throws RunError when more than max_failure_fraction
// of the paths failed.
RunTable run_paths(const RunConfig& config);

// Columns path_id,status,T,dt,trace_integral,area_im,theta,varrho,girsanov,lambda_1..lambda_k;
// reals as %.17g.
void write_csv(std::ostream& out, const RunTable& table);

struct CriterionResult {
  std::string name;
  double target = 0.0;
  double estimate = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct StatReport {
  RunConfig config;
  std::vector<CriterionResult> criteria;
  double runtime_seconds = 0.0;
  RunTable table;  // per-path data the verdicts were computed from (empty for non-MC suites)

  bool all_pass() const;
};

// {config, criteria: [{name, target, estimate, tolerance, verdict}], runtime_seconds, seed}.
// Without runtime the output depends only on the configuration.
std::string report_json(const StatReport& report, bool include_runtime = true);

// MC estimate of E[exp(-2 alpha^2 int_0^T tr J)] against the rank-one series (k = 1, start at
// the origin) and the determinantal formula, plus the Girsanov mean check.
StatReport verify_laplace(const RunConfig& config);

// (1/T) int tr J in [0.85 k, k]; area / sqrt(T) against N(0, k); theta / sqrt(T) against N(0, 2k).
StatReport verify_limits(const RunConfig& config);

CriterionResult ks_criterion(const std::string& name, const KsResult& ks);
CriterionResult mean_criterion(const std::string& name, const MeanEstimate& m, double target, double n_se);

}  // namespace hgbm
