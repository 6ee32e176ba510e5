#include "hgbm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "hgbm/errors.hpp"
#include "hgbm/kernels.hpp"
#include "hgbm/spectral_flow.hpp"

namespace hgbm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double row_value(const PathRow& row, const std::string& name) {
  const FunctionalAccumulators& a = row.result.acc;
  if (name == "trace_integral") return a.trace_integral;
  if (name == "area_im") return a.area_im;
  if (name == "theta") return a.theta;
  if (name == "varrho") return a.varrho;
  if (name == "girsanov") return row.girsanov;
  if (name == "min_gap") return row.result.min_gap;
  if (name.rfind("lambda_", 0) == 0) {
    const int j = std::stoi(name.substr(7));
    if (j < 1 || j > row.result.lambda.size()) throw ConfigError("column: no eigenvalue " + name);
    return row.result.lambda(j - 1);
  }
  throw ConfigError("column: unknown column '" + name + "'");
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"scenario", c.scenario}, {"n", c.n},         {"k", c.k},         {"T", c.T},
          {"dt", c.dt},             {"paths", c.paths}, {"seed", c.seed},   {"route", route_name(c.route)},
          {"alpha", c.alpha},       {"lambda0", c.lambda0}};
}

}  // namespace

void RunConfig::validate() const {
  if (n < 2 || k < 1 || k > n - k) throw ConfigError("RunConfig: need 1 <= k <= n - k");
  if (!(dt > 0.0)) throw ConfigError("RunConfig: dt must be positive");
  if (!(T == 0.0 || T >= dt)) throw ConfigError("RunConfig: T must be 0 or at least dt");
  if (paths < 1) throw ConfigError("RunConfig: paths must be at least 1");
  if (!(alpha >= 0.0)) throw ConfigError("RunConfig: alpha must be nonnegative");
  if (lambda0.size() > static_cast<std::size_t>(k)) throw ConfigError("RunConfig: too many start eigenvalues");
  for (double l : lambda0)
    if (!(l >= 0.0 && l < 1.0)) throw ConfigError("RunConfig: start eigenvalues must lie in [0, 1)");
}

PathConfig RunConfig::path_config() const {
  PathConfig p;
  p.n = n;
  p.k = k;
  p.T = T;
  p.dt = dt;
  p.route = route;
  p.max_halvings = max_halvings;
  p.w0 = Matrix::Zero(n - k, k);
  for (std::size_t j = 0; j < lambda0.size(); ++j) p.w0(j, j) = std::sqrt(lambda0[j]);
  return p;
}

double RunTable::failure_fraction() const {
  return rows.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(rows.size());
}

std::vector<double> RunTable::column(const std::string& name) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const PathRow& row : rows)
    if (row.result.status == PathStatus::ok) out.push_back(row_value(row, name));
  return out;
}

RunTable run_paths(const RunConfig& config) {
  config.validate();
  const PathConfig pc = config.path_config();
  RunTable table;
  table.config = config;
  table.rows.resize(config.paths);
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long p = next++; p < config.paths; p = next++) {
      PathRow& row = table.rows[p];
      row.path_id = p;
      row.result = simulate_path(pc, config.seed, static_cast<std::uint64_t>(p));
      row.girsanov = girsanov_martingale(row.result.acc, config.alpha, config.n, config.k);
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<long>(threads, config.paths));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const PathRow& row : table.rows)
    if (row.result.status == PathStatus::failed) ++table.failures;
  if (table.failure_fraction() > config.max_failure_fraction)
    throw RunError("run_paths: " + std::to_string(table.failures) + " of " + std::to_string(config.paths) +
                   " paths failed");
  return table;
}

void write_csv(std::ostream& out, const RunTable& table) {
  out << "path_id,status,T,dt,trace_integral,area_im,theta,varrho,girsanov";
  for (int j = 1; j <= table.config.k; ++j) out << ",lambda_" << j;
  out << '\n';
  for (const PathRow& row : table.rows) {
    const bool ok = row.result.status == PathStatus::ok;
    const FunctionalAccumulators& a = row.result.acc;
    out << row.path_id << ',' << (ok ? "ok" : "failed") << ',' << format_real(table.config.T) << ','
        << format_real(table.config.dt);
    for (double v : {a.trace_integral, a.area_im, a.theta, a.varrho, row.girsanov})
      out << ',' << (ok ? format_real(v) : "nan");
    for (int j = 0; j < table.config.k; ++j)
      out << ',' << (ok && j < row.result.lambda.size() ? format_real(row.result.lambda(j)) : "nan");
    out << '\n';
  }
}

bool StatReport::all_pass() const {
  for (const CriterionResult& c : criteria)
    if (!c.pass) return false;
  return true;
}

std::string report_json(const StatReport& report, bool include_runtime) {
  nlohmann::json j;
  j["config"] = config_json(report.config);
  j["criteria"] = nlohmann::json::array();
  for (const CriterionResult& c : report.criteria)
    j["criteria"].push_back({{"name", c.name},
                             {"target", c.target},
                             {"estimate", c.estimate},
                             {"tolerance", c.tolerance},
                             {"verdict", c.pass ? "pass" : "fail"},
                             {"detail", c.detail}});
  if (include_runtime) j["runtime_seconds"] = report.runtime_seconds;
  j["seed"] = report.config.seed;
  return j.dump(2);
}

CriterionResult ks_criterion(const std::string& name, const KsResult& ks) {
  return {name, 0.0, ks.statistic, ks.critical_1, ks.pass_1(),
          "KS statistic vs 1% critical value, " + std::to_string(ks.n) + " samples"};
}

CriterionResult mean_criterion(const std::string& name, const MeanEstimate& m, double target, double n_se) {
  const double tol = n_se * m.std_error;
  return {name, target, m.mean, tol, std::abs(m.mean - target) <= tol,
          "mean +- " + std::to_string(n_se) + " standard errors (se " + format_real(m.std_error) + ")"};
}

StatReport verify_laplace(const RunConfig& config) {
  const auto start = Clock::now();
  StatReport report;
  report.config = config;
  report.table = run_paths(config);
  const RunTable& table = report.table;
  const double a2 = 2.0 * config.alpha * config.alpha;
  std::vector<double> laplace;
  for (double v : table.column("trace_integral")) laplace.push_back(std::exp(-a2 * v));
  const MeanEstimate mc = mean_estimate(laplace);

  // Start eigenvalues as the simulation sees them (spread applied), in the rho chart.
  SpectralState lambda_start{RealVector::Zero(config.k), Chart::lambda, 0.0};
  for (std::size_t j = 0; j < config.lambda0.size(); ++j) lambda_start.values(j) = config.lambda0[j];
  std::sort(lambda_start.values.data(), lambda_start.values.data() + config.k, std::greater<>());
  RealVector rho0 = chart_convert(spread_start(lambda_start), Chart::rho).values;
  // The determinantal route needs rho > 1; the formula is continuous at the boundary.
  for (Eigen::Index j = config.k - 1; j >= 0; --j) {
    const double floor = 1.0 + 1e-6 * (config.k - j);
    if (rho0(j) < floor) rho0(j) = floor;
  }

  if (config.alpha == 0.0) {
    report.criteria.push_back({"laplace: MC at alpha = 0", 1.0, mc.mean, 0.0, mc.mean == 1.0, "exp(0) on every path"});
  } else if (config.k == 1 && config.lambda0.empty()) {
    const SeriesEstimate series = rank_one_laplace(config.n - 1, config.alpha, config.T, config.jmax,
                                                   config.series_tolerance);
    const double rel = std::abs(mc.mean - series.value) / series.value;
    report.criteria.push_back({"laplace: MC vs rank-one series", series.value, mc.mean, 0.02, rel <= 0.02,
                               "relative deviation " + format_real(rel) + ", MC se " + format_real(mc.std_error) +
                                   ", series error bound " + format_real(series.error)});
    const double det = theorem33_laplace(rho0, config.n, 1, config.alpha, config.T);
    const double rel_det = std::abs(det - series.value) / series.value;
    report.criteria.push_back({"laplace: determinantal vs rank-one series", series.value, det, 1e-3, rel_det <= 1e-3,
                               "relative deviation " + format_real(rel_det)});
  } else {
    const double det = theorem33_laplace(rho0, config.n, config.k, config.alpha, config.T);
    const double rel = std::abs(mc.mean - det) / det;
    const double tol = std::max(0.05, 3.0 * mc.std_error / det);
    report.criteria.push_back({"laplace: MC vs determinantal formula", det, mc.mean, tol, rel <= tol,
                               "relative deviation " + format_real(rel) + ", MC se " + format_real(mc.std_error)});
  }
  report.criteria.push_back(mean_criterion("girsanov: mean of M_T equals 1", mean_estimate(table.column("girsanov")),
                                           1.0, 3.0));
  report.runtime_seconds = seconds_since(start);
  return report;
}

StatReport verify_limits(const RunConfig& config) {
  const auto start = Clock::now();
  StatReport report;
  report.config = config;
  report.table = run_paths(config);
  const RunTable& table = report.table;
  const double T = config.T;
  const double k = config.k;
  std::vector<double> ergodic = table.column("trace_integral");
  for (double& v : ergodic) v /= T;
  const MeanEstimate erg = mean_estimate(ergodic);
  report.criteria.push_back({"ergodic: mean of (1/T) int tr J in [0.85k, k]", k, erg.mean, 0.15 * k,
                             erg.mean >= 0.85 * k && erg.mean <= k, "se " + format_real(erg.std_error)});
  std::vector<double> area = table.column("area_im");
  std::vector<double> theta = table.column("theta");
  const double scale = 1.0 / std::sqrt(T);
  for (double& v : area) v *= scale;
  for (double& v : theta) v *= scale;
  CriterionResult a = ks_criterion("area CLT: area / (i sqrt T) ~ N(0, k)", ks_normal_test(area, k));
  a.target = k;
  a.detail += ", sample variance " + format_real(mean_estimate(area).variance);
  report.criteria.push_back(a);
  CriterionResult w = ks_criterion("winding CLT: theta / sqrt T ~ N(0, 2k)", ks_normal_test(theta, 2.0 * k));
  w.target = 2.0 * k;
  w.detail += ", sample variance " + format_real(mean_estimate(theta).variance);
  report.criteria.push_back(w);
  report.runtime_seconds = seconds_since(start);
  return report;
}

}  // namespace hgbm
