// Command-line driver: simulate, verify-laplace, verify-limits, kernel, identities.
// Exit status 0 when every verdict passes, 1 when one fails, 2 on configuration errors.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgbm/errors.hpp"
#include "hgbm/harness.hpp"
#include "hgbm/kernels.hpp"
#include "hgbm/scenarios.hpp"

using namespace hgbm;

namespace {

struct Options {
  RunConfig run;
  std::string chart = "zeta";
  std::string out;
  std::string format = "json";
  std::string table_out;
  // kernel subcommand
  std::string which = "q";
  int m = 1;
  double u1 = 2.0;
  double from = 0.0;
  double to = 5.0;
  int count = 51;
  int samples = 1000;
};

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw ConfigError("cannot open output file " + o.out);
  file << text;
}

std::string csv_table(const RunTable& table) {
  std::ostringstream s;
  write_csv(s, table);
  return s.str();
}

std::string criteria_csv(const StatReport& r) {
  std::ostringstream s;
  s << "name,target,estimate,tolerance,verdict\n";
  for (const CriterionResult& c : r.criteria)
    s << '"' << c.name << "\"," << real(c.target) << ',' << real(c.estimate) << ',' << real(c.tolerance) << ','
      << (c.pass ? "pass" : "fail") << '\n';
  return s.str();
}

void print_verdicts(const StatReport& r) {
  for (const CriterionResult& c : r.criteria)
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << real(c.estimate) << " (tolerance "
              << real(c.tolerance) << ")\n";
}

// Writes the report in the requested format; the per-path table goes to --table when given.
int finish(const Options& o, const StatReport& r, bool has_table) {
  if (o.format == "csv") {
    emit(o, has_table ? csv_table(r.table) : criteria_csv(r));
  } else {
    emit(o, report_json(r) + "\n");
  }
  if (has_table && !o.table_out.empty()) {
    std::ofstream file(o.table_out);
    if (!file) throw ConfigError("cannot open table file " + o.table_out);
    file << csv_table(r.table);
  }
  print_verdicts(r);
  return r.all_pass() ? 0 : 1;
}

void add_run_flags(CLI::App* app, Options& o) {
  app->add_option("--n", o.run.n, "ambient dimension n");
  app->add_option("--k", o.run.k, "rank k, 1 <= k <= n - k");
  app->add_option("--t", o.run.T, "horizon T");
  app->add_option("--dt", o.run.dt, "time step");
  app->add_option("--paths", o.run.paths, "number of paths");
  app->add_option("--seed", o.run.seed, "run seed");
  app->add_option("--alpha", o.run.alpha, "Laplace / Girsanov parameter");
  app->add_option("--chart", o.chart, "simulation route")->check(CLI::IsMember({"lambda", "zeta", "matrix", "group", "grassmann"}));
  app->add_option("--lambda0", o.run.lambda0, "start eigenvalues of J (default: origin)");
  app->add_option("--threads", o.run.threads, "worker threads (0: all cores)");
  app->add_option("--out", o.out, "output file (default: stdout)");
  app->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--table", o.table_out, "also write the per-path CSV table here");
}

int run_simulate(Options& o) {
  const auto start = std::chrono::steady_clock::now();
  o.run.scenario = "simulate";
  o.run.route = parse_route(o.chart);
  StatReport r;
  r.config = o.run;
  r.table = run_paths(o.run);
  r.criteria.push_back({"path failures at most 1%", 0.0, r.table.failure_fraction(), o.run.max_failure_fraction,
                        r.table.failure_fraction() <= o.run.max_failure_fraction,
                        std::to_string(r.table.failures) + " failed paths"});
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return finish(o, r, true);
}

int run_kernel(const Options& o) {
  if (o.count < 2) throw ConfigError("--count must be at least 2");
  std::ostringstream csv;
  nlohmann::json values = nlohmann::json::array();
  const double step = (o.to - o.from) / (o.count - 1);
  std::function<double(double)> f;
  std::string x_name;
  std::unique_ptr<JacobiHeatKernel> q;
  std::vector<double> profile;
  if (o.which == "q") {
    q = std::make_unique<JacobiHeatKernel>(make_kernel_params(o.run.n, o.run.k, o.run.alpha), o.run.T);
    profile = q->start_profile(o.u1);
    f = [&](double u2) { return q->evaluate(profile, u2); };
    x_name = "u2";
  } else if (o.which == "s") {
    f = [&](double x) { return hyperbolic_heat_kernel(x, o.run.T, o.m); };
    x_name = "x";
  } else {
    f = [&](double r) { return maass_kernel(r, o.run.T, o.m, o.run.alpha); };
    x_name = "r";
  }
  csv << x_name << ",value\n";
  for (int i = 0; i < o.count; ++i) {
    const double x = o.from + i * step;
    const double v = f(x);
    csv << real(x) << ',' << real(v) << '\n';
    values.push_back({{x_name, x}, {"value", v}});
  }
  if (o.format == "csv") {
    emit(o, csv.str());
  } else {
    nlohmann::json j{{"kernel", o.which}, {"t", o.run.T}, {"values", values}};
    if (o.which == "q") {
      j["n"] = o.run.n;
      j["k"] = o.run.k;
      j["alpha"] = o.run.alpha;
      j["u1"] = o.u1;
    } else {
      j["m"] = o.m;
      if (o.which == "v") j["alpha"] = o.run.alpha;
    }
    emit(o, j.dump(2) + "\n");
  }
  return 0;
}

int run_identities(Options& o) {
  const auto start = std::chrono::steady_clock::now();
  o.run.scenario = "identities";
  StatReport r;
  r.config = o.run;
  r.criteria.push_back(check_appendix_b(o.samples, o.run.seed));
  r.criteria.push_back(check_basis_orthonormality());
  r.criteria.push_back(check_intertwining());
  r.criteria.push_back(check_integration_by_parts());
  for (CriterionResult& c : check_kernel_normalizations()) r.criteria.push_back(std::move(c));
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return finish(o, r, false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian motion on the hyperbolic complex Grassmannian: simulation and verification"};
  app.require_subcommand(1);
  Options o;

  CLI::App* simulate = app.add_subcommand("simulate", "simulate paths and write the per-path table");
  add_run_flags(simulate, o);

  CLI::App* laplace = app.add_subcommand("verify-laplace", "MC Laplace transform against the analytic routes");
  add_run_flags(laplace, o);

  CLI::App* limits = app.add_subcommand("verify-limits", "ergodic limit and the area / winding CLTs");
  add_run_flags(limits, o);

  CLI::App* kernel = app.add_subcommand("kernel", "evaluate q_t, s_t or v_t on a grid");
  kernel->add_option("--which", o.which, "q (Jacobi), s (hyperbolic), v (Maass)")->check(CLI::IsMember({"q", "s", "v"}));
  kernel->add_option("--n", o.run.n, "n for q");
  kernel->add_option("--k", o.run.k, "k for q");
  kernel->add_option("--m", o.m, "m for s and v");
  kernel->add_option("--alpha", o.run.alpha, "alpha for q and v");
  kernel->add_option("--t", o.run.T, "time");
  kernel->add_option("--u1", o.u1, "start point of q");
  kernel->add_option("--from", o.from, "grid start");
  kernel->add_option("--to", o.to, "grid end");
  kernel->add_option("--count", o.count, "grid points");
  kernel->add_option("--out", o.out, "output file (default: stdout)");
  kernel->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* identities = app.add_subcommand("identities", "algebraic identities, intertwining, integration by parts");
  identities->add_option("--samples", o.samples, "random contractions per shape");
  identities->add_option("--seed", o.run.seed, "seed");
  identities->add_option("--out", o.out, "output file (default: stdout)");
  identities->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));

  // Scenario defaults, applied before parsing so flags override them.
  const std::string first = argc > 1 ? argv[1] : "";
  if (first == "verify-laplace") {
    o.run.n = 3;
    o.run.k = 1;
    o.run.alpha = 0.25;
    o.run.paths = 20000;
    o.chart = "lambda";
  } else if (first == "verify-limits") {
    o.run.T = 100.0;
    o.run.paths = 2000;
  } else if (first == "simulate") {
    o.format = "csv";
  } else if (first == "kernel") {
    o.format = "csv";
    o.from = 1.0;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*laplace) {
      o.run.scenario = "verify-laplace";
      o.run.route = parse_route(o.chart);
      const StatReport r = verify_laplace(o.run);
      return finish(o, r, true);
    }
    if (*limits) {
      o.run.scenario = "verify-limits";
      o.run.route = parse_route(o.chart);
      const StatReport r = verify_limits(o.run);
      return finish(o, r, true);
    }
    if (*kernel) return run_kernel(o);
    if (*identities) return run_identities(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
