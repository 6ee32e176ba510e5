#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hgbm/errors.hpp"
#include "hgbm/harness.hpp"

using namespace hgbm;

namespace {

std::string csv_of(const RunTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

RunConfig small_config(Route route) {
  RunConfig c;
  c.n = 4;
  c.k = 2;
  c.T = 0.1;
  c.dt = 1e-3;
  c.paths = 16;
  c.seed = 99;
  c.route = route;
  c.alpha = 0.25;
  return c;
}

}  // namespace

TEST_CASE("initial-value table") {
  for (Route route : {Route::matrix, Route::grassmann, Route::lambda, Route::zeta}) {
    RunConfig c = small_config(route);
    c.T = 0.0;
    c.paths = 1;
    const RunTable t = run_paths(c);
    REQUIRE(t.rows.size() == 1);
    const PathResult& r = t.rows[0].result;
    CHECK(r.status == PathStatus::ok);
    CHECK(r.acc.trace_integral == 0.0);
    CHECK(r.acc.area_im == 0.0);
    CHECK(r.acc.theta == r.acc.theta0);
    CHECK(t.rows[0].girsanov == 1.0);
  }
}

TEST_CASE("determinism") {
  for (Route route : {Route::matrix, Route::grassmann, Route::lambda, Route::zeta}) {
    RunConfig c = small_config(route);
    c.threads = 1;
    const std::string first = csv_of(run_paths(c));
    c.threads = 3;
    CHECK(csv_of(run_paths(c)) == first);
    c.seed = 100;
    CHECK(csv_of(run_paths(c)) != first);
  }
  RunConfig c = small_config(Route::lambda);
  c.alpha = 0.0;
  StatReport a = verify_laplace(c);
  StatReport b = verify_laplace(c);
  CHECK(report_json(a, false) == report_json(b, false));
}

TEST_CASE("csv layout") {
  RunConfig c = small_config(Route::zeta);
  c.paths = 3;
  const std::string csv = csv_of(run_paths(c));
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "path_id,status,T,dt,trace_integral,area_im,theta,varrho,girsanov,lambda_1,lambda_2");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind(std::to_string(rows - 1) + ",ok,0.10000000000000001,0.001,", 0) == 0);
  }
  CHECK(rows == 3);
  // %.17g round-trips
  const RunTable t = run_paths(c);
  std::istringstream again(csv_of(t));
  std::getline(again, line);
  std::getline(again, line);
  std::vector<std::string> fields;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  REQUIRE(fields.size() == 11);
  CHECK(std::stod(fields[4]) == t.rows[0].result.acc.trace_integral);
  CHECK(std::stod(fields[6]) == t.rows[0].result.acc.theta);
}

TEST_CASE("failure accounting") {
  RunConfig c = small_config(Route::lambda);
  c.T = 2.0;
  c.dt = 0.05;
  c.paths = 40;
  c.max_halvings = 0;
  CHECK_THROWS_AS(run_paths(c), RunError);
  c.max_failure_fraction = 1.0;
  const RunTable t = run_paths(c);
  CHECK(t.failures > 0);
  CHECK(static_cast<long>(t.column("trace_integral").size()) == c.paths - t.failures);
  CHECK(t.failure_fraction() == doctest::Approx(static_cast<double>(t.failures) / c.paths));
  const std::string csv = csv_of(t);
  long failed_rows = 0;
  for (std::size_t pos = csv.find(",failed,"); pos != std::string::npos; pos = csv.find(",failed,", pos + 1)) ++failed_rows;
  CHECK(failed_rows == t.failures);
}

TEST_CASE("configuration errors") {
  RunConfig c = small_config(Route::lambda);
  c.dt = 0.0;
  CHECK_THROWS_AS(run_paths(c), ConfigError);
  c = small_config(Route::lambda);
  c.T = 0.0015;
  CHECK_THROWS_AS(run_paths(c), ConfigError);
  c = small_config(Route::lambda);
  c.paths = 0;
  CHECK_THROWS_AS(run_paths(c), ConfigError);
  c = small_config(Route::lambda);
  c.k = 3;
  CHECK_THROWS_AS(run_paths(c), ConfigError);
  c = small_config(Route::lambda);
  c.lambda0 = {1.0};
  CHECK_THROWS_AS(run_paths(c), ConfigError);
  CHECK_THROWS_AS(parse_route("sphere"), ConfigError);
  CHECK(parse_route("group") == Route::matrix);
  CHECK(route_name(parse_route("zeta")) == "zeta");
}

TEST_CASE("report schema") {
  RunConfig c = small_config(Route::lambda);
  c.alpha = 0.0;
  const StatReport r = verify_laplace(c);
  CHECK(r.all_pass());
  const nlohmann::json j = nlohmann::json::parse(report_json(r));
  CHECK(j.contains("config"));
  CHECK(j.contains("runtime_seconds"));
  CHECK(j["seed"] == 99);
  REQUIRE(j["criteria"].size() == 2);
  for (const auto& c : j["criteria"])
    for (const char* key : {"name", "target", "estimate", "tolerance", "verdict"}) CHECK(c.contains(key));
  CHECK(j["criteria"][0]["estimate"] == 1.0);
  CHECK_FALSE(nlohmann::json::parse(report_json(r, false)).contains("runtime_seconds"));
}

TEST_CASE("short-horizon negative control") {
  // At T = 1 the CLT limits have not set in: the area variance is E int tr J, well below k.
  RunConfig c;
  c.n = 4;
  c.k = 2;
  c.T = 1.0;
  c.paths = 2000;
  c.seed = 5;
  c.route = Route::zeta;
  const StatReport r = verify_limits(c);
  REQUIRE(r.criteria.size() == 3);
  CHECK_FALSE(r.criteria[0].pass);
  CHECK_FALSE(r.criteria[1].pass);
}
