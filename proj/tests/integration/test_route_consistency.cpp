#include <doctest.h>

#include <cmath>
#include <vector>

#include "hgbm/harness.hpp"

using namespace hgbm;

namespace {

RunConfig config(int n, int k, double T, long paths, Route route, std::uint64_t seed) {
  RunConfig c;
  c.n = n;
  c.k = k;
  c.T = T;
  c.paths = paths;
  c.route = route;
  c.seed = seed;
  return c;
}

std::vector<double> final_trace(const RunTable& t) {
  std::vector<double> out = t.column("lambda_1");
  for (int j = 2; j <= t.config.k; ++j) {
    const std::vector<double> l = t.column("lambda_" + std::to_string(j));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += l[i];
  }
  return out;
}

}  // namespace

TEST_CASE("group, intrinsic and spectral routes agree at t = 0.5") {
  const RunTable group = run_paths(config(3, 1, 0.5, 2000, Route::matrix, 1));
  const RunTable intrinsic = run_paths(config(3, 1, 0.5, 2000, Route::grassmann, 2));
  const RunTable spectral = run_paths(config(3, 1, 0.5, 2000, Route::lambda, 3));
  for (const RunTable* other : {&intrinsic, &spectral}) {
    const KsResult ks = ks_two_sample(final_trace(group), final_trace(*other));
    MESSAGE("tr J vs " << route_name(other->config.route) << ": KS " << ks.statistic << " / " << ks.critical_1);
    CHECK(ks.pass_1());
    const KsResult area = ks_two_sample(group.column("area_im"), other->column("area_im"));
    CHECK(area.pass_1());
    const KsResult theta = ks_two_sample(group.column("theta"), other->column("theta"));
    CHECK(theta.pass_1());
  }
}

TEST_CASE("quadratic variation of the functionals") {
  // Var(area) = E int tr J and, for the group winding, Var(theta) = E int (2k + tr J).
  const long paths = 3000;
  const RunTable group = run_paths(config(4, 2, 1.0, paths, Route::matrix, 4));
  const MeanEstimate trace = mean_estimate(group.column("trace_integral"));
  const MeanEstimate area = mean_estimate(group.column("area_im"));
  const MeanEstimate theta = mean_estimate(group.column("theta"));
  const double winding_rate = 2.0 * 2 * 1.0 + trace.mean;
  MESSAGE("E int tr J " << trace.mean << ", Var area " << area.variance << ", Var theta " << theta.variance
                        << " vs " << winding_rate);
  // standard error of a sample variance of a (near) Gaussian mixture
  const double se = std::sqrt(2.0 / paths);
  CHECK(std::abs(area.variance / trace.mean - 1.0) <= 4.0 * se * 1.5);
  CHECK(std::abs(theta.variance / winding_rate - 1.0) <= 4.0 * se * 1.5);
  CHECK(std::abs(theta.variance / (2.0 * 2 + 1.0 * 2) - 1.0) > 0.1);  // far from the 2k rate of the limit law
}

TEST_CASE("escape and non-collision over long horizons") {
  RunConfig escape = config(4, 2, 50.0, 40, Route::zeta, 5);
  const RunTable t = run_paths(escape);
  CHECK(t.failures == 0);
  for (const PathRow& row : t.rows) {
    CHECK(row.result.lambda.minCoeff() > 0.9);
    CHECK(row.result.min_gap > 0.0);
    CHECK(row.result.acc.trace_integral <= 2.0 * 50.0);
  }
  RunConfig wide = config(6, 2, 10.0, 40, Route::zeta, 6);
  wide.lambda0 = {0.6, 0.3};
  for (const PathRow& row : run_paths(wide).rows) CHECK(row.result.min_gap > 0.0);
}
