#pragma once

#include <cstdint>
#include <string>

#include "hgbm/functionals.hpp"
#include "hgbm/linalg.hpp"

namespace hgbm {

// matrix:    group Brownian motion U_t on U(n-k, k), w = X Z^{-1}; n^2 noise coordinates.
// grassmann: intrinsic w SDE with the horizontal fiber Theta and an independent U(k) motion;
//            2(n-k)k + k^2 coordinates.
// lambda:    eigenvalue SDE in the lambda chart; 3k coordinates (eigenvalue noise, area noise,
//            fiber noise).
// zeta:      as lambda, stepped in the zeta chart with drift-implicit steps. The only route that
//            stays accurate for large T, where 1 - lambda_1 underflows.
enum class Route { matrix, grassmann, lambda, zeta };

std::string route_name(Route route);
Route parse_route(const std::string& name);  // also accepts the CLI alias "matrix" / "group"

struct PathConfig {
  int n = 4;
  int k = 2;
  double T = 1.0;
  double dt = 1e-3;
  Route route = Route::zeta;
  Matrix w0;  // (n-k) x k strict contraction; empty means the origin
  int max_halvings = 20;
  double spread = 1e-6;  // spectral routes: separation imposed on a degenerate start
};

int noise_dimension(const PathConfig& config);

enum class PathStatus { ok, failed };

struct PathResult {
  PathStatus status = PathStatus::ok;
  std::string failure;
  FunctionalAccumulators acc;
  RealVector lambda;  // final eigenvalues of J, non-increasing
  double min_gap = 0.0;  // smallest consecutive gap of zeta = acosh rho over accepted states
  long rejections = 0;
};

// One path driven by PathRng(seed, path). Never throws for numerical failures: a path whose
// step is still rejected after max_halvings (or that leaves the domain) comes back failed.
// Throws ConfigError for inconsistent configurations.
PathResult simulate_path(const PathConfig& config, std::uint64_t seed, std::uint64_t path);

}  // namespace hgbm
