#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "hgbm/kernels.hpp"
#include "hgbm/linalg.hpp"
#include "hgbm/random.hpp"

namespace hgbm {

// Eigenvalue coordinates of J = w*w:
//   lambda in [0, 1),  rho = (1 + lambda) / (1 - lambda) >= 1,  rho = cosh(zeta).
// lambda and rho share the clock of w; the zeta clock runs four times faster
// (zeta(4t) = acosh rho(t)).
enum class Chart { lambda, rho, zeta };

struct SpectralState {
  RealVector values;  // non-increasing
  Chart chart = Chart::lambda;
  double time = 0.0;  // in the chart's own clock
};

SpectralState chart_convert(const SpectralState& state, Chart target);

// In the zeta chart 1 - lambda = sech^2(zeta/2); these helpers avoid forming 1 - lambda
// from a rounded lambda.
RealVector lambda_values(const SpectralState& state);
double log_det_one_minus_j(const SpectralState& state);

struct SpectralStepOptions {
  double boundary_guard = 1e-12;  // lambda <= 1 - guard
  double gap_guard = 1e-7;        // minimum pairwise gap in rho (lambda chart) or zeta (zeta chart)
};

// Drift of the lambda SDE: 2[(n-1) - l_j](1 - l_j) + 4(1 - l_j)^2 sum_{l != j} l_l / (l_j - l_l).
RealVector lambda_drift(const RealVector& lambda, int n);

// Drift of zeta in its own clock:
// 1/2 coth z_j + ((n-2k)/2) coth(z_j/2) + 1/2 sum_{l != j} [coth((z_j - z_l)/2) + coth((z_j + z_l)/2)].
RealVector zeta_drift(const RealVector& zeta, int n);

// One step in the lambda chart. dN holds k increments of the original-clock Brownian motion
// (variance dt each). Noise and the one-body drift 2[(n-k) - sum l](1 - l_j) are explicit; the
// pair force 2 S_jl / (l_j - l_l), S_jl = (1 - l_j)(1 - l_l)(l_j + l_l), is implicit with S
// frozen at the start, so a near-collision cannot throw the top eigenvalue at the boundary.
// Throws StepRejected past the upper boundary or below the gap guard.
SpectralState step_lambda(const SpectralState& state, int n, double dt, const RealVector& dN,
                          const SpectralStepOptions& opts = {});
SpectralState step_lambda(const SpectralState& state, int n, double dt, PathRng& rng,
                          const SpectralStepOptions& opts = {});

// zeta-chart step over original-clock dt: the zeta clock advances by 4 dt and its Brownian
// increment is 2 dN. Drift-implicit: x = z + 2 dN + 4 dt zeta_drift(x). The drift is the
// gradient of a concave log-sinh potential, so x is the unique minimizer of a strictly convex
// barrier problem on the chamber and exists for any noise.
SpectralState step_zeta(const SpectralState& state, int n, double dt, const RealVector& dN,
                        const SpectralStepOptions& opts = {});
SpectralState step_zeta(const SpectralState& state, int n, double dt, PathRng& rng,
                        const SpectralStepOptions& opts = {});

// Deterministic spread of a (near-)degenerate lambda start: entry j is raised to at least
// lambda_{j+1} + eps, working from the bottom.
SpectralState spread_start(const SpectralState& lambda_state, double eps = 1e-6);

struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;
  double value() const;
};

// prod_{l<j} (v_l - v_j) as sign and log-magnitude.
SignedLog vandermonde(const RealVector& values);

// k(k-1)(3n+2-4k)/3.
double doob_constant(int n, int k);

struct CollisionReport {
  double min_gap = std::numeric_limits<double>::infinity();
  double argmin_time = 0.0;
  bool crossed = false;        // ordering violated somewhere
  double crossing_time = 0.0;  // first time it was
  long rejections = 0;
};

CollisionReport collision_diagnostics(const std::vector<SpectralState>& path, long rejections = 0);

// Jacobi heat kernel q_t^{(n,k,0)} configured for Karlin-McGregor evaluations.
struct KernelHandle {
  std::shared_ptr<const JacobiHeatKernel> kernel;
  QuadratureConfig quad;
};

KernelHandle make_kernel_handle(int n, int k, double t, const QuadratureConfig& quad = {});

// e^{-c t} V(rho)/V(rho0) det[q_t(rho0_i, rho_j)], c = doob_constant(n, k): the transition
// density of the ordered rho process with respect to Lebesgue measure on the chamber.
double km_transition_density(const RealVector& rho0, const RealVector& rho, const KernelHandle& kernel);

}  // namespace hgbm
