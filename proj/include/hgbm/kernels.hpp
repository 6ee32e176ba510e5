#pragma once

#include <functional>
#include <vector>

#include "hgbm/linalg.hpp"
#include "hgbm/quadrature.hpp"
#include "hgbm/random.hpp"

namespace hgbm {

// Truncation and panel settings for the spectral (mu) and spatial integrals.
// Zero for mu_max or x_max selects the default for the configured t.
struct QuadratureConfig {
  double mu_max = 0.0;
  int panels = 24;
  int nodes_per_panel = 16;
  double x_max = 0.0;

  // sqrt(8 ln 10 / t): the factor exp(-2 t mu^2) is 1e-16 there.
  double resolved_mu_max(double t) const;
  QuadratureConfig refined() const;
};

// Parameters of the radial generator 2(u^2-1) d^2 + 2[(n+2-2k+2a)u + n-2k-2a] d on u >= 1.
struct KernelParams {
  int n = 0;
  int k = 0;
  double alpha = 0.0;

  double kappa() const { return 0.5 * (n - 2 * k + 1); }
  int m() const { return n - 2 * k + 1; }
  // Jacobi indices of the generator.
  int jacobi_a() const { return n - 2 * k; }
  double jacobi_b() const { return 2.0 * alpha; }
};

KernelParams make_kernel_params(int n, int k, double alpha);

// |Gamma(kappa + alpha + i mu) Gamma(kappa - alpha + i mu) / Gamma(2 i mu)|^2, the
// Jacobi-Fourier spectral density. Continuous at mu = 0 with value 0.
double gamma_weight(double kappa, double alpha, double mu);

// F_mu(u) = 2F1(kappa + i mu, kappa - i mu; n - 2k + 1; (1 - u) / 2) for the alpha = 0
// parameters; for alpha > 0 the first index shifts to kappa + alpha. Real-valued.
double jacobi_function(double mu, double u, const KernelParams& params);

// Neumann heat kernel q_t(u1, u2) of the radial generator, density in u2 with respect to
// Lebesgue measure. The spectral weights are precomputed once per (params, t). Throws
// AccuracyError for t below about 0.02, where the mu-series cancel catastrophically.
class JacobiHeatKernel {
 public:
  JacobiHeatKernel(const KernelParams& params, double t, const QuadratureConfig& quad = {});

  double operator()(double u1, double u2) const;

  // The u1-dependent factor of the mu-integrand. Reuse it for many u2 values.
  std::vector<double> start_profile(double u1) const;
  double evaluate(const std::vector<double>& profile, double u2) const;

  // Speed measure density (u-1)^a (u+1)^b; q(u1,u2)/m(u2) is symmetric.
  double speed_density(double u) const;

  // Spatial rule in s (u = cosh s) covering the mass started from u1.
  QuadratureRule spatial_rule(double u1) const;

  const KernelParams& params() const { return params_; }
  double time() const { return t_; }

 private:
  double jacobi_at_node(std::size_t i, double u) const;

  KernelParams params_;
  double t_;
  QuadratureConfig quad_;
  double kappa_alpha_;
  std::vector<double> mu_;
  std::vector<double> weight_;     // quadrature weight * exp(-2t(mu^2 + kappa_alpha^2)) * gamma_weight
  std::vector<Complex> connect_;   // Gamma(C) Gamma(-2 i mu) / (Gamma(C - A) Gamma(C - B))
  double prefactor_;
};

// q_t(u1, u2), cross-checked against a run with doubled panels; throws AccuracyError when
// the two disagree by more than 1e-6.
double jacobi_heat_kernel(double u1, double u2, double t, const KernelParams& params,
                          const QuadratureConfig& quad = {});

// s_{t,2m+1}(cosh x): heat kernel of half the Laplacian on real hyperbolic space of
// dimension 2m+1 as a function of the distance x.
double hyperbolic_heat_kernel(double x, double t, int m);

// Default spatial cut-off for s_t: m t + 8 sqrt(t) + 10.
double hyperbolic_x_max(double t, int m);

// (2 pi^{m+1/2} / Gamma(m+1/2)) sinh^{2m} x, so that s_t times this integrates to one.
double hyperbolic_volume_density(double x, int m);

// v_t(0, r) for the shifted Maass Laplacian on CH^m, a density with respect to
// (2 pi^m / Gamma(m)) sinh^{2m-1} r cosh r dr. Computed as
// 2 int_0^inf s_{t,2m+1}(cosh r cosh theta) cosh(2 alpha theta) d theta.
double maass_kernel(double r, double t, int m, double alpha, const QuadratureConfig& quad = {});
double maass_volume_density(double r, int m);

// c_j(alpha) of the rank-one expansion.
double appendix_c_coeff(int j, double alpha);

struct SeriesEstimate {
  double value = 0.0;
  double error = 0.0;  // truncation tail bound plus quadrature estimate
  int terms = 0;
};

// E[exp(-2 alpha^2 int_0^t tr J)] for rank one via the tanh-moment series. `n` is the
// shifted dimension: ambient shape (n + 1, 1) and hyperbolic space H^{2n+1}.
// Throws AccuracyError when the tail bound at jmax exceeds `tolerance`.
SeriesEstimate rank_one_laplace(int n, double alpha, double t, int jmax = 5000,
                                double tolerance = 1e-6, const QuadratureConfig& quad = {});

// Same quantity through the Maass kernel: e^{-2 alpha^2 t} int v_t(0,r) vol(r) dr.
double rank_one_laplace_maass(int n, double alpha, double t, const QuadratureConfig& quad = {});

// E[tanh^{2j}(d(0, B_t))] for Brownian motion on H^{2m+1}, j = 0..jmax.
std::vector<double> tanh_moments(int m, double t, int jmax, const QuadratureConfig& quad = {});

// |H(c^{-2a} f) + ((2a+m)^2/2) c^{-2a} f - c^{-2a} L f| at r, with c = cosh r, H the hyperbolic
// Jacobi operator and L the radial shifted Maass Laplacian. Fourth-order central differences
// of step h.
double intertwining_defect(const std::function<double(double)>& f, double r, double alpha, int m,
                           double h = 1e-4);

// E[exp(-2 alpha^2 int_0^t tr J)] from the determinantal formula in the variables
// rho = (1 + lambda) / (1 - lambda), rho0 strictly decreasing and > 1.
double theorem33_laplace(const RealVector& rho0, int n, int k, double alpha, double t,
                         const QuadratureConfig& quad = {});

// Euler sampler for dH = d gamma + m coth(H) dt from H = 0 (radial Brownian motion on
// H^{2m+1}). Used to cross-check the quadrature moments.
double sample_dominating_radius(int m, double t, double dt, PathRng& rng);

}  // namespace hgbm
