#include "hgbm/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "hgbm/errors.hpp"
#include "hgbm/special_functions.hpp"

namespace hgbm {
namespace {

constexpr double kPi = std::numbers::pi;

// 2F1(a, b; c; z) power series for 0 <= z <= 0.5.
Complex short_series(Complex a, Complex b, Complex c, double z) {
  Complex term = 1.0;
  Complex sum = 1.0;
  for (int j = 0; j < 2000; ++j) {
    term *= (a + double(j)) * (b + double(j)) / ((c + double(j)) * double(j + 1)) * z;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
  }
  throw AccuracyError("jacobi function: series did not converge");
}

// Monomial x^p coth^q(x) csch^r(x) t^{-e} of the closed-form s_t recursion.
using Monomial = std::array<int, 4>;

const std::map<Monomial, double>& hyperbolic_terms(int m) {
  thread_local std::map<int, std::map<Monomial, double>> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::map<Monomial, double> terms{{{0, 0, 0, 0}, 1.0}};
  for (int step = 0; step < m; ++step) {
    // D = -(1/sinh x) d/dx applied to x^p C^q S^r t^{-e} exp(-x^2/2t)
    std::map<Monomial, double> next;
    for (const auto& [mono, c] : terms) {
      const auto [p, q, r, e] = mono;
      if (p > 0) next[{p - 1, q, r + 1, e}] -= p * c;
      if (q > 0) next[{p, q - 1, r + 3, e}] += q * c;
      if (r > 0) next[{p, q + 1, r + 1, e}] += r * c;
      next[{p + 1, q, r + 1, e + 1}] += c;
    }
    terms.swap(next);
  }
  return cache.emplace(m, std::move(terms)).first->second;
}

// Even Taylor coefficients of D^m exp(-x^2/2t).
const std::vector<double>& hyperbolic_series(int m, double t) {
  struct Entry {
    int m = -1;
    double t = 0.0;
    std::vector<double> coeff;
  };
  thread_local Entry cached;
  if (cached.m == m && cached.t == t) return cached.coeff;
  const int size = 40 + m;
  // x / sinh x = sum b_i x^{2i}
  std::vector<double> b(size, 0.0);
  b[0] = 1.0;
  for (int i = 1; i < size; ++i) {
    double fact = 1.0;  // (2l+1)!
    double s = 0.0;
    for (int l = 1; l <= i; ++l) {
      fact *= (2.0 * l) * (2.0 * l + 1.0);
      s += b[i - l] / fact;
    }
    b[i] = -s;
  }
  std::vector<double> a(size);
  a[0] = 1.0;
  for (int j = 1; j < size; ++j) a[j] = a[j - 1] * (-0.5 / t) / j;
  for (int step = 0; step < m; ++step) {
    const int len = static_cast<int>(a.size()) - 1;
    std::vector<double> d(len);
    for (int j = 0; j < len; ++j) d[j] = 2.0 * (j + 1) * a[j + 1];
    std::vector<double> c(len, 0.0);
    for (int j = 0; j < len; ++j)
      for (int i = 0; i <= j; ++i) c[j] -= d[j - i] * b[i];
    a.swap(c);
  }
  cached = {m, t, a};
  return cached.coeff;
}

double hyperbolic_prefactor(double t, int m) {
  return std::exp(-0.5 * m * m * t) / (std::pow(2.0 * kPi, m) * std::sqrt(2.0 * kPi * t));
}

// 2 asinh(sqrt(sinh^2(r/2) cosh(theta) + sinh^2(theta/2))) = acosh(cosh r cosh theta), stable near 0.
double composed_distance(double r, double theta) {
  const double sr = std::sinh(0.5 * r);
  const double st = std::sinh(0.5 * theta);
  return 2.0 * std::asinh(std::sqrt(sr * sr * std::cosh(theta) + st * st));
}

double maass_unchecked(double r, double t, int m, double alpha, const QuadratureConfig& quad) {
  const double x_max = quad.x_max > 0.0 ? quad.x_max : hyperbolic_x_max(t, m);
  if (r >= x_max) return 0.0;
  const double theta_max = std::acosh(std::cosh(x_max) / std::cosh(r));
  const QuadratureRule rule = panel_rule(0.0, theta_max, quad.panels, quad.nodes_per_panel);
  return 2.0 * integrate(rule, [&](double th) {
    return hyperbolic_heat_kernel(composed_distance(r, th), t, m) * std::cosh(2.0 * alpha * th);
  });
}

long double cosh_weight(long double r, double alpha) { return std::pow(std::cosh(r), -2.0L * alpha); }

}  // namespace

double QuadratureConfig::resolved_mu_max(double t) const {
  return mu_max > 0.0 ? mu_max : std::sqrt(8.0 * std::log(10.0) / t);
}

QuadratureConfig QuadratureConfig::refined() const {
  QuadratureConfig r = *this;
  r.panels *= 2;
  return r;
}

KernelParams make_kernel_params(int n, int k, double alpha) {
  if (k < 1 || n - k < k) throw ShapeError("kernel params: need 1 <= k <= n - k");
  if (!(alpha >= 0.0)) throw DomainError("kernel params: alpha must be >= 0");
  return KernelParams{n, k, alpha};
}

double gamma_weight(double kappa, double alpha, double mu) {
  if (kappa - alpha <= 0.0 && kappa - alpha == std::round(kappa - alpha))
    throw DomainError("gamma_weight: kappa - alpha is a nonpositive integer");
  if (mu == 0.0) return 0.0;
  const Complex im(0.0, mu);
  const Complex lg = log_gamma(kappa + alpha + im) + log_gamma(kappa - alpha + im) - log_gamma(2.0 * im);
  return std::exp(2.0 * lg.real());
}

double jacobi_function(double mu, double u, const KernelParams& p) {
  if (!(u >= 1.0)) throw DomainError("jacobi_function: requires u >= 1");
  const double ka = p.kappa() + p.alpha;
  const Complex value = gauss_2f1(Complex(ka, mu), Complex(ka, -mu), Complex(p.jacobi_a() + 1.0), 0.5 * (1.0 - u));
  if (!std::isfinite(value.real())) throw DomainError("jacobi_function: overflow");
  return value.real();
}

JacobiHeatKernel::JacobiHeatKernel(const KernelParams& params, double t, const QuadratureConfig& quad)
    : params_(params), t_(t), quad_(quad), kappa_alpha_(params.kappa() + params.alpha) {
  if (!(t > 0.0)) throw DomainError("jacobi heat kernel: t must be positive");
  if (!(params.kappa() - params.alpha > 0.0))
    throw DomainError("jacobi heat kernel: needs alpha < kappa (no discrete spectrum)");
  const QuadratureRule rule = panel_rule(0.0, quad.resolved_mu_max(t), quad.panels, quad.nodes_per_panel);
  const double ka = kappa_alpha_;
  const double km = params.kappa() - params.alpha;
  const double c = params.jacobi_a() + 1.0;
  // The hypergeometric series at zeta <= 1/2 have terms up to about exp(sqrt(2) mu) while
  // F_mu stays O(1); refuse configurations (small t) where that loses the answer.
  double scale = 0.0;
  double floor = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double mu = rule.nodes[i];
    mu_.push_back(mu);
    weight_.push_back(rule.weights[i] * std::exp(-2.0 * t * (mu * mu + ka * ka)) *
                      gamma_weight(params.kappa(), params.alpha, mu));
    const Complex im(0.0, mu);
    connect_.push_back(std::exp(log_gamma(c) + log_gamma(-2.0 * im) - log_gamma(km - im) - log_gamma(ka - im)));
    scale += std::abs(weight_.back());
    floor += std::abs(weight_.back()) * std::exp(std::sqrt(2.0) * mu) * 1e-16;
  }
  if (floor > 1e-7 * scale) throw AccuracyError("jacobi heat kernel: t too small for the spectral series");
  const double a = params.jacobi_a();
  const double b = params.jacobi_b();
  prefactor_ = std::pow(2.0, -(a + b) - 2.0) / (kPi * std::pow(std::tgamma(a + 1.0), 2));
}

double JacobiHeatKernel::jacobi_at_node(std::size_t i, double u) const {
  // Pfaff to zeta = (u-1)/(u+1), then the 1 - zeta connection formula; the two connection
  // terms are complex conjugates up to the phase L^{2 i mu}, L = (u+1)/2.
  const double mu = mu_[i];
  const double L = 0.5 * (u + 1.0);
  const double zeta = (u - 1.0) / (u + 1.0);
  const Complex A(kappa_alpha_, mu);
  const Complex B(params_.kappa() - params_.alpha, mu);
  const double c = params_.jacobi_a() + 1.0;
  if (zeta <= 0.5) return (std::exp(-A * std::log(L)) * short_series(A, B, c, zeta)).real();
  const double ell = std::log(L);
  const Complex t1 = connect_[i] * short_series(A, B, Complex(1.0, 2.0 * mu), 1.0 - zeta);
  return 2.0 * std::exp(-kappa_alpha_ * ell) * (std::exp(Complex(0.0, -mu * ell)) * t1).real();
}

std::vector<double> JacobiHeatKernel::start_profile(double u1) const {
  if (!(u1 >= 1.0)) throw DomainError("jacobi heat kernel: requires u >= 1");
  std::vector<double> profile(mu_.size());
  for (std::size_t i = 0; i < mu_.size(); ++i) profile[i] = weight_[i] * jacobi_at_node(i, u1);
  return profile;
}

double JacobiHeatKernel::evaluate(const std::vector<double>& profile, double u2) const {
  if (!(u2 >= 1.0)) throw DomainError("jacobi heat kernel: requires u >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) sum += profile[i] * jacobi_at_node(i, u2);
  return prefactor_ * speed_density(u2) * sum;
}

double JacobiHeatKernel::operator()(double u1, double u2) const { return evaluate(start_profile(u1), u2); }

double JacobiHeatKernel::speed_density(double u) const {
  return std::pow(u - 1.0, params_.jacobi_a()) * std::pow(u + 1.0, params_.jacobi_b());
}

QuadratureRule JacobiHeatKernel::spatial_rule(double u1) const {
  // u = cosh s; s = 2r diffuses with variance 4t and drifts at most at rate 4 kappa_alpha.
  // Six standard deviations: further out the mu-integral is below its cancellation floor.
  const double s1 = std::acosh(u1);
  const double s_max = s1 + 4.0 * kappa_alpha_ * t_ + 12.0 * std::sqrt(t_) + 1.0;
  return panel_rule(0.0, s_max, 2 * quad_.panels, quad_.nodes_per_panel);
}

double jacobi_heat_kernel(double u1, double u2, double t, const KernelParams& params, const QuadratureConfig& quad) {
  const double coarse = JacobiHeatKernel(params, t, quad)(u1, u2);
  const double fine = JacobiHeatKernel(params, t, quad.refined())(u1, u2);
  if (std::abs(coarse - fine) > 1e-6 * std::max(1.0, std::abs(fine)))
    throw AccuracyError("jacobi_heat_kernel: panel refinement changed the value by more than 1e-6");
  return fine;
}

double hyperbolic_x_max(double t, int m) { return m * t + 8.0 * std::sqrt(t) + 10.0; }

double hyperbolic_volume_density(double x, int m) {
  return 2.0 * std::pow(kPi, m + 0.5) / std::tgamma(m + 0.5) * std::pow(std::sinh(x), 2 * m);
}

double hyperbolic_heat_kernel(double x, double t, int m) {
  if (m < 1) throw DomainError("hyperbolic_heat_kernel: m must be >= 1");
  if (!(t > 0.0) || !(x >= 0.0)) throw DomainError("hyperbolic_heat_kernel: needs x >= 0, t > 0");
  const double pref = hyperbolic_prefactor(t, m);
  if (x < std::min(0.5, 2.0 * std::sqrt(t))) {
    const std::vector<double>& c = hyperbolic_series(m, t);
    const double x2 = x * x;
    double sum = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) sum = sum * x2 + *it;
    return pref * sum;
  }
  const double coth = 1.0 / std::tanh(x);
  const double csch = 1.0 / std::sinh(x);
  double sum = 0.0;
  for (const auto& [mono, c] : hyperbolic_terms(m)) {
    const auto [p, q, r, e] = mono;
    sum += c * std::pow(x, p) * std::pow(coth, q) * std::pow(csch, r) * std::pow(t, -e);
  }
  return pref * sum * std::exp(-0.5 * x * x / t);
}

double maass_volume_density(double r, int m) {
  return 2.0 * std::pow(kPi, m) / std::tgamma(m) * std::pow(std::sinh(r), 2 * m - 1) * std::cosh(r);
}

double maass_kernel(double r, double t, int m, double alpha, const QuadratureConfig& quad) {
  if (m < 1 || !(r >= 0.0) || !(t > 0.0) || !(alpha >= 0.0)) throw DomainError("maass_kernel: bad arguments");
  const double coarse = maass_unchecked(r, t, m, alpha, quad);
  const double fine = maass_unchecked(r, t, m, alpha, quad.refined());
  if (std::abs(coarse - fine) > 1e-6 * std::abs(fine) + 1e-14)
    throw AccuracyError("maass_kernel: panel refinement disagreement");
  return fine;
}

double appendix_c_coeff(int j, double alpha) {
  if (j < 0) throw DomainError("appendix_c_coeff: j must be >= 0");
  // c_j = sum_m A_m B_{j-m}, A_m = (a+1/2)_m (a)_m / ((1/2)_m m!), B_l = (-a)_l / l!
  std::vector<double> A(j + 1), B(j + 1);
  A[0] = B[0] = 1.0;
  for (int i = 1; i <= j; ++i) {
    A[i] = A[i - 1] * (alpha + 0.5 + i - 1) * (alpha + i - 1) / ((0.5 + i - 1) * i);
    B[i] = B[i - 1] * (-alpha + i - 1) / i;
  }
  double c = 0.0;
  for (int i = 0; i <= j; ++i) c += A[i] * B[j - i];
  return c;
}

std::vector<double> tanh_moments(int m, double t, int jmax, const QuadratureConfig& quad) {
  const double x_max = quad.x_max > 0.0 ? quad.x_max : hyperbolic_x_max(t, m);
  const QuadratureRule rule = panel_rule(0.0, x_max, 2 * quad.panels, quad.nodes_per_panel);
  std::vector<double> moments(jmax + 1, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    double w = rule.weights[i] * hyperbolic_heat_kernel(x, t, m) * hyperbolic_volume_density(x, m);
    const double th2 = std::tanh(x) * std::tanh(x);
    for (int j = 0; j <= jmax; ++j) {
      moments[j] += w;
      w *= th2;
    }
  }
  return moments;
}

SeriesEstimate rank_one_laplace(int n, double alpha, double t, int jmax, double tolerance,
                                const QuadratureConfig& quad) {
  if (n < 1 || !(alpha >= 0.0) || !(t > 0.0) || jmax < 1) throw DomainError("rank_one_laplace: bad arguments");
  if (!(2.0 * alpha < n)) throw DomainError("rank_one_laplace: majorant requires alpha < n / 2");
  const std::vector<double> E = tanh_moments(n, t, jmax + 1, quad);
  // I_j = (1/2)_j / (n+1/2)_j E_j;  b_j = (a+1/2)_j (a)_j / (j! (n+1/2)_j) majorizes c_j (1/2)_j / (n+1/2)_j
  double sum = 1.0;
  double ratio = 1.0;  // (1/2)_j / (n+1/2)_j
  double b = 1.0;
  double b_sum = 1.0;
  for (int j = 1; j <= jmax; ++j) {
    ratio *= (0.5 + j - 1) / (n + 0.5 + j - 1);
    b *= (alpha + 0.5 + j - 1) * (alpha + j - 1) / (j * (n + 0.5 + j - 1));
    b_sum += b;
    sum += appendix_c_coeff(j, alpha) * ratio * E[j];
  }
  const double gauss_total = std::exp(log_gamma(n + 0.5).real() + log_gamma(n - 2.0 * alpha).real() -
                                      log_gamma(n - alpha).real() - log_gamma(n + 0.5 - alpha).real());
  const double damp = std::exp(-2.0 * alpha * alpha * t);
  const double tail = damp * E[jmax + 1] * std::max(0.0, gauss_total - b_sum);
  if (tail > tolerance) throw AccuracyError("rank_one_laplace: truncation tail bound above tolerance");
  SeriesEstimate out;
  out.value = damp * sum;
  out.error = tail + std::abs(E[0] - 1.0);
  out.terms = jmax;
  return out;
}

double rank_one_laplace_maass(int n, double alpha, double t, const QuadratureConfig& quad) {
  const double x_max = quad.x_max > 0.0 ? quad.x_max : hyperbolic_x_max(t, n);
  const QuadratureRule rule = panel_rule(0.0, x_max, quad.panels, quad.nodes_per_panel);
  const double mass = integrate(rule, [&](double r) {
    return maass_unchecked(r, t, n, alpha, quad) * maass_volume_density(r, n);
  });
  return std::exp(-2.0 * alpha * alpha * t) * mass;
}

double intertwining_defect(const std::function<double(double)>& f, double r, double alpha, int m, double h) {
  using LD = long double;
  const LD rr = r;
  const LD hh = h;
  auto g = [&](LD x) { return cosh_weight(x, alpha) * static_cast<LD>(f(static_cast<double>(x))); };
  auto fl = [&](LD x) { return static_cast<LD>(f(static_cast<double>(x))); };
  const LD g0 = g(rr), gp = g(rr + hh), gm = g(rr - hh);
  const LD f0 = fl(rr), fp = fl(rr + hh), fm = fl(rr - hh);
  const LD gpp = g(rr + 2 * hh), gmm = g(rr - 2 * hh);
  const LD fpp = fl(rr + 2 * hh), fmm = fl(rr - 2 * hh);
  // fourth-order central stencils
  const LD g1 = (-gpp + 8 * gp - 8 * gm + gmm) / (12 * hh);
  const LD g2 = (-gpp + 16 * gp - 30 * g0 + 16 * gm - gmm) / (12 * hh * hh);
  const LD f1 = (-fpp + 8 * fp - 8 * fm + fmm) / (12 * hh);
  const LD f2 = (-fpp + 16 * fp - 30 * f0 + 16 * fm - fmm) / (12 * hh * hh);
  const LD th = std::tanh(rr), cth = 1 / th, sech2 = 1 / (std::cosh(rr) * std::cosh(rr));
  const LD jacobi = 0.5L * (g2 + ((2 * m - 1) * cth + (4 * alpha + 1) * th) * g1);
  const LD maass = 0.5L * f2 + ((m - 0.5L) * cth + 0.5L * th) * f1 + (2 * alpha * alpha * sech2 + 0.5L * m * m) * f0;
  const LD shift = 0.5L * (2 * alpha + m) * (2 * alpha + m);
  return static_cast<double>(std::abs(jacobi + shift * g0 - cosh_weight(rr, alpha) * maass));
}

double theorem33_laplace(const RealVector& rho0, int n, int k, double alpha, double t, const QuadratureConfig& quad) {
  if (rho0.size() != k) throw ShapeError("theorem33_laplace: rho0 must have k entries");
  if (!(alpha > 0.0)) throw DomainError("theorem33_laplace: alpha must be positive");
  for (int j = 0; j < k; ++j) {
    if (!(rho0(j) > 1.0)) throw DomainError("theorem33_laplace: rho0 entries must exceed 1");
    if (j > 0 && !(rho0(j - 1) > rho0(j))) throw DomainError("theorem33_laplace: rho0 must be strictly decreasing");
  }
  const KernelParams params = make_kernel_params(n, k, alpha);
  const JacobiHeatKernel q(params, t, quad);
  Eigen::MatrixXd M(k, k);
  for (int j = 0; j < k; ++j) {
    const std::vector<double> profile = q.start_profile(rho0(j));
    const QuadratureRule rule = q.spatial_rule(rho0(j));
    std::vector<double> col(k, 0.0);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double s = rule.nodes[i];
      const double u = std::cosh(s);
      if (u == 1.0 && params.jacobi_a() > 0) continue;
      const double base = rule.weights[i] * std::sinh(s) * std::pow(1.0 + u, -alpha) * q.evaluate(profile, u);
      double power = 1.0;
      for (int p = 0; p < k; ++p) {
        col[p] += base * power;
        power *= u;
      }
    }
    for (int p = 0; p < k; ++p) M(p, j) = col[p];
  }
  double vandermonde = 1.0;
  double start = 1.0;
  for (int j = 0; j < k; ++j) {
    start *= std::pow(1.0 + rho0(j), alpha);
    for (int l = j + 1; l < k; ++l) vandermonde *= rho0(j) - rho0(l);
  }
  const double sign = ((k * (k - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  const double rate = (6.0 * alpha * (n - 2 * k + 1) - (k - 1.0) * (3.0 * n + 2.0 - 4.0 * k)) * k / 3.0;
  return sign * std::exp(rate * t) * start / vandermonde * M.determinant();
}

double sample_dominating_radius(int m, double t, double dt, PathRng& rng) {
  if (m < 1 || !(t > 0.0) || !(dt > 0.0)) throw DomainError("sample_dominating_radius: bad arguments");
  const int steps = std::max(1, static_cast<int>(std::ceil(t / dt)));
  const double h = t / steps;
  // first step: Bessel start, |N(0, h I_{2m+1})|
  double r2 = 0.0;
  for (int i = 0; i < 2 * m + 1; ++i) {
    const double z = rng.normal();
    r2 += z * z;
  }
  double H = std::sqrt(h * r2);
  for (int s = 1; s < steps; ++s) H = std::abs(H + std::sqrt(h) * rng.normal() + m / std::tanh(H) * h);
  return H;
}

}  // namespace hgbm
