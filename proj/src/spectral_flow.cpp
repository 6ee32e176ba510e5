#include "hgbm/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hgbm/errors.hpp"

namespace hgbm {
namespace {

double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

void require_chart(const SpectralState& s, Chart chart, const char* what) {
  if (s.chart != chart) throw DomainError(what);
}

// Smallest consecutive difference v_j - v_{j+1}; +inf for a single value.
double min_gap(const RealVector& v) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j + 1 < v.size(); ++j) gap = std::min(gap, v(j) - v(j + 1));
  return gap;
}

RealVector sample_dN(Eigen::Index k, double dt, PathRng& rng) {
  RealVector dN(k);
  const double sd = std::sqrt(dt);
  for (Eigen::Index j = 0; j < k; ++j) dN(j) = sd * rng.normal();
  return dN;
}

// log sinh u for u > 0 without overflow.
double log_sinh(double u) { return u + std::log1p(-std::exp(-2.0 * u)) - std::numbers::ln2; }

bool strictly_decreasing(const RealVector& x, bool positive) {
  for (Eigen::Index j = 0; j + 1 < x.size(); ++j)
    if (!(x(j) > x(j + 1))) return false;
  return !positive || x(x.size() - 1) > 0.0;
}

// Damped Newton for min_x 1/2 |x - y|^2 - P(x) with P concave and -P a barrier on the ordered
// chamber. `eval` fills P, grad P and hess P at a chamber point; x0 must lie in the chamber.
template <class Eval>
RealVector newton_barrier(const RealVector& y, RealVector x, bool positive, Eval eval) {
  const Eigen::Index k = x.size();
  // a start on the chamber boundary (zeta_k = 0 at the origin) is moved just inside
  const double nudge = 1e-8 * (1.0 + x.cwiseAbs().maxCoeff());
  if (positive) x(k - 1) = std::max(x(k - 1), nudge);
  for (Eigen::Index j = k - 2; j >= 0; --j) x(j) = std::max(x(j), x(j + 1) + nudge);
  double p = 0.0;
  RealVector g(k);
  Eigen::MatrixXd h(k, k);
  auto objective = [&](const RealVector& v, double pv) { return 0.5 * (v - y).squaredNorm() - pv; };
  eval(x, p, g, h);
  for (int iter = 0; iter < 100; ++iter) {
    const RealVector grad = x - y - g;
    const Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(k, k) - h;
    const RealVector d = -hess.llt().solve(grad);
    const double scale = 1.0 + x.cwiseAbs().maxCoeff();
    if (d.cwiseAbs().maxCoeff() <= 1e-14 * scale) return x;
    const double f0 = objective(x, p);
    double t = 1.0;
    for (;; t *= 0.5) {
      if (t < 1e-12) return x;  // no further progress in double precision
      const RealVector trial = x + t * d;
      if (!strictly_decreasing(trial, positive)) continue;
      double pt = 0.0;
      RealVector gt(k);
      Eigen::MatrixXd ht(k, k);
      eval(trial, pt, gt, ht);
      if (objective(trial, pt) <= f0 + 1e-4 * t * grad.dot(d) + 1e-15 * std::abs(f0)) {
        x = trial;
        p = pt;
        g = gt;
        h = ht;
        break;
      }
    }
    if (t * d.cwiseAbs().maxCoeff() <= 1e-14 * scale) return x;
  }
  throw StepRejected("implicit step: Newton did not converge");
}

// x = y + sum_{l != j} w_jl / (x_j - x_l) (w symmetric, upper triangle used), started from x0.
RealVector solve_pair_implicit(const RealVector& y, const RealVector& x0, const Eigen::MatrixXd& w) {
  const Eigen::Index k = y.size();
  auto eval = [&](const RealVector& x, double& p, RealVector& g, Eigen::MatrixXd& h) {
    p = 0.0;
    g.setZero();
    h.setZero();
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index m = j + 1; m < k; ++m) {
        if (w(j, m) == 0.0) continue;
        const double gap = x(j) - x(m);
        p += w(j, m) * std::log(gap);
        const double d1 = w(j, m) / gap, d2 = -w(j, m) / (gap * gap);
        g(j) += d1;
        g(m) -= d1;
        h(j, j) += d2;
        h(m, m) += d2;
        h(j, m) -= d2;
        h(m, j) -= d2;
      }
  };
  return newton_barrier(y, x0, false, eval);
}

// x = y + h zeta_drift(x): the drift is the gradient of
// sum_j [1/2 log sinh x_j + (n-2k) log sinh(x_j/2)] + sum_{j<l} [log sinh((x_j-x_l)/2) + log sinh((x_j+x_l)/2)].
RealVector solve_zeta_implicit(const RealVector& y, const RealVector& x0, int n, double step) {
  const Eigen::Index k = y.size();
  const double c = n - 2.0 * k;
  auto eval = [&](const RealVector& x, double& p, RealVector& g, Eigen::MatrixXd& h) {
    p = 0.0;
    g.setZero();
    h.setZero();
    for (Eigen::Index j = 0; j < k; ++j) {
      const double s1 = std::sinh(x(j)), s2 = std::sinh(0.5 * x(j));
      p += 0.5 * log_sinh(x(j)) + c * log_sinh(0.5 * x(j));
      g(j) += 0.5 / std::tanh(x(j)) + 0.5 * c / std::tanh(0.5 * x(j));
      h(j, j) -= 0.5 / (s1 * s1) + 0.25 * c / (s2 * s2);
      for (Eigen::Index m = j + 1; m < k; ++m)
        for (int sign : {-1, 1}) {
          const double u = 0.5 * (x(j) + sign * x(m));
          const double su = std::sinh(u);
          const double d1 = 0.5 / std::tanh(u), d2 = -0.25 / (su * su);
          p += log_sinh(u);
          g(j) += d1;
          g(m) += sign * d1;
          h(j, j) += d2;
          h(m, m) += d2;
          h(j, m) += sign * d2;
          h(m, j) += sign * d2;
        }
    }
    p *= step;
    g *= step;
    h *= step;
  };
  return newton_barrier(y, x0, true, eval);
}

}  // namespace

SpectralState chart_convert(const SpectralState& s, Chart target) {
  if (s.chart == target) return s;
  const RealVector& v = s.values;
  SpectralState out{RealVector(v.size()), target, s.time};
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    double lambda = 0.0;
    double rho = 0.0;
    double zeta = 0.0;
    switch (s.chart) {
      case Chart::lambda:
        if (!(v(j) >= 0.0 && v(j) < 1.0)) throw DomainError("chart_convert: lambda must lie in [0, 1)");
        lambda = v(j);
        rho = (1.0 + lambda) / (1.0 - lambda);
        zeta = 2.0 * std::atanh(std::sqrt(lambda));
        break;
      case Chart::rho:
        if (!(v(j) >= 1.0) || !std::isfinite(v(j))) throw DomainError("chart_convert: rho must lie in [1, inf)");
        rho = v(j);
        lambda = (rho - 1.0) / (rho + 1.0);
        zeta = std::acosh(rho);
        break;
      case Chart::zeta:
        if (!(v(j) >= 0.0) || !std::isfinite(v(j))) throw DomainError("chart_convert: zeta must lie in [0, inf)");
        zeta = v(j);
        rho = std::cosh(zeta);
        lambda = std::pow(std::tanh(0.5 * zeta), 2);
        break;
    }
    out.values(j) = target == Chart::lambda ? lambda : target == Chart::rho ? rho : zeta;
  }
  if (target == Chart::zeta) out.time = 4.0 * s.time;
  if (s.chart == Chart::zeta) out.time = 0.25 * s.time;
  return out;
}

RealVector lambda_values(const SpectralState& s) { return chart_convert(s, Chart::lambda).values; }

double log_det_one_minus_j(const SpectralState& s) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < s.values.size(); ++j) {
    const double v = s.values(j);
    switch (s.chart) {
      case Chart::lambda: sum += std::log1p(-v); break;
      case Chart::rho: sum += std::log(2.0 / (v + 1.0)); break;
      case Chart::zeta: sum -= 2.0 * log_cosh(0.5 * v); break;
    }
  }
  return sum;
}

RealVector lambda_drift(const RealVector& lambda, int n) {
  const Eigen::Index k = lambda.size();
  RealVector drift(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double one_minus = 1.0 - lambda(j);
    double pair = 0.0;
    for (Eigen::Index l = 0; l < k; ++l)
      if (l != j) pair += lambda(l) / (lambda(j) - lambda(l));
    drift(j) = 2.0 * ((n - 1.0) - lambda(j)) * one_minus + 4.0 * one_minus * one_minus * pair;
  }
  return drift;
}

RealVector zeta_drift(const RealVector& zeta, int n) {
  const Eigen::Index k = zeta.size();
  RealVector drift(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double d = 0.5 / std::tanh(zeta(j)) + 0.5 * (n - 2.0 * k) / std::tanh(0.5 * zeta(j));
    for (Eigen::Index l = 0; l < k; ++l)
      if (l != j) d += 0.5 * (1.0 / std::tanh(0.5 * (zeta(j) - zeta(l))) + 1.0 / std::tanh(0.5 * (zeta(j) + zeta(l))));
    drift(j) = d;
  }
  return drift;
}

SpectralState step_lambda(const SpectralState& s, int n, double dt, const RealVector& dN,
                          const SpectralStepOptions& opts) {
  require_chart(s, Chart::lambda, "step_lambda: state must be in the lambda chart");
  const Eigen::Index k = s.values.size();
  if (dN.size() != k) throw ShapeError("step_lambda: noise size must be k");
  if (dt == 0.0) return s;
  const RealVector& l = s.values;
  const double total = l.sum();
  RealVector y(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    y(j) = l(j) + 2.0 * ((n - k) - total) * (1.0 - l(j)) * dt + 2.0 * std::sqrt(l(j)) * (1.0 - l(j)) * dN(j);
    if (!std::isfinite(y(j))) throw StepRejected("step_lambda: non-finite value");
  }
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index m = j + 1; m < k; ++m)
      weight(j, m) = 2.0 * dt * (1.0 - l(j)) * (1.0 - l(m)) * (l(j) + l(m));
  SpectralState out{k > 1 ? solve_pair_implicit(y, l, weight) : y, Chart::lambda, s.time + dt};
  if (!(out.values(0) <= 1.0 - opts.boundary_guard)) throw StepRejected("step_lambda: crossed the upper boundary");
  out.values(k - 1) = std::max(out.values(k - 1), 0.0);
  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    const double a = out.values(j), b = out.values(j + 1);
    if (!(a > b)) throw StepRejected("step_lambda: ordering violated");
    const double rho_gap = 2.0 * (a - b) / ((1.0 - a) * (1.0 - b));
    if (rho_gap < opts.gap_guard) throw StepRejected("step_lambda: gap below guard");
  }
  return out;
}

SpectralState step_lambda(const SpectralState& s, int n, double dt, PathRng& rng, const SpectralStepOptions& opts) {
  return step_lambda(s, n, dt, sample_dN(s.values.size(), dt, rng), opts);
}

SpectralState step_zeta(const SpectralState& s, int n, double dt, const RealVector& dN, const SpectralStepOptions& opts) {
  require_chart(s, Chart::zeta, "step_zeta: state must be in the zeta chart");
  const Eigen::Index k = s.values.size();
  if (dN.size() != k) throw ShapeError("step_zeta: noise size must be k");
  if (dt == 0.0) return s;
  const double dtau = 4.0 * dt;
  const RealVector y = s.values + 2.0 * dN;
  if (!y.allFinite()) throw StepRejected("step_zeta: non-finite value");
  // the explicit Euler point is usually within O(dt^2) of the solution; use it to start Newton
  const RealVector euler = y + dtau * zeta_drift(s.values, n);
  const bool inside = euler.allFinite() && strictly_decreasing(euler, true);
  SpectralState out{solve_zeta_implicit(y, inside ? euler : s.values, n, dtau), Chart::zeta, s.time + dtau};
  if (!(out.values(k - 1) > 0.0)) throw StepRejected("step_zeta: left the positive half-line");
  for (Eigen::Index j = 0; j + 1 < k; ++j)
    if (!(out.values(j) - out.values(j + 1) >= opts.gap_guard)) throw StepRejected("step_zeta: gap below guard");
  return out;
}

SpectralState step_zeta(const SpectralState& s, int n, double dt, PathRng& rng, const SpectralStepOptions& opts) {
  return step_zeta(s, n, dt, sample_dN(s.values.size(), dt, rng), opts);
}

SpectralState spread_start(const SpectralState& s, double eps) {
  require_chart(s, Chart::lambda, "spread_start: state must be in the lambda chart");
  SpectralState out = s;
  for (Eigen::Index j = out.values.size() - 2; j >= 0; --j)
    out.values(j) = std::max(out.values(j), out.values(j + 1) + eps);
  if (out.values.size() > 0 && !(out.values(0) < 1.0)) throw DomainError("spread_start: spread leaves [0, 1)");
  return out;
}

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

SignedLog vandermonde(const RealVector& v) {
  SignedLog out{0.0, 1};
  for (Eigen::Index l = 0; l < v.size(); ++l)
    for (Eigen::Index j = l + 1; j < v.size(); ++j) {
      const double d = v(l) - v(j);
      if (d == 0.0) return SignedLog{};
      out.log_abs += std::log(std::abs(d));
      if (d < 0.0) out.sign = -out.sign;
    }
  return out;
}

double doob_constant(int n, int k) { return k * (k - 1.0) * (3.0 * n + 2.0 - 4.0 * k) / 3.0; }

CollisionReport collision_diagnostics(const std::vector<SpectralState>& path, long rejections) {
  CollisionReport report;
  report.rejections = rejections;
  for (const SpectralState& s : path) {
    const double gap = min_gap(s.values);
    if (gap < report.min_gap) {
      report.min_gap = gap;
      report.argmin_time = s.time;
    }
    if (gap <= 0.0 && !report.crossed) {
      report.crossed = true;
      report.crossing_time = s.time;
    }
  }
  return report;
}

KernelHandle make_kernel_handle(int n, int k, double t, const QuadratureConfig& quad) {
  return KernelHandle{std::make_shared<const JacobiHeatKernel>(make_kernel_params(n, k, 0.0), t, quad), quad};
}

double km_transition_density(const RealVector& rho0, const RealVector& rho, const KernelHandle& handle) {
  if (!handle.kernel) throw DomainError("km_transition_density: empty kernel handle");
  const JacobiHeatKernel& q = *handle.kernel;
  const int n = q.params().n;
  const int k = q.params().k;
  if (rho0.size() != k || rho.size() != k) throw ShapeError("km_transition_density: vectors must have k entries");
  const SignedLog v0 = vandermonde(rho0);
  if (v0.sign <= 0) throw DomainError("km_transition_density: degenerate or unordered start");
  const SignedLog v1 = vandermonde(rho);
  if (v1.sign == 0) return 0.0;
  if (v1.sign < 0) throw DomainError("km_transition_density: rho must be strictly decreasing");
  Eigen::MatrixXd M(k, k);
  for (int i = 0; i < k; ++i) {
    const std::vector<double> profile = q.start_profile(rho0(i));
    for (int j = 0; j < k; ++j) M(i, j) = q.evaluate(profile, rho(j));
  }
  return std::exp(-doob_constant(n, k) * q.time() + v1.log_abs - v0.log_abs) * M.determinant();
}

}  // namespace hgbm
