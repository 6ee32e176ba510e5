#include "hgbm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hgbm/errors.hpp"
#include "hgbm/grassmann.hpp"
#include "hgbm/indefinite_unitary.hpp"
#include "hgbm/random.hpp"
#include "hgbm/refinement.hpp"
#include "hgbm/spectral_flow.hpp"

namespace hgbm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RealVector sorted_eigenvalues(const Matrix& J) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(J, Eigen::EigenvaluesOnly);
  RealVector ev = es.eigenvalues().reverse();
  return ev.cwiseMax(0.0);
}

// Smallest consecutive gap in zeta = 2 atanh sqrt(lambda).
double zeta_gap(const RealVector& lambda) {
  double gap = kInf;
  for (Eigen::Index j = 0; j + 1 < lambda.size(); ++j)
    gap = std::min(gap, 2.0 * (std::atanh(std::sqrt(std::min(lambda(j), 1.0 - 1e-16))) -
                               std::atanh(std::sqrt(lambda(j + 1)))));
  return gap;
}

double zeta_gap(const SpectralState& s) {
  if (s.chart != Chart::zeta) return zeta_gap(lambda_values(s));
  double gap = kInf;
  for (Eigen::Index j = 0; j + 1 < s.values.size(); ++j) gap = std::min(gap, s.values(j) - s.values(j + 1));
  return gap;
}

double log_det_one_minus(const Matrix& w) {
  const Matrix m = Matrix::Identity(w.cols(), w.cols()) - w.adjoint() * w;
  return std::log(m.determinant().real());
}

Matrix contraction_from_group(const BlockGroupElement& u) {
  return u.Z.transpose().partialPivLu().solve(u.X.transpose()).transpose();
}

template <typename State, typename Step>
PathResult drive(State state, Step&& step, int dim, const PathConfig& config, PathRng& rng) {
  PathResult result;
  const long steps = std::lround(config.T / config.dt);
  const double sd = std::sqrt(config.dt);
  auto accept = [](const State&, const State&, double, const RealVector&) {};
  RealVector dW(dim);
  try {
    for (long i = 0; i < steps; ++i) {
      for (int j = 0; j < dim; ++j) dW(j) = sd * rng.normal();
      result.rejections += refined_step(state, config.dt, dW, rng, step, accept, config.max_halvings);
    }
  } catch (const Error& e) {
    result.status = PathStatus::failed;
    result.failure = e.what();
  }
  state.finish(result);
  return result;
}

struct MatrixState {
  BlockGroupElement u;
  Matrix w;
  Complex det_z;
  FunctionalAccumulators acc;
  double min_gap = kInf;

  void finish(PathResult& r) const {
    r.acc = acc;
    r.lambda = sorted_eigenvalues(w.adjoint() * w);
    r.min_gap = min_gap;
  }
};

struct GrassmannState {
  Matrix w;
  Matrix omega;
  Complex det_z;
  FunctionalAccumulators acc;
  double min_gap = kInf;

  void finish(PathResult& r) const {
    r.acc = acc;
    r.lambda = sorted_eigenvalues(w.adjoint() * w);
    r.min_gap = min_gap;
  }
};

struct SpectralPathState {
  SpectralState s;
  FunctionalAccumulators acc;
  double min_gap = kInf;

  void finish(PathResult& r) const {
    r.acc = acc;
    r.lambda = lambda_values(s);
    r.min_gap = min_gap;
  }
};

// Shared bookkeeping after a new w has been accepted.
template <typename State>
void update_from_w(State& next, const Matrix& w_old, const Matrix& w_new, Complex det_z_old, Complex det_z_new,
                   double dt) {
  const Matrix J = w_new.adjoint() * w_new;
  const double dtheta = unwrap_increment(det_z_old, det_z_new);
  next.acc.area_im += area_increment(w_old, w_new - w_old).imag();
  next.acc.theta += dtheta;
  next.acc.varrho = std::abs(det_z_new);
  next.acc.log_det_m = log_det_one_minus(w_new);
  accumulate_trace(next.acc, J, dt);
  next.min_gap = std::min(next.min_gap, zeta_gap(sorted_eigenvalues(J)));
}

PathResult run_matrix(const PathConfig& c, const Matrix& w0, PathRng& rng) {
  const GroupShape shape = make_shape(c.n, c.k);
  const BlockGroupElement u0 = group_element_over(w0);
  const Complex dz0 = u0.Z.determinant();
  MatrixState s0{u0, w0, dz0, start_accumulators((w0.adjoint() * w0).trace().real(), log_det_one_minus(w0), dz0)};
  s0.min_gap = zeta_gap(sorted_eigenvalues(w0.adjoint() * w0));
  auto step = [&](const MatrixState& s, double dt, const RealVector& dW) {
    MatrixState next = s;
    next.u = step_group(s.u, increment_from_coordinates(shape, dW));
    next.w = contraction_from_group(next.u);
    if (!(contraction_margin(next.w) >= 1e-10)) throw StepRejected("matrix route: contraction margin below guard");
    next.det_z = next.u.Z.determinant();
    update_from_w(next, s.w, next.w, s.det_z, next.det_z, dt);
    return next;
  };
  return drive(s0, step, noise_dimension(c), c, rng);
}

PathResult run_grassmann(const PathConfig& c, const Matrix& w0, PathRng& rng) {
  const Eigen::Index p = c.n - c.k;
  const Eigen::Index k = c.k;
  const Matrix m0_inv = hermitian_inv_sqrt(Matrix(Matrix::Identity(k, k) - w0.adjoint() * w0));
  // Z0 = (I - J0)^{-1/2} is positive, so Theta0 = (Z0 Z0^*)^{-1/2} Z0 = I.
  const Matrix theta0 = default_fiber_start(m0_inv);
  const Complex dz0 = m0_inv.determinant();
  GrassmannState s0{w0, Matrix::Identity(k, k), dz0,
                    start_accumulators((w0.adjoint() * w0).trace().real(), log_det_one_minus(w0), dz0)};
  s0.acc.fiber = theta0;
  s0.min_gap = zeta_gap(sorted_eigenvalues(w0.adjoint() * w0));
  auto step = [&](const GrassmannState& s, double dt, const RealVector& dW) {
    GrassmannState next = s;
    Matrix dB(p, k);
    for (Eigen::Index a = 0; a < p; ++a)
      for (Eigen::Index b = 0; b < k; ++b) dB(a, b) = Complex(dW(2 * (a * k + b)), dW(2 * (a * k + b) + 1));
    next.w = step_grassmann(s.w, dB);
    next.acc.fiber = fiber_step(s.acc.fiber, eta_increment(s.w, next.w));
    next.omega = fiber_step(s.omega, unitary_increment_from_coordinates(c.k, dW.tail(k * k)));
    const Matrix m_inv = hermitian_inv_sqrt(Matrix(Matrix::Identity(k, k) - next.w.adjoint() * next.w));
    next.det_z = m_inv.determinant() * next.acc.fiber.determinant() * next.omega.determinant();
    update_from_w(next, s.w, next.w, s.det_z, next.det_z, dt);
    return next;
  };
  return drive(s0, step, noise_dimension(c), c, rng);
}

PathResult run_spectral(const PathConfig& c, const Matrix& w0, PathRng& rng) {
  const int k = c.k;
  SpectralState start{sorted_eigenvalues(w0.adjoint() * w0), Chart::lambda, 0.0};
  start = spread_start(start, c.spread);
  if (c.route == Route::zeta) start = chart_convert(start, Chart::zeta);
  const double trace0 = start.values.sum();
  SpectralPathState s0{start, start_accumulators(trace0, log_det_one_minus_j(start), 1.0)};
  s0.min_gap = zeta_gap(start);
  auto step = [&](const SpectralPathState& s, double dt, const RealVector& dW) {
    SpectralPathState next = s;
    const RealVector lambda = lambda_values(s.s);
    const RealVector dN = dW.head(k);
    next.s = next.s.chart == Chart::zeta ? step_zeta(next.s, c.n, dt, dN) : step_lambda(next.s, c.n, dt, dN);
    double d_area = 0.0;
    for (int j = 0; j < k; ++j) d_area += std::sqrt(lambda(j)) * dW(k + j);
    next.acc.area_im += d_area;
    next.acc.theta += d_area + std::numbers::sqrt2 * dW.tail(k).sum();
    next.acc.log_det_m = log_det_one_minus_j(next.s);
    next.acc.varrho = std::exp(-0.5 * next.acc.log_det_m);
    accumulate_trace(next.acc, lambda_values(next.s).sum(), dt);
    next.min_gap = std::min(next.min_gap, zeta_gap(next.s));
    return next;
  };
  return drive(s0, step, noise_dimension(c), c, rng);
}

}  // namespace

std::string route_name(Route route) {
  switch (route) {
    case Route::matrix: return "matrix";
    case Route::grassmann: return "grassmann";
    case Route::lambda: return "lambda";
    case Route::zeta: return "zeta";
  }
  return "unknown";
}

Route parse_route(const std::string& name) {
  if (name == "matrix" || name == "group") return Route::matrix;
  if (name == "grassmann") return Route::grassmann;
  if (name == "lambda") return Route::lambda;
  if (name == "zeta") return Route::zeta;
  throw ConfigError("unknown route '" + name + "'");
}

int noise_dimension(const PathConfig& c) {
  switch (c.route) {
    case Route::matrix: return c.n * c.n;
    case Route::grassmann: return 2 * (c.n - c.k) * c.k + c.k * c.k;
    case Route::lambda:
    case Route::zeta: return 3 * c.k;
  }
  return 0;
}

PathResult simulate_path(const PathConfig& c, std::uint64_t seed, std::uint64_t path) {
  validate(make_shape(c.n, c.k));
  if (!(c.dt > 0.0)) throw ConfigError("simulate_path: dt must be positive");
  if (!(c.T >= 0.0)) throw ConfigError("simulate_path: T must be nonnegative");
  if (std::abs(std::lround(c.T / c.dt) * c.dt - c.T) > 1e-9 * std::max(1.0, c.T))
    throw ConfigError("simulate_path: T must be a multiple of dt");
  Matrix w0 = c.w0.size() == 0 ? Matrix::Zero(c.n - c.k, c.k) : c.w0;
  if (w0.rows() != c.n - c.k || w0.cols() != c.k) throw ConfigError("simulate_path: w0 must be (n-k) x k");
  require_contraction(w0, "simulate_path");
  PathRng rng(seed, path);
  switch (c.route) {
    case Route::matrix: return run_matrix(c, w0, rng);
    case Route::grassmann: return run_grassmann(c, w0, rng);
    case Route::lambda:
    case Route::zeta: return run_spectral(c, w0, rng);
  }
  throw ConfigError("simulate_path: unknown route");
}

}  // namespace hgbm
