#include "hgbm/functionals.hpp"

#include <cmath>
#include <numbers>

#include "hgbm/errors.hpp"

namespace hgbm {
namespace {

Matrix one_minus_j(const Matrix& w) {
  return Matrix::Identity(w.cols(), w.cols()) - w.adjoint() * w;
}

}  // namespace

FunctionalAccumulators start_accumulators(double trace0, double log_det_m0, Complex det_z0) {
  FunctionalAccumulators acc;
  acc.last_trace = trace0;
  acc.theta0 = std::arg(det_z0);
  acc.theta = acc.theta0;
  acc.varrho = std::abs(det_z0);
  acc.log_det_m0 = log_det_m0;
  acc.log_det_m = log_det_m0;
  return acc;
}

void accumulate_trace(FunctionalAccumulators& acc, double trace_next, double dt) {
  acc.trace_integral += 0.5 * dt * (acc.last_trace + trace_next);
  acc.last_trace = trace_next;
  acc.time += dt;
}

void accumulate_trace(FunctionalAccumulators& acc, const Matrix& J_next, double dt) {
  accumulate_trace(acc, J_next.trace().real(), dt);
}

Complex area_increment(const Matrix& w, const Matrix& dw) {
  const Matrix m = one_minus_j(w);
  if (!(min_eigenvalue(m) > 0.0)) throw DomainError("area_increment: w is not a strict contraction");
  const Matrix s = hermitian_inv_sqrt(m);
  const Matrix form = dw.adjoint() * w - w.adjoint() * dw;
  return -0.5 * (s * form * s).trace();
}

Matrix eta_increment(const Matrix& w0, const Matrix& w1) {
  const Matrix wm = 0.5 * (w0 + w1);
  const Matrix dw = w1 - w0;
  const Matrix mid_inv = hermitian_inv_sqrt(one_minus_j(wm));
  const Matrix s0 = hermitian_sqrt(one_minus_j(w0));
  const Matrix s1 = hermitian_sqrt(one_minus_j(w1));
  const Matrix ds = s1 - s0;
  const Matrix s_inv = (0.5 * (s0 + s1)).inverse();
  const Matrix eta = mid_inv * (wm.adjoint() * dw - dw.adjoint() * wm) * mid_inv - s_inv * ds + ds * s_inv;
  const Matrix half = 0.5 * eta;
  return 0.5 * (half - half.adjoint());  // drop the round-off Hermitian part
}

Matrix default_fiber_start(const Matrix& Z0) {
  return hermitian_inv_sqrt(Matrix(Z0 * Z0.adjoint())) * Z0;
}

Matrix fiber_step(const Matrix& theta, const Matrix& da) {
  if (skew_hermitian_defect(da) > 1e-10 * (1.0 + da.norm())) throw DomainError("fiber_step: increment is not skew-Hermitian");
  const Matrix h = Complex(0.0, -0.5) * (da - da.adjoint());  // Hermitian, da = i h
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index j = 0; j < h.rows(); ++j) phases(j) = std::polar(1.0, es.eigenvalues()(j));
  Matrix next = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * theta;
  const double defect = (next.adjoint() * next - Matrix::Identity(next.cols(), next.cols())).norm();
  if (defect > 1e-12) next = unitary_polar(next);
  return next;
}

std::vector<Matrix> solve_fiber(const Matrix& theta0, const std::vector<Matrix>& increments) {
  std::vector<Matrix> path;
  path.reserve(increments.size() + 1);
  path.push_back(theta0);
  for (const Matrix& da : increments) path.push_back(fiber_step(path.back(), da));
  return path;
}

Matrix horizontal_lift(const Matrix& w, const Matrix& theta) {
  const Eigen::Index p = w.rows();
  const Eigen::Index k = w.cols();
  const Matrix z = hermitian_inv_sqrt(one_minus_j(w)) * theta;
  Matrix out(p + k, k);
  out.topRows(p) = w * z;
  out.bottomRows(k) = z;
  return out;
}

double unwrap_increment(Complex prev, Complex next) {
  const double d = std::arg(next / prev);
  if (!(std::abs(d) < 0.5 * std::numbers::pi)) throw StepRejected("unwrap_increment: argument increment reaches pi/2");
  return d;
}

WindingPath winding_angle(const std::vector<Complex>& det_z) {
  WindingPath out;
  if (det_z.empty()) return out;
  out.theta.reserve(det_z.size());
  out.varrho.reserve(det_z.size());
  out.theta.push_back(std::arg(det_z.front()));
  out.varrho.push_back(std::abs(det_z.front()));
  for (std::size_t i = 1; i < det_z.size(); ++i) {
    out.theta.push_back(out.theta.back() + unwrap_increment(det_z[i - 1], det_z[i]));
    out.varrho.push_back(std::abs(det_z[i]));
  }
  return out;
}

double girsanov_martingale(const FunctionalAccumulators& acc, double alpha, int n, int k) {
  return std::exp(-2.0 * alpha * k * (n - k) * acc.time + alpha * (acc.log_det_m0 - acc.log_det_m) -
                  2.0 * alpha * alpha * acc.trace_integral);
}

double girsanov_martingale(const std::vector<Matrix>& J_path, double dt, double alpha, int n, int k) {
  if (J_path.empty()) throw DomainError("girsanov_martingale: empty path");
  auto log_det = [](const Matrix& J) {
    const Matrix m = Matrix::Identity(J.rows(), J.cols()) - J;
    if (!(min_eigenvalue(m) > 0.0)) throw DomainError("girsanov_martingale: I - J is not positive definite");
    return std::log(m.determinant().real());
  };
  FunctionalAccumulators acc = start_accumulators(J_path.front().trace().real(), log_det(J_path.front()), 1.0);
  for (std::size_t i = 1; i < J_path.size(); ++i) accumulate_trace(acc, J_path[i], dt);
  acc.log_det_m = log_det(J_path.back());
  return girsanov_martingale(acc, alpha, n, k);
}

}  // namespace hgbm
