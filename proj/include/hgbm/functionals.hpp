#pragma once

#include <vector>

#include "hgbm/linalg.hpp"

namespace hgbm {

// Running path functionals of one trajectory. Angles are in radians; the area is purely
// imaginary and only its imaginary part is stored.
struct FunctionalAccumulators {
  double time = 0.0;
  double trace_integral = 0.0;  // int_0^t tr J ds
  double last_trace = 0.0;      // tr J at `time`, left end of the next trapezoid
  double area_im = 0.0;         // (1/i) int tr(eta)
  double theta0 = 0.0;
  double theta = 0.0;           // unwrapped arg det Z
  double varrho = 1.0;          // |det Z|
  double log_det_m0 = 0.0;      // log det(I - J(0))
  double log_det_m = 0.0;       // log det(I - J(t))
  Matrix fiber;                 // Theta, k x k; empty when not tracked
};

// Accumulators at t = 0 for a start with tr J(0) = trace0, det(I - J(0)) = exp(log_det_m0)
// and det Z(0) = det_z0.
FunctionalAccumulators start_accumulators(double trace0, double log_det_m0, Complex det_z0);

// Trapezoidal step of int tr J: adds dt (last_trace + trace_next) / 2 and advances time.
void accumulate_trace(FunctionalAccumulators& acc, double trace_next, double dt);
void accumulate_trace(FunctionalAccumulators& acc, const Matrix& J_next, double dt);

// Left-point increment of int tr(eta) over w -> w + dw:
// -1/2 tr[(I - J)^{-1/2} (dw^* w - w^* dw) (I - J)^{-1/2}], purely imaginary.
Complex area_increment(const Matrix& w, const Matrix& dw);

// Midpoint increment of the full u(k)-valued form eta over the step w0 -> w1, including the
// d(I - w^*w)^{1/2} terms. Skew-Hermitian; its trace agrees with area_increment to first order.
Matrix eta_increment(const Matrix& w0, const Matrix& w1);

// (Z0 Z0^*)^{-1/2} Z0.
Matrix default_fiber_start(const Matrix& Z0);

// Theta <- exp(da) Theta for skew-Hermitian da, with a polar restoration when the unitarity
// defect exceeds 1e-12. Throws DomainError when da is not skew-Hermitian.
Matrix fiber_step(const Matrix& theta, const Matrix& da);

// Theta_0, Theta_1, ... for the given increments of the connection integral.
std::vector<Matrix> solve_fiber(const Matrix& theta0, const std::vector<Matrix>& increments);

// Horizontal lift (w; I) (I - w^*w)^{-1/2} Theta as an n x k matrix (X; Z).
Matrix horizontal_lift(const Matrix& w, const Matrix& theta);

// arg(next / prev). Throws StepRejected when the magnitude reaches pi/2, which the caller
// resolves by refining dt.
double unwrap_increment(Complex prev, Complex next);

struct WindingPath {
  std::vector<double> theta;
  std::vector<double> varrho;
};

// Continuous unwrapping of arg det Z along a sampled path, starting from its own argument.
WindingPath winding_angle(const std::vector<Complex>& det_z);

// e^{-2 alpha k (n-k) t} [det(I - J(0)) / det(I - J(t))]^alpha exp(-2 alpha^2 int tr J).
double girsanov_martingale(const FunctionalAccumulators& acc, double alpha, int n, int k);

// Same from a sampled J path on a uniform grid of step dt (trapezoidal trace integral).
double girsanov_martingale(const std::vector<Matrix>& J_path, double dt, double alpha, int n, int k);

}  // namespace hgbm
