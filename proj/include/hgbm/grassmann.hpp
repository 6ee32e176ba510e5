#pragma once

#include <functional>

#include "hgbm/indefinite_unitary.hpp"

namespace hgbm {

// Points of the hyperbolic Grassmannian are strict contractions w ((n-k) x k)
// with I - w^*w positive definite; J = w^*w.

// Smallest eigenvalue of I - w^*w.
double contraction_margin(const Matrix& w);

// Throws DomainError unless I - w^*w is positive definite.
void require_contraction(const Matrix& w, const char* where);

// w = X Z^{-1}.
Matrix project_to_grassmann(const BlockGroupElement& u);

struct GrassmannStepOptions {
  double boundary_guard = 1e-10;
};

// Complex Brownian increment: real and imaginary parts i.i.d. N(0, dt).
Matrix sample_complex_increment(Eigen::Index rows, Eigen::Index cols, double dt, PathRng& rng);

// Euler-Maruyama step of dw = sqrt(I - ww^*) dB sqrt(I - w^*w).
// Throws StepRejected if the margin drops below the guard.
Matrix step_grassmann(const Matrix& w, const Matrix& dB, const GrassmannStepOptions& options = {});
Matrix step_grassmann(const Matrix& w, double dt, PathRng& rng, const GrassmannStepOptions& options = {});

// det(I - w^*w)^{-n}.
double invariant_density(const Matrix& w, int n);

using ScalarField = std::function<Complex(const Matrix&)>;

// d^2 f / dw_ab dw-bar_cd by central differences; row index a*k + b, column c*k + d.
Matrix wirtinger_hessian(const ScalarField& f, const Matrix& w, double h = 1e-4);

// df/dw_ab and df/dw-bar_ab by central differences.
Matrix wirtinger_gradient(const ScalarField& f, const Matrix& w, double h = 1e-4);
Matrix wirtinger_cogradient(const ScalarField& f, const Matrix& w, double h = 1e-4);

// Coefficient matrix of tr[(I - w^*w)^{-1} dw^* (I - ww^*)^{-1} dw] on dw_ab dw-bar_cd,
// same indexing as wirtinger_hessian.
Matrix kahler_coefficients(const Matrix& w);

Complex carre_du_champ(const ScalarField& f, const ScalarField& g, const Matrix& w, double h = 1e-4);

Complex apply_generator(const ScalarField& f, const Matrix& w, double h = 1e-4);

// k = 1 only: 4(1 - |w|^2)[sum d^2/dw_i dw-bar_i - R R-bar], R = sum w_i d/dw_i.
Complex complex_hyperbolic_laplacian(const ScalarField& f, const Matrix& w, double h = 1e-4);

// Defects are relative to the size of the terms compared, so they stay at
// round-off level as w approaches the boundary.
struct AppendixBDefects {
  double product = 0.0;     // (I + w M^{-1} w^*)(I - ww^*) = I
  double inverse = 0.0;     // I + w M^{-1} w^* = (I - ww^*)^{-1}
  double trace_form = 0.0;  // tr[N^{-1} A M^{-1} A^*] = tr[M^{-1} A^* N^{-1} A]
};

AppendixBDefects appendix_b_identities(const Matrix& w, const Matrix& a);

}  // namespace hgbm
