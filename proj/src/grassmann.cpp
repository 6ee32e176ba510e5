#include "hgbm/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hgbm {

double contraction_margin(const Matrix& w) {
  return min_eigenvalue(Matrix(Matrix::Identity(w.cols(), w.cols()) - w.adjoint() * w));
}

void require_contraction(const Matrix& w, const char* where) {
  if (!(contraction_margin(w) > 0.0)) throw DomainError(std::string(where) + ": not a strict contraction");
}

Matrix project_to_grassmann(const BlockGroupElement& u) {
  Eigen::PartialPivLU<Matrix> lu(u.Z);
  const double det = std::abs(lu.determinant());
  if (!(det > 0.0) || !std::isfinite(det)) throw ProjectionError("project_to_grassmann: Z is singular");
  return u.X * lu.inverse();
}

Matrix sample_complex_increment(Eigen::Index rows, Eigen::Index cols, double dt, PathRng& rng) {
  const double s = std::sqrt(dt);
  Matrix db(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      db(i, j) = Complex(s * re, s * rng.normal());
    }
  }
  return db;
}

Matrix step_grassmann(const Matrix& w, const Matrix& dB, const GrassmannStepOptions& options) {
  const auto p = w.rows();
  const auto k = w.cols();
  const Matrix left = hermitian_sqrt(Matrix(Matrix::Identity(p, p) - w * w.adjoint()));
  const Matrix right = hermitian_sqrt(Matrix(Matrix::Identity(k, k) - w.adjoint() * w));
  Matrix next = w + left * dB * right;
  if (!(contraction_margin(next) >= options.boundary_guard)) {
    throw StepRejected("step_grassmann: contraction margin below boundary guard");
  }
  return next;
}

Matrix step_grassmann(const Matrix& w, double dt, PathRng& rng, const GrassmannStepOptions& options) {
  return step_grassmann(w, sample_complex_increment(w.rows(), w.cols(), dt, rng), options);
}

double invariant_density(const Matrix& w, int n) {
  require_contraction(w, "invariant_density");
  const Matrix m = Matrix::Identity(w.cols(), w.cols()) - w.adjoint() * w;
  return std::pow(m.determinant().real(), -n);
}

namespace {

// Real coordinate index r: entry r / 2 (row-major a*k + b), real part if r even.
Matrix perturbed(const Matrix& w, Eigen::Index r, double delta) {
  Matrix out = w;
  const Eigen::Index entry = r / 2;
  const Eigen::Index k = w.cols();
  out(entry / k, entry % k) += (r % 2 == 0) ? Complex(delta, 0.0) : Complex(0.0, delta);
  return out;
}

Complex first_partial(const ScalarField& f, const Matrix& w, Eigen::Index r, double h) {
  return (f(perturbed(w, r, h)) - f(perturbed(w, r, -h))) / (2.0 * h);
}

Complex second_partial(const ScalarField& f, const Matrix& w, Eigen::Index r, Eigen::Index s, double h) {
  if (r == s) return (f(perturbed(w, r, h)) - 2.0 * f(w) + f(perturbed(w, r, -h))) / (h * h);
  auto at = [&](double a, double b) { return f(perturbed(perturbed(w, r, a), s, b)); };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

}  // namespace

Matrix wirtinger_gradient(const ScalarField& f, const Matrix& w, double h) {
  Matrix g(w.rows(), w.cols());
  for (Eigen::Index e = 0; e < w.size(); ++e) {
    const Complex dx = first_partial(f, w, 2 * e, h);
    const Complex dy = first_partial(f, w, 2 * e + 1, h);
    g(e / w.cols(), e % w.cols()) = 0.5 * (dx - Complex(0.0, 1.0) * dy);
  }
  return g;
}

Matrix wirtinger_cogradient(const ScalarField& f, const Matrix& w, double h) {
  Matrix g(w.rows(), w.cols());
  for (Eigen::Index e = 0; e < w.size(); ++e) {
    const Complex dx = first_partial(f, w, 2 * e, h);
    const Complex dy = first_partial(f, w, 2 * e + 1, h);
    g(e / w.cols(), e % w.cols()) = 0.5 * (dx + Complex(0.0, 1.0) * dy);
  }
  return g;
}

Matrix wirtinger_hessian(const ScalarField& f, const Matrix& w, double h) {
  const Eigen::Index d = w.size();
  const Complex i(0.0, 1.0);
  Matrix hess(d, d);
  for (Eigen::Index e = 0; e < d; ++e) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const Complex xx = second_partial(f, w, 2 * e, 2 * c, h);
      const Complex yy = second_partial(f, w, 2 * e + 1, 2 * c + 1, h);
      const Complex xy = second_partial(f, w, 2 * e, 2 * c + 1, h);
      const Complex yx = second_partial(f, w, 2 * e + 1, 2 * c, h);
      hess(e, c) = 0.25 * (xx + yy + i * (xy - yx));
    }
  }
  return hess;
}

Matrix kahler_coefficients(const Matrix& w) {
  const auto p = w.rows();
  const auto k = w.cols();
  const Matrix m_inv = Matrix(Matrix::Identity(k, k) - w.adjoint() * w).inverse();
  const Matrix n_inv = Matrix(Matrix::Identity(p, p) - w * w.adjoint()).inverse();
  Matrix coeff(p * k, p * k);
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      for (Eigen::Index c = 0; c < p; ++c)
        for (Eigen::Index d = 0; d < k; ++d) coeff(a * k + b, c * k + d) = n_inv(c, a) * m_inv(b, d);
  return coeff;
}

namespace {

// A_{ii'} B_{j'j} arranged on (i, j) x (i', j') with the same flattening as the Hessian.
Matrix diffusion_coefficients(const Matrix& w) {
  const auto p = w.rows();
  const auto k = w.cols();
  const Matrix a = Matrix::Identity(p, p) - w * w.adjoint();
  const Matrix b = Matrix::Identity(k, k) - w.adjoint() * w;
  Matrix coeff(p * k, p * k);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i2 = 0; i2 < p; ++i2)
        for (Eigen::Index j2 = 0; j2 < k; ++j2) coeff(i * k + j, i2 * k + j2) = a(i, i2) * b(j2, j);
  return coeff;
}

}  // namespace

Complex carre_du_champ(const ScalarField& f, const ScalarField& g, const Matrix& w, double h) {
  const Matrix coeff = diffusion_coefficients(w);
  const Matrix df = wirtinger_gradient(f, w, h).transpose().reshaped();
  const Matrix dg = wirtinger_gradient(g, w, h).transpose().reshaped();
  const Matrix dbf = wirtinger_cogradient(f, w, h).transpose().reshaped();
  const Matrix dbg = wirtinger_cogradient(g, w, h).transpose().reshaped();
  return 2.0 * ((df.transpose() * coeff * dbg)(0, 0) + (dg.transpose() * coeff * dbf)(0, 0));
}

Complex apply_generator(const ScalarField& f, const Matrix& w, double h) {
  return 4.0 * diffusion_coefficients(w).cwiseProduct(wirtinger_hessian(f, w, h)).sum();
}

Complex complex_hyperbolic_laplacian(const ScalarField& f, const Matrix& w, double h) {
  if (w.cols() != 1) throw ShapeError("complex_hyperbolic_laplacian: k must be 1");
  const Matrix hess = wirtinger_hessian(f, w, h);
  const Eigen::VectorXcd v = w.col(0);
  const Complex flat = hess.trace();
  const Complex radial = v.transpose() * hess * v.conjugate();
  return 4.0 * (1.0 - v.squaredNorm()) * (flat - radial);
}

AppendixBDefects appendix_b_identities(const Matrix& w, const Matrix& a) {
  require_contraction(w, "appendix_b_identities");
  const auto p = w.rows();
  const auto k = w.cols();
  const Matrix ip = Matrix::Identity(p, p);
  const Matrix m = Matrix::Identity(k, k) - w.adjoint() * w;
  const Matrix n = ip - w * w.adjoint();
  const Matrix m_inv = m.inverse();
  const Matrix n_inv = n.inverse();
  const Matrix lhs = ip + w * m_inv * w.adjoint();
  const Complex t1 = (n_inv * a * m_inv * a.adjoint()).trace();
  const Complex t2 = (m_inv * a.adjoint() * n_inv * a).trace();
  AppendixBDefects d;
  d.product = (lhs * n - ip).norm() / lhs.norm();
  d.inverse = (lhs - n_inv).norm() / n_inv.norm();
  d.trace_form = std::abs(t1 - t2) / std::max(std::abs(t1), std::numeric_limits<double>::min());
  return d;
}

}  // namespace hgbm
