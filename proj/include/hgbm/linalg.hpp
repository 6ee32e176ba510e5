#pragma once

#include <Eigen/Dense>

#include <complex>

#include "hgbm/errors.hpp"

namespace hgbm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Eigenvalues in [-clamp, 0) are treated as round-off and set to zero.
inline constexpr double kEigenClamp = 1e-14;

// Applies a real function to the spectrum of a Hermitian matrix.
template <typename Derived, typename Fn>
Matrix hermitian_apply(const Eigen::MatrixBase<Derived>& h, Fn&& fn, double clamp = kEigenClamp) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.derived());
  RealVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0) {
      if (ev(i) < -clamp) throw DomainError("hermitian_apply: matrix is not positive semidefinite");
      ev(i) = 0.0;
    }
    ev(i) = fn(ev(i));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

template <typename Derived>
Matrix hermitian_sqrt(const Eigen::MatrixBase<Derived>& h, double clamp = kEigenClamp) {
  return hermitian_apply(h, [](double x) { return std::sqrt(x); }, clamp);
}

template <typename Derived>
Matrix hermitian_inv_sqrt(const Eigen::MatrixBase<Derived>& h) {
  return hermitian_apply(
      h,
      [](double x) {
        if (x <= 0.0) throw DomainError("hermitian_inv_sqrt: singular matrix");
        return 1.0 / std::sqrt(x);
      },
      0.0);
}

// Smallest eigenvalue of a Hermitian matrix.
template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.derived(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

template <typename Derived>
double skew_hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a.derived() + a.derived().adjoint()).norm();
}

// Nearest unitary via the polar factor.
template <typename Derived>
Matrix unitary_polar(const Eigen::MatrixBase<Derived>& a) {
  Eigen::JacobiSVD<Matrix> svd(a.derived(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace hgbm
