#include "hgbm/indefinite_unitary.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <string>

namespace hgbm {
namespace {

const Complex kI{0.0, 1.0};

// Adds sum_b c_b basis_b to the n x n matrix a, for a block-diagonal split at p.
// With p == n this is the basis of u(n) used for the fiber.
void add_coordinates(Matrix& a, int n, int p, const RealVector& c) {
  Eigen::Index b = 0;
  for (int l = 0; l < n; ++l) a(l, l) += std::numbers::sqrt2 * kI * c(b++);
  auto same_block = [&](int lo, int hi) {
    for (int l = lo; l < hi; ++l) {
      for (int j = l + 1; j < hi; ++j) {
        const double c1 = c(b++);
        const double c2 = c(b++);
        a(l, j) += Complex(c1, c2);
        a(j, l) += Complex(-c1, c2);
      }
    }
  };
  same_block(0, p);
  same_block(p, n);
  for (int l = 0; l < p; ++l) {
    for (int j = p; j < n; ++j) {
      const double c1 = c(b++);
      const double c2 = c(b++);
      a(l, j) += Complex(c1, c2);
      a(j, l) += Complex(c1, -c2);
    }
  }
}

}  // namespace

void validate(const GroupShape& shape) {
  if (shape.k < 1 || shape.k > shape.n - shape.k) {
    throw ShapeError("invalid shape (n=" + std::to_string(shape.n) + ", k=" + std::to_string(shape.k) +
                     "): need 1 <= k <= n - k");
  }
}

GroupShape make_shape(int n, int k) {
  GroupShape shape{n, k};
  validate(shape);
  return shape;
}

Matrix signature_matrix(const GroupShape& shape) {
  Matrix eta = Matrix::Identity(shape.n, shape.n);
  eta.bottomRightCorner(shape.k, shape.k) *= -1.0;
  return eta;
}

AlgebraElement AlgebraElement::zero(const GroupShape& shape) {
  return {Matrix::Zero(shape.p(), shape.p()), Matrix::Zero(shape.k, shape.k),
          Matrix::Zero(shape.k, shape.p())};
}

AlgebraElement AlgebraElement::from_full(const Matrix& a, const GroupShape& shape) {
  if (a.rows() != shape.n || a.cols() != shape.n) throw ShapeError("AlgebraElement::from_full: size mismatch");
  const int p = shape.p();
  const int k = shape.k;
  return {a.topLeftCorner(p, p), a.bottomRightCorner(k, k), a.bottomLeftCorner(k, p)};
}

GroupShape AlgebraElement::shape() const {
  return {static_cast<int>(eps.rows() + alpha.rows()), static_cast<int>(alpha.rows())};
}

Matrix AlgebraElement::full() const {
  const Eigen::Index p = eps.rows();
  const Eigen::Index k = alpha.rows();
  Matrix a(p + k, p + k);
  a << eps, beta.adjoint(), beta, alpha;
  return a;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  eps += other.eps;
  alpha += other.alpha;
  beta += other.beta;
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(double s) {
  eps *= s;
  alpha *= s;
  beta *= s;
  return *this;
}

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }

double inner_product(const AlgebraElement& a, const AlgebraElement& b) {
  const GroupShape shape = a.shape();
  const Matrix eta = signature_matrix(shape);
  return -0.5 * (eta * a.full() * eta * b.full()).trace().real();
}

double algebra_defect(const AlgebraElement& a) {
  const Matrix eta = signature_matrix(a.shape());
  const Matrix full = a.full();
  return (full.adjoint() * eta + eta * full).norm();
}

std::vector<AlgebraElement> build_basis(const GroupShape& shape) {
  validate(shape);
  const int dim = shape.n * shape.n;
  std::vector<AlgebraElement> basis;
  basis.reserve(dim);
  for (int b = 0; b < dim; ++b) {
    basis.push_back(increment_from_coordinates(shape, RealVector::Unit(dim, b)));
  }
  return basis;
}

AlgebraElement increment_from_coordinates(const GroupShape& shape, const RealVector& dW) {
  if (dW.size() != shape.n * shape.n) throw ShapeError("increment_from_coordinates: need n^2 coordinates");
  Matrix a = Matrix::Zero(shape.n, shape.n);
  add_coordinates(a, shape.n, shape.p(), dW);
  return AlgebraElement::from_full(a, shape);
}

AlgebraElement sample_increment(const GroupShape& shape, double dt, PathRng& rng) {
  validate(shape);
  const double s = std::sqrt(dt);
  RealVector dW(shape.n * shape.n);
  for (Eigen::Index i = 0; i < dW.size(); ++i) dW(i) = s * rng.normal();
  return increment_from_coordinates(shape, dW);
}

Matrix unitary_increment_from_coordinates(int k, const RealVector& dW) {
  if (dW.size() != k * k) throw ShapeError("unitary_increment_from_coordinates: need k^2 coordinates");
  Matrix a = Matrix::Zero(k, k);
  add_coordinates(a, k, k, dW);
  return a;
}

BlockGroupElement BlockGroupElement::identity(const GroupShape& shape) {
  validate(shape);
  const int p = shape.p();
  const int k = shape.k;
  return {Matrix::Identity(p, p), Matrix::Zero(p, k), Matrix::Zero(k, p), Matrix::Identity(k, k)};
}

BlockGroupElement BlockGroupElement::from_full(const Matrix& u, const GroupShape& shape) {
  if (u.rows() != shape.n || u.cols() != shape.n) throw ShapeError("BlockGroupElement::from_full: size mismatch");
  const int p = shape.p();
  const int k = shape.k;
  return {u.topLeftCorner(p, p), u.topRightCorner(p, k), u.bottomLeftCorner(k, p), u.bottomRightCorner(k, k)};
}

GroupShape BlockGroupElement::shape() const {
  return {static_cast<int>(Y.rows() + Z.rows()), static_cast<int>(Z.rows())};
}

Matrix BlockGroupElement::full() const {
  const Eigen::Index n = Y.rows() + Z.rows();
  Matrix u(n, n);
  u << Y, X, W, Z;
  return u;
}

double pseudo_unitarity_defect(const BlockGroupElement& u) {
  const Matrix eta = signature_matrix(u.shape());
  const Matrix full = u.full();
  return (full.adjoint() * eta * full - eta).norm();
}

double block_relation_defect(const BlockGroupElement& u) {
  const auto p = u.Y.rows();
  const auto k = u.Z.rows();
  const Matrix ip = Matrix::Identity(p, p);
  const Matrix ik = Matrix::Identity(k, k);
  double d = 0.0;
  d = std::max(d, (u.Y.adjoint() * u.Y - u.W.adjoint() * u.W - ip).norm());
  d = std::max(d, (u.X.adjoint() * u.X - u.Z.adjoint() * u.Z + ik).norm());
  d = std::max(d, (u.Y.adjoint() * u.X - u.W.adjoint() * u.Z).norm());
  d = std::max(d, (u.Y * u.Y.adjoint() - u.X * u.X.adjoint() - ip).norm());
  d = std::max(d, (u.Z * u.Z.adjoint() - u.W * u.W.adjoint() - ik).norm());
  d = std::max(d, (u.Y * u.W.adjoint() - u.X * u.Z.adjoint()).norm());
  return d;
}

BlockGroupElement reproject(const BlockGroupElement& u, double tolerance) {
  // The correction is computed in long double: the round-off of G = U^* I U - I in double is
  // about eps |U|^2, and the row relations would amplify it by another |U|^2.
  using LongMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  const GroupShape shape = u.shape();
  const LongMatrix eta = signature_matrix(shape).cast<std::complex<long double>>();
  const LongMatrix id = LongMatrix::Identity(shape.n, shape.n);
  LongMatrix full = u.full().cast<std::complex<long double>>();
  LongMatrix g = full.adjoint() * eta * full - eta;
  long double defect = g.norm();
  if (defect >= 0.5L) throw ProjectionError("reproject: defect " + std::to_string(static_cast<double>(defect)) + " >= 0.5");
  for (int iter = 0; iter < 8 && defect > 1e-3L * tolerance; ++iter) {
    const LongMatrix corrected = (id + 0.5L * eta * g).partialPivLu().solve(id);
    const LongMatrix candidate = full * corrected;
    const LongMatrix g_next = candidate.adjoint() * eta * candidate - eta;
    const long double next = g_next.norm();
    if (next >= defect) break;  // round-off floor reached
    full = candidate;
    g = g_next;
    defect = next;
  }
  return BlockGroupElement::from_full(full.cast<Complex>(), shape);
}

BlockGroupElement step_group(const BlockGroupElement& u, const AlgebraElement& dA, const GroupStepOptions& options) {
  const GroupShape shape = u.shape();
  const Matrix a = dA.full();
  Matrix propagator;
  if (options.scheme == StepScheme::heun) {
    // Predictor U(I + dA), corrector U + (U + U(I + dA)) dA / 2.
    propagator = Matrix::Identity(shape.n, shape.n) + a + 0.5 * a * a;
  } else {
    propagator = a.exp();
  }
  BlockGroupElement next = reproject(BlockGroupElement::from_full(u.full() * propagator, shape),
                                     options.reproject_tolerance);
  Eigen::JacobiSVD<Matrix> svd(next.Z);
  const auto& sv = svd.singularValues();
  const double condition = sv(0) / sv(sv.size() - 1);
  if (!(condition <= options.max_condition)) {
    throw DegenerateStepError("step_group: Z block condition number " + std::to_string(condition), condition);
  }
  return next;
}

BlockGroupElement group_element_over(const Matrix& w) {
  const auto p = w.rows();
  const auto k = w.cols();
  const Matrix n_inv = hermitian_inv_sqrt(Matrix(Matrix::Identity(p, p) - w * w.adjoint()));
  const Matrix m_inv = hermitian_inv_sqrt(Matrix(Matrix::Identity(k, k) - w.adjoint() * w));
  return {n_inv, w * m_inv, w.adjoint() * n_inv, m_inv};
}

}  // namespace hgbm
