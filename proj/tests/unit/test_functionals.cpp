#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hgbm/errors.hpp"
#include "hgbm/functionals.hpp"
#include "hgbm/grassmann.hpp"
#include "hgbm/indefinite_unitary.hpp"
#include "hgbm/random.hpp"
#include "hgbm/simulation.hpp"

using namespace hgbm;

namespace {

Matrix random_contraction(Eigen::Index p, Eigen::Index k, double radius, PathRng& rng) {
  Matrix w(p, k);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < k; ++j) w(i, j) = Complex(rng.normal(), rng.normal());
  Eigen::JacobiSVD<Matrix> svd(w);
  return (radius / svd.singularValues()(0)) * w;
}

Matrix random_skew(Eigen::Index k, double scale, PathRng& rng) {
  Matrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  return 0.5 * scale * (a - a.adjoint());
}

double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

// omega = 1/2 (X^* dX - dX^* X - (Z^* dZ - dZ^* Z)) at the midpoint of two lifted points.
Matrix connection_form_increment(const Matrix& l0, const Matrix& l1, Eigen::Index p) {
  const Matrix mid = 0.5 * (l0 + l1);
  const Matrix d = l1 - l0;
  const Matrix x = mid.topRows(p), dx = d.topRows(p);
  const Matrix z = mid.bottomRows(mid.rows() - p), dz = d.bottomRows(d.rows() - p);
  return 0.5 * (x.adjoint() * dx - dx.adjoint() * x - (z.adjoint() * dz - dz.adjoint() * z));
}

}  // namespace

TEST_CASE("trace integral") {
  FunctionalAccumulators zero = start_accumulators(0.0, 0.0, 1.0);
  for (int i = 0; i < 100; ++i) accumulate_trace(zero, 0.0, 0.01);
  CHECK(zero.trace_integral == 0.0);
  CHECK(zero.time == doctest::Approx(1.0).epsilon(1e-14));

  FunctionalAccumulators constant = start_accumulators(1.375, 0.0, 1.0);
  for (int i = 0; i < 1000; ++i) accumulate_trace(constant, 1.375, 1e-3);
  CHECK(constant.trace_integral == doctest::Approx(1.375).epsilon(1e-13));

  // linear trace: the trapezoid is exact
  FunctionalAccumulators linear = start_accumulators(0.0, 0.0, 1.0);
  for (int i = 1; i <= 200; ++i) accumulate_trace(linear, 0.005 * i, 0.005);
  CHECK(linear.trace_integral == doctest::Approx(0.5).epsilon(1e-13));

  Matrix J = Matrix::Zero(2, 2);
  J(0, 0) = 0.25;
  J(1, 1) = 0.5;
  FunctionalAccumulators m = start_accumulators(0.75, 0.0, 1.0);
  accumulate_trace(m, J, 0.1);
  CHECK(m.trace_integral == doctest::Approx(0.075).epsilon(1e-15));
}

TEST_CASE("area increment") {
  PathRng rng(21, 0);
  CHECK(std::abs(area_increment(Matrix::Zero(3, 2), random_contraction(3, 2, 0.1, rng))) == 0.0);
  double worst_real = 0.0, worst_form = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix w = random_contraction(3, 2, 0.95 * rng.uniform(), rng);
    const Matrix dw = random_contraction(3, 2, 0.05, rng);
    const Complex a = area_increment(w, dw);
    worst_real = std::max(worst_real, std::abs(a.real()));
    // -1/2 tr[M^{-1}(dw^* w - w^* dw)] = i Im tr[M^{-1} w^* dw]
    const Matrix m_inv = (Matrix::Identity(2, 2) - w.adjoint() * w).inverse();
    const double expected = (m_inv * w.adjoint() * dw).trace().imag();
    worst_form = std::max(worst_form, std::abs(a.imag() - expected));
  }
  CHECK(worst_real <= 1e-12);
  CHECK(worst_form <= 1e-13);
  Matrix outside = Matrix::Zero(2, 1);
  outside(0, 0) = 1.0;
  CHECK_THROWS_AS(area_increment(outside, outside), DomainError);
}

TEST_CASE("full eta increment") {
  PathRng rng(22, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix w = random_contraction(3, 2, 0.9 * rng.uniform(), rng);
    const Matrix dw = random_contraction(3, 2, 1e-3, rng);
    const Matrix eta = eta_increment(w, w + dw);
    CHECK(skew_hermitian_defect(eta) <= 1e-15);
    // the d(I - w^*w)^{1/2} terms are traceless; the rest differs from the left-point area at second order
    const Complex tr = eta.trace();
    CHECK(std::abs(tr - area_increment(w, dw)) <= 50.0 * dw.squaredNorm());
  }
  CHECK(eta_increment(Matrix::Zero(2, 1), Matrix::Zero(2, 1)).norm() == 0.0);
}

TEST_CASE("fiber solution") {
  PathRng rng(23, 0);
  const Matrix theta0 = unitary_polar(random_contraction(3, 3, 1.0, rng));
  const std::vector<Matrix> still = solve_fiber(theta0, std::vector<Matrix>(10, Matrix::Zero(3, 3)));
  for (const Matrix& t : still) CHECK((t - theta0).norm() == 0.0);

  std::vector<Matrix> increments;
  for (int i = 0; i < 10000; ++i) increments.push_back(random_skew(3, 0.03, rng));
  const std::vector<Matrix> path = solve_fiber(theta0, increments);
  CHECK(unitarity_defect(path.back()) <= 1e-8);

  // k = 1: Theta_t = exp(a_t) Theta_0
  Matrix scalar0(1, 1);
  scalar0(0, 0) = std::polar(1.0, 0.7);
  std::vector<Matrix> scalar_increments;
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double phi = 0.05 * rng.normal();
    total += phi;
    Matrix da(1, 1);
    da(0, 0) = Complex(0.0, phi);
    scalar_increments.push_back(da);
  }
  const Matrix end = solve_fiber(scalar0, scalar_increments).back();
  CHECK(std::abs(end(0, 0) - std::polar(1.0, 0.7 + total)) <= 1e-8);

  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(fiber_step(Matrix::Identity(2, 2), bad), DomainError);

  const Matrix z0 = random_contraction(2, 2, 3.0, rng);
  const Matrix start = default_fiber_start(z0);
  CHECK(unitarity_defect(start) <= 1e-13);
  CHECK((start - unitary_polar(z0)).norm() <= 1e-12);
}

TEST_CASE("horizontal lift") {
  PathRng rng(24, 0);
  const Eigen::Index p = 2, k = 2;
  Matrix w = random_contraction(p, k, 0.5, rng);
  Matrix theta = Matrix::Identity(k, k);
  Matrix frozen = Matrix::Identity(k, k);
  Matrix lift = horizontal_lift(w, theta);
  Matrix vertical_lift = horizontal_lift(w, frozen);
  Matrix omega = Matrix::Zero(k, k);
  Matrix omega_frozen = Matrix::Zero(k, k);
  double worst_projection = 0.0, worst_stiefel = 0.0;
  const Matrix signature = Matrix::Identity(k, k);
  for (int i = 0; i < 2000; ++i) {
    const Matrix next = step_grassmann(w, 1e-4, rng);
    theta = fiber_step(theta, eta_increment(w, next));
    const Matrix next_lift = horizontal_lift(next, theta);
    const Matrix next_vertical = horizontal_lift(next, frozen);
    omega += connection_form_increment(lift, next_lift, p);
    omega_frozen += connection_form_increment(vertical_lift, next_vertical, p);
    w = next;
    lift = next_lift;
    vertical_lift = next_vertical;
    // p(lift Omega) = w for any unitary Omega
    const Matrix u = unitary_polar(random_contraction(k, k, 1.0, rng));
    const Matrix moved = lift * u;
    const Matrix x = moved.topRows(p), z = moved.bottomRows(k);
    worst_projection = std::max(worst_projection, (x * z.inverse() - w).norm());
    worst_stiefel = std::max(worst_stiefel, (x.adjoint() * x - z.adjoint() * z + signature).norm());
  }
  MESSAGE("int omega along the lift " << omega.norm() << ", with Theta frozen " << omega_frozen.norm());
  CHECK(omega.norm() <= 1e-3);
  CHECK(omega_frozen.norm() > 20.0 * omega.norm());
  CHECK(worst_projection <= 1e-12);
  CHECK(worst_stiefel <= 1e-12);
}

TEST_CASE("winding angle") {
  const Complex c = std::polar(2.5, -1.1);
  const WindingPath constant = winding_angle(std::vector<Complex>(50, c));
  for (double th : constant.theta) CHECK(th == doctest::Approx(-1.1).epsilon(1e-15));
  CHECK(std::abs(std::polar(1.0, constant.theta.front()) - c / std::abs(c)) <= 1e-15);

  std::vector<Complex> turns;
  for (int i = 0; i <= 1000; ++i) turns.push_back(std::polar(1.0 + 0.3 * i / 1000.0, 4.0 * std::numbers::pi * i / 1000.0));
  const WindingPath two = winding_angle(turns);
  CHECK(two.theta.back() - two.theta.front() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(two.varrho.back() == doctest::Approx(1.3));

  CHECK_THROWS_AS(winding_angle({Complex(1.0, 0.0), Complex(-1.0, 0.1)}), StepRejected);

  // varrho = |det Z| = det(I - J)^{-1/2} along a group path
  const GroupShape shape = make_shape(4, 2);
  PathRng rng(25, 0);
  BlockGroupElement u = BlockGroupElement::identity(shape);
  std::vector<Complex> det_z{u.Z.determinant()};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    u = step_group(u, sample_increment(shape, 1e-3, rng));
    det_z.push_back(u.Z.determinant());
    const Matrix w = project_to_grassmann(u);
    const double m = (Matrix::Identity(2, 2) - w.adjoint() * w).determinant().real();
    worst = std::max(worst, std::abs(std::abs(det_z.back()) * std::sqrt(m) - 1.0));
  }
  CHECK(worst <= 1e-6);
  CHECK_NOTHROW(winding_angle(det_z));
}

TEST_CASE("girsanov martingale") {
  const FunctionalAccumulators start = start_accumulators(0.3, std::log(0.7), 1.0);
  CHECK(girsanov_martingale(start, 0.25, 3, 1) == 1.0);
  CHECK(girsanov_martingale(std::vector<Matrix>{Matrix::Constant(1, 1, 0.3)}, 1e-3, 0.25, 3, 1) == 1.0);

  // M_t <= det(I - J(t))^{-alpha} on every path from the origin
  PathConfig config;
  config.n = 3;
  config.k = 1;
  config.route = Route::lambda;
  config.T = 1.0;
  for (int p = 0; p < 200; ++p) {
    const PathResult r = simulate_path(config, 31, p);
    REQUIRE(r.status == PathStatus::ok);
    const double m = girsanov_martingale(r.acc, 0.25, 3, 1);
    CHECK(m > 0.0);
    CHECK(m <= std::exp(-0.25 * r.acc.log_det_m));
  }

  // the J-path overload agrees with the accumulator form
  std::vector<Matrix> J_path;
  for (int i = 0; i <= 100; ++i) J_path.push_back(Matrix::Constant(1, 1, 0.5 * i / 100.0));
  FunctionalAccumulators acc = start_accumulators(0.0, 0.0, 1.0);
  for (int i = 1; i <= 100; ++i) accumulate_trace(acc, 0.5 * i / 100.0, 0.01);
  acc.log_det_m = std::log(0.5);
  CHECK(girsanov_martingale(J_path, 0.01, 0.3, 3, 1) == doctest::Approx(girsanov_martingale(acc, 0.3, 3, 1)).epsilon(1e-14));
}
