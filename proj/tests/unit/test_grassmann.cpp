#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hgbm/grassmann.hpp"

using namespace hgbm;

namespace {

Matrix sample_contraction(Eigen::Index p, Eigen::Index k, double top_singular, PathRng& rng) {
  Matrix g(p, k);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = Complex(rng.normal(), rng.normal());
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RealVector s(k);
  for (Eigen::Index j = 0; j < k; ++j) s(j) = top_singular * (j == 0 ? 1.0 : rng.uniform());
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

Matrix generic_point() {
  Matrix w(3, 2);
  w << Complex(0.3, 0.1), Complex(-0.2, 0.25), Complex(0.1, -0.3), Complex(0.15, 0.05), Complex(-0.1, 0.2),
      Complex(0.25, -0.1);
  return w;
}

}  // namespace

TEST_CASE("projection") {
  const GroupShape shape = make_shape(5, 2);
  CHECK(project_to_grassmann(BlockGroupElement::identity(shape)).norm() == 0.0);

  PathRng rng(3, 1);
  BlockGroupElement u = BlockGroupElement::identity(shape);
  for (int s = 0; s < 500; ++s) u = step_group(u, sample_increment(shape, 1e-3, rng));
  const Matrix w = project_to_grassmann(u);
  CHECK(contraction_margin(w) > 0.0);

  // right action of U(k) on the last k columns does not move the projection
  const Matrix g = unitary_polar(Matrix(Matrix::Random(2, 2)));
  Matrix diag = Matrix::Identity(5, 5);
  diag.bottomRightCorner(2, 2) = g;
  const Matrix w2 = project_to_grassmann(BlockGroupElement::from_full(u.full() * diag, shape));
  CHECK((w2 - w).norm() <= 1e-12);

  // the boost section projects back to its base point
  CHECK((project_to_grassmann(group_element_over(w)) - w).norm() <= 1e-12);
}

TEST_CASE("intrinsic step covariation matches 2 (I-ww*)_{ii'} (I-w*w)_{j'j}") {
  const int draws = 100000;
  const double dt = 1e-3;
  for (const Matrix& w : {Matrix(Matrix::Zero(3, 2)), generic_point()}) {
    const Eigen::Index p = w.rows();
    const Eigen::Index k = w.cols();
    const Matrix a = Matrix::Identity(p, p) - w * w.adjoint();
    const Matrix b = Matrix::Identity(k, k) - w.adjoint() * w;
    const Eigen::Index d = p * k;
    Matrix sum = Matrix::Zero(d, d);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(d, d);
    PathRng rng(17, 0);
    for (int i = 0; i < draws; ++i) {
      const Matrix dw = (step_grassmann(w, dt, rng) - w).transpose().reshaped();
      const Matrix x = dw * dw.adjoint() / dt;
      sum += x;
      sum_sq += x.cwiseAbs2();
    }
    const Matrix mean = sum / draws;
    const Eigen::MatrixXd var = sum_sq / draws - mean.cwiseAbs2();
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i2 = 0; i2 < p; ++i2)
          for (Eigen::Index j2 = 0; j2 < k; ++j2) {
            const Eigen::Index r = i * k + j;
            const Eigen::Index c = i2 * k + j2;
            const Complex target = 2.0 * a(i, i2) * b(j2, j);
            CHECK(std::abs(mean(r, c) - target) <= 5.0 * std::sqrt(var(r, c) / draws) + 1e-12);
          }
  }
}

TEST_CASE("intrinsic step edge cases") {
  const Matrix w = generic_point();
  CHECK((step_grassmann(w, Matrix::Zero(3, 2)) - w).norm() == 0.0);
  Matrix near(1, 1);
  near(0, 0) = 0.99999;
  Matrix push(1, 1);
  push(0, 0) = 50.0;
  CHECK_THROWS_AS(step_grassmann(near, push), StepRejected);
}

TEST_CASE("invariant density") {
  CHECK(invariant_density(Matrix::Zero(2, 1), 3) == 1.0);
  Matrix w(1, 1);
  w(0, 0) = Complex(0.5, 0.5);  // |w|^2 = 0.5
  CHECK(invariant_density(w, 2) == doctest::Approx(4.0));
  PathRng rng(5, 5);
  for (int i = 0; i < 50; ++i) CHECK(invariant_density(sample_contraction(3, 2, 0.9, rng), 5) >= 1.0);
  Matrix outside(1, 1);
  outside(0, 0) = 1.1;
  CHECK_THROWS_AS(invariant_density(outside, 2), DomainError);
}

TEST_CASE("carre du champ") {
  const Matrix origin = Matrix::Zero(1, 1);
  const ScalarField one = [](const Matrix&) { return Complex(1.0, 0.0); };
  const ScalarField coord = [](const Matrix& w) { return w(0, 0); };
  const ScalarField conj_coord = [](const Matrix& w) { return std::conj(w(0, 0)); };
  CHECK(std::abs(carre_du_champ(one, coord, origin)) <= 1e-8);
  // at w = 0: Gamma(w, w-bar) = 2, and the symmetrized pairing is 4
  const Complex g = carre_du_champ(coord, conj_coord, origin);
  CHECK(std::abs(g - 2.0) <= 1e-6);
  CHECK(std::abs(g + carre_du_champ(conj_coord, coord, origin) - 4.0) <= 1e-6);

  const Matrix w = generic_point();
  const ScalarField f = [](const Matrix& x) { return std::exp(x(0, 0) * std::conj(x(1, 1))) + x(2, 0); };
  const ScalarField h = [](const Matrix& x) { return Complex(x.squaredNorm(), 0.0) * x(0, 1); };
  CHECK(std::abs(carre_du_champ(f, h, w) - carre_du_champ(h, f, w)) <= 1e-8);
  // Gamma(f, g) = (Delta(fg) - f Delta g - g Delta f) / 2
  const ScalarField fh = [&](const Matrix& x) { return f(x) * h(x); };
  const Complex via_generator = 0.5 * (apply_generator(fh, w, 1e-3) - f(w) * apply_generator(h, w, 1e-3) -
                                       h(w) * apply_generator(f, w, 1e-3));
  CHECK(std::abs(carre_du_champ(f, h, w) - via_generator) <= 1e-5);
}

TEST_CASE("generator") {
  const Matrix w = generic_point();
  const ScalarField linear = [](const Matrix& x) { return 2.0 * x(0, 0) - Complex(0, 1) * std::conj(x(2, 1)); };
  CHECK(std::abs(apply_generator(linear, w)) <= 1e-6);

  // tr(w^*w): Delta = 4 tr(I - ww^*) tr(I - w^*w)
  const ScalarField sq = [](const Matrix& x) { return Complex(x.squaredNorm(), 0.0); };
  const double exact = 4.0 * (Matrix(Matrix::Identity(3, 3) - w * w.adjoint())).trace().real() *
                       (Matrix(Matrix::Identity(2, 2) - w.adjoint() * w)).trace().real();
  CHECK(std::abs(apply_generator(sq, w) - exact) <= 1e-6);

  // k = 1 against the complex hyperbolic form with the radial operator
  const ScalarField f = [](const Matrix& x) {
    return std::exp(Complex(0.3, 0.0) * x(0, 0) + std::conj(x(1, 0))) * std::norm(x(0, 0) - 0.1);
  };
  Matrix ball(2, 1);
  ball << Complex(0.2, -0.3), Complex(0.4, 0.1);
  for (const Matrix& x : {Matrix(Matrix::Zero(2, 1)), ball}) {
    CHECK(std::abs(apply_generator(f, x) - complex_hyperbolic_laplacian(f, x)) <= 1e-6);
  }
}

TEST_CASE("generator against a one-step Monte Carlo estimate") {
  const Matrix w = generic_point();
  const ScalarField f = [](const Matrix& x) { return Complex(std::norm(x(0, 0)) + std::norm(x(1, 1)), 0.0); };
  const double h = 1e-2;
  const int draws = 100000;
  PathRng rng(8, 8);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = (f(step_grassmann(w, h, rng)).real() - f(w).real()) / h;
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 0.5 * apply_generator(f, w).real()) <= 4.0 * se);
}

TEST_CASE("appendix B identities") {
  const Matrix a = Matrix::Random(3, 2);
  const AppendixBDefects zero = appendix_b_identities(Matrix::Zero(3, 2), a);
  CHECK(zero.product == 0.0);
  CHECK(zero.inverse == 0.0);
  CHECK(zero.trace_form <= 1e-15);
  PathRng rng(1, 2);
  for (int i = 0; i < 100; ++i) {
    const AppendixBDefects d = appendix_b_identities(sample_contraction(3, 2, rng.uniform(), rng), a);
    CHECK(d.product <= 1e-12);
    CHECK(d.inverse <= 1e-12);
    CHECK(d.trace_form <= 1e-12);
  }
  const Matrix near = sample_contraction(3, 2, 1.0 - 1e-6, rng);
  const AppendixBDefects d = appendix_b_identities(near, a);
  CHECK(d.product <= 1e-6);
  CHECK(d.inverse <= 1e-6);
  CHECK(d.trace_form <= 1e-6);
  CHECK_THROWS_AS(appendix_b_identities(Matrix::Identity(3, 2) * 1.5, a), DomainError);
}

TEST_CASE("Kahler form equals minus the complex Hessian of log det(I - w*w)") {
  const ScalarField log_det = [](const Matrix& x) {
    return Complex(std::log((Matrix(Matrix::Identity(x.cols(), x.cols()) - x.adjoint() * x)).determinant().real()), 0.0);
  };
  for (const Matrix& w : {Matrix(Matrix::Zero(3, 2)), generic_point()}) {
    const Matrix fd = -wirtinger_hessian(log_det, w);
    const Matrix exact = kahler_coefficients(w);
    CHECK((fd - exact).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("integration by parts on the disc") {
  // k = 1, n = 2: compactly supported f, g; int (Delta f) g dmu + int Gamma(f, g) dmu = 0
  auto bump = [](double r2, double radius) {
    const double s = r2 / (radius * radius);
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
  };
  const ScalarField f = [&](const Matrix& x) { return Complex(bump(std::norm(x(0, 0) - 0.2), 0.5), 0.0); };
  const ScalarField g = [&](const Matrix& x) {
    return Complex(bump(std::norm(x(0, 0) - Complex(0.0, 0.25)), 0.55) * (1.0 + x(0, 0).real()), 0.0);
  };
  const int nr = 160;
  const int nt = 160;
  const double r_max = 0.85;
  // midpoint rule in r and theta; integrands are smooth with compact support
  Complex lhs = 0.0;
  double scale = 0.0;
  Matrix x(1, 1);
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * r_max / nr;
    for (int j = 0; j < nt; ++j) {
      const double th = (j + 0.5) * 2.0 * std::numbers::pi / nt;
      x(0, 0) = std::polar(r, th);
      const double weight = r * (r_max / nr) * (2.0 * std::numbers::pi / nt) / std::pow(1.0 - r * r, 2);
      const Complex gamma = carre_du_champ(f, g, x, 1e-4);
      lhs += weight * (apply_generator(f, x, 1e-4) * g(x) + gamma);
      scale += weight * std::abs(gamma);
    }
  }
  CHECK(scale > 0.0);
  CHECK(std::abs(lhs) / scale <= 1e-3);
}

TEST_CASE("contraction is preserved along intrinsic paths") {
  // short horizon: at long horizons 1 - lambda falls below double precision resolution
  const GroupShape shape = make_shape(4, 2);
  long rejected = 0;
  long steps = 0;
  for (int path = 0; path < 20; ++path) {
    PathRng rng(4, path);
    Matrix w = Matrix::Zero(shape.p(), shape.k);
    for (int s = 0; s < 2000; ++s, ++steps) {
      try {
        w = step_grassmann(w, 1e-3, rng);
      } catch (const StepRejected&) {
        ++rejected;
      }
      REQUIRE(contraction_margin(w) > 0.0);
    }
  }
  CHECK(static_cast<double>(rejected) / steps <= 1e-3);
}
