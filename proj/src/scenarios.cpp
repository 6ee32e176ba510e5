#include "hgbm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hgbm/grassmann.hpp"
#include "hgbm/indefinite_unitary.hpp"
#include "hgbm/kernels.hpp"
#include "hgbm/quadrature.hpp"
#include "hgbm/random.hpp"

namespace hgbm {
namespace {

CriterionResult at_most(std::string name, double estimate, double tolerance, std::string detail = {}) {
  return {std::move(name), 0.0, estimate, tolerance, estimate <= tolerance, std::move(detail)};
}

Matrix random_contraction(Eigen::Index p, Eigen::Index k, double top, PathRng& rng) {
  Matrix g(p, k);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = Complex(rng.normal(), rng.normal());
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RealVector s(k);
  for (Eigen::Index j = 0; j < k; ++j) s(j) = top * (j == 0 ? 1.0 : rng.uniform());
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

// Real z-score of the mean of a sample, guarding a zero-variance coordinate.
struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  double z(double target, long n) const {
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0);
    const double se = std::sqrt(var / n);
    const double diff = std::abs(mean - target);
    return se > 0.0 ? diff / se : (diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity());
  }
};

}  // namespace

CriterionResult check_appendix_b(int samples, std::uint64_t seed, double tolerance) {
  PathRng rng(seed, 0);
  double worst = 0.0;
  for (auto [n, k] : {std::pair{3, 1}, {4, 2}, {5, 2}}) {
    for (int i = 0; i < samples; ++i) {
      const Matrix w = random_contraction(n - k, k, rng.uniform(), rng);
      const Matrix a = random_contraction(n - k, k, 1.0, rng);
      const AppendixBDefects d = appendix_b_identities(w, a);
      worst = std::max({worst, d.product, d.inverse, d.trace_form});
    }
  }
  return at_most("appendix B identity defects", worst, tolerance,
                 std::to_string(samples) + " contractions per shape (3,1), (4,2), (5,2)");
}

CriterionResult check_basis_orthonormality(double tolerance) {
  double worst = 0.0;
  for (auto [n, k] : {std::pair{2, 1}, {3, 1}, {4, 1}, {4, 2}, {5, 2}, {6, 3}}) {
    const std::vector<AlgebraElement> basis = build_basis(make_shape(n, k));
    for (std::size_t a = 0; a < basis.size(); ++a) {
      worst = std::max(worst, algebra_defect(basis[a]));
      for (std::size_t b = 0; b < basis.size(); ++b)
        worst = std::max(worst, std::abs(inner_product(basis[a], basis[b]) - (a == b ? 1.0 : 0.0)));
    }
  }
  return at_most("basis orthonormality defect", worst, tolerance, "shapes (2,1) to (6,3)");
}

std::vector<CriterionResult> check_constraint_fidelity(int n, int k, long paths, double T, double dt,
                                                       std::uint64_t seed, double tolerance) {
  const GroupShape shape = make_shape(n, k);
  const long steps = std::lround(T / dt);
  double unitarity = 0.0, blocks = 0.0;
  for (long p = 0; p < paths; ++p) {
    PathRng rng(seed, p);
    BlockGroupElement u = BlockGroupElement::identity(shape);
    for (long i = 0; i < steps; ++i) {
      u = step_group(u, sample_increment(shape, dt, rng));
      unitarity = std::max(unitarity, pseudo_unitarity_defect(u));
      blocks = std::max(blocks, block_relation_defect(u));
    }
  }
  const std::string where = "(" + std::to_string(n) + "," + std::to_string(k) + "), " + std::to_string(paths) + " paths";
  return {at_most("group path pseudo-unitarity defect " + where, unitarity, tolerance),
          at_most("group path block relation defect " + where, blocks, tolerance)};
}

std::vector<CriterionResult> check_covariation(long draws, double dt, std::uint64_t seed) {
  Matrix generic(3, 2);
  generic << Complex(0.3, 0.1), Complex(-0.2, 0.25), Complex(0.1, -0.3), Complex(0.15, 0.05), Complex(-0.1, 0.2),
      Complex(0.25, -0.1);
  PathRng point_rng(seed, 1u << 20);
  const Matrix deep = random_contraction(3, 2, 0.8, point_rng);
  const GroupShape shape = make_shape(5, 2);
  std::vector<CriterionResult> out;
  int label = 0;
  for (const Matrix& w : {Matrix(Matrix::Zero(3, 2)), generic, deep}) {
    const Eigen::Index p = w.rows(), k = w.cols(), d = p * k;
    const Matrix a = Matrix::Identity(p, p) - w * w.adjoint();
    const Matrix b = Matrix::Identity(k, k) - w.adjoint() * w;
    const BlockGroupElement u = group_element_over(w);
    std::vector<Moments> herm(4 * d * d), sym(4 * d * d);
    PathRng rng(seed, label);
    for (long i = 0; i < draws; ++i) {
      const Matrix next = project_to_grassmann(step_group(u, sample_increment(shape, dt, rng)));
      const Matrix dw = (next - w).transpose().reshaped();
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) {
          const Complex x = dw(r) * std::conj(dw(c)) / dt;
          const Complex y = dw(r) * dw(c) / dt;
          herm[2 * (r * d + c)].add(x.real());
          herm[2 * (r * d + c) + 1].add(x.imag());
          sym[2 * (r * d + c)].add(y.real());
          sym[2 * (r * d + c) + 1].add(y.imag());
        }
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i2 = 0; i2 < p; ++i2)
          for (Eigen::Index j2 = 0; j2 < k; ++j2) {
            const Eigen::Index r = i * k + j, c = i2 * k + j2;
            const Complex target = 2.0 * a(i, i2) * b(j2, j);
            worst = std::max({worst, herm[2 * (r * d + c)].z(target.real(), draws),
                              herm[2 * (r * d + c) + 1].z(target.imag(), draws), sym[2 * (r * d + c)].z(0.0, draws),
                              sym[2 * (r * d + c) + 1].z(0.0, draws)});
          }
    static const char* names[] = {"w = 0", "generic point", "point with |w| = 0.8"};
    out.push_back(at_most(std::string("quadratic covariation z-score at ") + names[label], worst, 5.0,
                          std::to_string(draws) + " increments, dt " + std::to_string(dt)));
    ++label;
  }
  return out;
}

std::vector<CriterionResult> check_kernel_normalizations() {
  std::vector<CriterionResult> out;
  double worst_q = 0.0;
  struct Set {
    int n, k;
    double t, u1;
  };
  for (const Set& s : {Set{3, 1, 1.0, 2.0}, Set{4, 1, 0.25, 5.0}, Set{5, 2, 0.5, 1.5}}) {
    const JacobiHeatKernel q(make_kernel_params(s.n, s.k, 0.0), s.t);
    const auto profile = q.start_profile(s.u1);
    const double mass = integrate(q.spatial_rule(s.u1), [&](double x) {
      return q.evaluate(profile, std::cosh(x)) * std::sinh(x);
    });
    worst_q = std::max(worst_q, std::abs(mass - 1.0));
  }
  out.push_back(at_most("Jacobi heat kernel mass defect", worst_q, 1e-6,
                        "(n,k,t,u1) = (3,1,1,2), (4,1,0.25,5), (5,2,0.5,1.5)"));
  double worst_s = 0.0;
  for (int m : {1, 2, 3})
    for (double t : {0.5, 1.0, 2.0}) {
      const QuadratureRule rule = panel_rule(0.0, hyperbolic_x_max(t, m), 48, 16);
      const double mass = integrate(rule, [&](double x) {
        return hyperbolic_heat_kernel(x, t, m) * hyperbolic_volume_density(x, m);
      });
      worst_s = std::max(worst_s, std::abs(mass - 1.0));
    }
  out.push_back(at_most("hyperbolic heat kernel mass defect", worst_s, 1e-8, "m = 1, 2, 3; t = 0.5, 1, 2"));
  double worst_closed = 0.0;
  for (double t : {0.3, 1.0, 2.5})
    for (double x = 0.05; x < 8.0; x += 0.05) {
      const double closed = std::exp(-t / 2) * x * std::exp(-x * x / (2 * t)) /
                            (2 * std::numbers::pi * std::sqrt(2 * std::numbers::pi * t) * t * std::sinh(x));
      worst_closed = std::max(worst_closed, std::abs(hyperbolic_heat_kernel(x, t, 1) / closed - 1.0));
    }
  out.push_back(at_most("m = 1 closed form vs recursion (relative)", worst_closed, 1e-12));
  return out;
}

CriterionResult check_intertwining(double tolerance) {
  const std::vector<std::function<double(double)>> functions{
      [](double) { return 1.0; },
      [](double r) { return std::exp(-(r - 1.2) * (r - 1.2)); },
      [](double r) { return std::sin(r); },
      [](double r) { return 1.0 / std::cosh(r); },
  };
  double worst = 0.0;
  for (const auto& f : functions)
    for (int m : {1, 2, 3})
      for (double alpha : {0.0, 0.15, 0.3, 0.45})
        for (int i = 0; i <= 15; ++i) worst = std::max(worst, intertwining_defect(f, 0.5 + 0.1 * i, alpha, m));
  return at_most("intertwining identity defect", worst, tolerance,
                 "4 test functions, m = 1..3, alpha in {0, 0.15, 0.3, 0.45}, r in [0.5, 2]");
}

CriterionResult check_integration_by_parts(double tolerance) {
  auto bump = [](double r2, double radius) {
    const double s = r2 / (radius * radius);
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
  };
  const ScalarField f = [&](const Matrix& x) { return Complex(bump(std::norm(x(0, 0) - 0.2), 0.5), 0.0); };
  const ScalarField g = [&](const Matrix& x) {
    return Complex(bump(std::norm(x(0, 0) - Complex(0.0, 0.25)), 0.55) * (1.0 + x(0, 0).real()), 0.0);
  };
  const int nr = 160, nt = 160;
  const double r_max = 0.85;
  Complex lhs = 0.0;
  double scale = 0.0;
  Matrix x(1, 1);
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * r_max / nr;
    for (int j = 0; j < nt; ++j) {
      x(0, 0) = std::polar(r, (j + 0.5) * 2.0 * std::numbers::pi / nt);
      const double weight = r * (r_max / nr) * (2.0 * std::numbers::pi / nt) / std::pow(1.0 - r * r, 2);
      const Complex gamma = carre_du_champ(f, g, x);
      lhs += weight * (apply_generator(f, x) * g(x) + gamma);
      scale += weight * std::abs(gamma);
    }
  }
  return at_most("integration by parts on the disc (relative)", std::abs(lhs) / scale, tolerance,
                 "k = 1, n = 2, midpoint grid 160 x 160");
}

}  // namespace hgbm
