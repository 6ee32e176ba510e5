#pragma once

#include <vector>

#include "hgbm/linalg.hpp"
#include "hgbm/random.hpp"

namespace hgbm {

// U(n-k, k) with signature diag(I_{n-k}, -I_k); requires 1 <= k <= n - k.
struct GroupShape {
  int n = 0;
  int k = 0;
  int p() const { return n - k; }
};

GroupShape make_shape(int n, int k);
void validate(const GroupShape& shape);

Matrix signature_matrix(const GroupShape& shape);

// Element of u(n-k, k) in block form [[eps, gamma], [beta, alpha]] with gamma = beta^*.
struct AlgebraElement {
  Matrix eps;    // (n-k) x (n-k), skew-Hermitian
  Matrix alpha;  // k x k, skew-Hermitian
  Matrix beta;   // k x (n-k)

  static AlgebraElement zero(const GroupShape& shape);
  static AlgebraElement from_full(const Matrix& a, const GroupShape& shape);

  GroupShape shape() const;
  Matrix gamma() const { return beta.adjoint(); }
  Matrix full() const;

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator*=(double s);
};

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator*(double s, AlgebraElement a);

// <A, B> = -1/2 tr(I A I B); real on the algebra.
double inner_product(const AlgebraElement& a, const AlgebraElement& b);

// ||A^* I + I A||_F.
double algebra_defect(const AlgebraElement& a);

// Orthonormal basis: sqrt(2) i E_ll first, then skew and i-symmetric pairs
// inside each diagonal block, then the two off-diagonal families, each row-major.
std::vector<AlgebraElement> build_basis(const GroupShape& shape);

// Brownian increment sum_b xi_b sqrt(dt) basis_b.
AlgebraElement sample_increment(const GroupShape& shape, double dt, PathRng& rng);

// Same increment from given Brownian coordinates (one per basis element).
AlgebraElement increment_from_coordinates(const GroupShape& shape, const RealVector& dW);

// Brownian increment on u(k) with the metric inherited from the alpha block.
Matrix unitary_increment_from_coordinates(int k, const RealVector& dW);

// U = [[Y, X], [W, Z]].
struct BlockGroupElement {
  Matrix Y;
  Matrix X;
  Matrix W;
  Matrix Z;

  static BlockGroupElement identity(const GroupShape& shape);
  static BlockGroupElement from_full(const Matrix& u, const GroupShape& shape);

  GroupShape shape() const;
  Matrix full() const;
};

enum class StepScheme { heun, exponential };

struct GroupStepOptions {
  StepScheme scheme = StepScheme::heun;
  // Row relations UIU^* = I amplify the column defect by cond(U)^2, so steps reproject tighter.
  double reproject_tolerance = 1e-13;
  double max_condition = 1e12;
};

// ||U^* I U - I||_F.
double pseudo_unitarity_defect(const BlockGroupElement& u);

// Largest Frobenius defect of the six block relations
// Y*Y - W*W = I, X*X - Z*Z = -I, Y*X - W*Z = 0, YY* - XX* = I, ZZ* - WW* = I, YW* - XZ* = 0.
double block_relation_defect(const BlockGroupElement& u);

// Newton correction U <- U (I + I G / 2)^{-1}, G = U^* I U - I, until the defect is below tol.
BlockGroupElement reproject(const BlockGroupElement& u, double tolerance = 1e-10);

// One Stratonovich step of dU = U o dA followed by reprojection.
BlockGroupElement step_group(const BlockGroupElement& u, const AlgebraElement& dA,
                             const GroupStepOptions& options = {});

// Boost section of the bundle: the group element over w with U(k) fiber coordinate I.
BlockGroupElement group_element_over(const Matrix& w);

}  // namespace hgbm
