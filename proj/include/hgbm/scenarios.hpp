#pragma once

#include <cstdint>
#include <vector>

#include "hgbm/harness.hpp"

namespace hgbm {

// Deterministic verification suites shared by the CLI and the acceptance runner. Each returns
// criterion entries whose estimate is the worst defect (or largest z-score) found.

// Appendix B defects on `samples` random contractions per shape (3,1), (4,2), (5,2).
CriterionResult check_appendix_b(int samples, std::uint64_t seed, double tolerance = 1e-12);

// Gram matrix of the u(n-k, k) basis against the identity, shapes (2,1) to (6,3).
CriterionResult check_basis_orthonormality(double tolerance = 1e-12);

// Pseudo-unitarity and block-relation defects along group paths started at the identity.
std::vector<CriterionResult> check_constraint_fidelity(int n, int k, long paths, double T, double dt,
                                                       std::uint64_t seed, double tolerance = 1e-8);

// One-step group increments at a fixed w: E[dw_r conj(dw_c)] / dt against
// 2 (I - ww^*)_{ii'} (I - w^*w)_{j'j}, and E[dw_r dw_c] against 0, at w = 0 and two generic
// points of shape (3, 2). Estimate is the largest |z| score; passes at 5.
std::vector<CriterionResult> check_covariation(long draws, double dt, std::uint64_t seed);

// Jacobi kernel mass for three parameter sets, s_t mass for m = 1, 2, 3, and the m = 1 closed
// form against the general evaluation.
std::vector<CriterionResult> check_kernel_normalizations();

// Worst intertwining defect over test functions, radii, alpha and m.
CriterionResult check_intertwining(double tolerance = 1e-5);

// k = 1, n = 2: |int (L f) g + int Gamma(f, g)| relative to int |Gamma(f, g)| on a disc grid.
CriterionResult check_integration_by_parts(double tolerance = 1e-3);

}  // namespace hgbm
