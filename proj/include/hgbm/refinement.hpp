#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "hgbm/errors.hpp"
#include "hgbm/linalg.hpp"
#include "hgbm/random.hpp"

namespace hgbm {

// Advances `state` over dt driven by the Brownian increment dW. When `step` (or `accept`)
// throws StepRejected, the interval is split at a Brownian-bridge midpoint
// dW1 = dW/2 + (sqrt(dt)/2) xi, dW2 = dW - dW1, and both halves are retried, so refinement
// never changes the driving path. `accept(old, next, dt, dW)` commits functionals of an
// accepted sub-step and must not modify anything before it throws.
// Returns the number of rejections; throws RefinementExhausted past max_halvings.
template <typename State, typename Step, typename Accept>
long refined_step(State& state, double dt, const RealVector& dW, PathRng& rng, Step&& step, Accept&& accept,
                  int max_halvings = 20, int depth = 0) {
  try {
    State next = step(state, dt, dW);
    accept(state, next, dt, dW);
    state = std::move(next);
    return 0;
  } catch (const StepRejected& e) {
    if (depth >= max_halvings)
      throw RefinementExhausted(std::string("step still rejected after the maximum number of halvings: ") + e.what());
  }
  RealVector dW1(dW.size());
  for (Eigen::Index i = 0; i < dW.size(); ++i) dW1(i) = 0.5 * dW(i) + 0.5 * std::sqrt(dt) * rng.normal();
  const RealVector dW2 = dW - dW1;
  long rejections = 1;
  rejections += refined_step(state, 0.5 * dt, dW1, rng, step, accept, max_halvings, depth + 1);
  rejections += refined_step(state, 0.5 * dt, dW2, rng, step, accept, max_halvings, depth + 1);
  return rejections;
}

}  // namespace hgbm
