#pragma once

#include <cstdint>

#include "entropy_core.hpp"

namespace direx {

// Independent brute-force evaluation of any of the six conditional entropies.
// Builds the full classical-quantum post-measurement ensemble explicitly and
// applies the conditional-entropy decomposition with generic eigensolves,
// sharing no formula shortcuts with entropy().
double brute_force_entropy(EntropyQuantity q, const QubitStrategy& s, const InputDistribution& pxy);

// Uniform draw over the valid strategy box, with rejection for the coupled
// (r, theta) constraint. Fixed (seed, index) is fully reproducible.
QubitStrategy random_strategy(uint64_t seed, uint64_t index = 0);

struct GradientCheckResult {
  double max_rel_error = 0;
  bool excluded = false;     // point too close to a non-smooth region
  const char* reason = "";
};

// Central finite differences (step 1e-6) against the optimizer's internal
// gradient on all free parameters of the given quantity's reduced objective.
GradientCheckResult gradient_check(EntropyQuantity q, const QubitStrategy& s, const InputDistribution& pxy);

}  // namespace direx
