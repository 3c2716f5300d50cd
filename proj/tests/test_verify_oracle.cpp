#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curve_builder.hpp"
#include "rng.hpp"
#include "verify_oracle.hpp"

using namespace direx;

TEST_CASE("dual-path agreement on random strategies") {
  const auto uni = InputDistribution::uniform();
  const auto biased = InputDistribution::product(0.3, 0.15);
  double worst = 0;
  for (uint64_t i = 0; i < 1500; ++i) {
    const auto s = random_strategy(0x0AC1E, i);
    const auto& pxy = i % 3 == 0 ? biased : uni;
    for (int q = 0; q < 6; ++q) {
      const auto quantity = static_cast<EntropyQuantity>(q);
      worst = std::max(worst, std::fabs(entropy(quantity, s, pxy) - brute_force_entropy(quantity, s, pxy)));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("brute force on degenerate states") {
  const auto uni = InputDistribution::uniform();

  // maximally mixed: both paths must agree; E is decoupled
  const QubitStrategy mixed{{0.0, 0.0, 0.0}, {0.2, -0.7, 0.5, 1.1}};
  for (int q = 0; q < 6; ++q) {
    const auto quantity = static_cast<EntropyQuantity>(q);
    CHECK(entropy(quantity, mixed, uni) ==
          doctest::Approx(brute_force_entropy(quantity, mixed, uni)).epsilon(1e-11));
  }
  // E holds the purification, so the outputs carry no entropy given E
  CHECK(std::fabs(brute_force_entropy(EntropyQuantity::AB_XYE, mixed, uni)) < 1e-10);
  CHECK(std::fabs(brute_force_entropy(EntropyQuantity::A_XYE, mixed, uni)) < 1e-10);

  // pure maximally entangled state with aligned measurements
  const QubitStrategy pure{{1.0, 0.0, 0.25}, {0.0, kPi / 4, 0.0, -kPi / 8}};
  CHECK(brute_force_entropy(EntropyQuantity::AB_00E, pure, uni) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(entropy(EntropyQuantity::AB_00E, pure, uni) ==
        doctest::Approx(brute_force_entropy(EntropyQuantity::AB_00E, pure, uni)).epsilon(1e-11));
}

TEST_CASE("random_strategy validity and reproducibility") {
  double score_lo = 1.0, score_hi = 0.0;
  for (uint64_t i = 0; i < 100000; ++i) {
    const auto s = random_strategy(77, i);
    validate_strategy(s);  // throws on violation
    const double w = chsh_score(s);
    score_lo = std::min(score_lo, w);
    score_hi = std::max(score_hi, w);
  }
  // empirical score range covers most of the achievable interval
  CHECK(score_lo < kQuantumMinScore + 0.05);
  CHECK(score_hi > kQuantumMaxScore - 0.05);

  const auto a = random_strategy(123, 42);
  const auto b = random_strategy(123, 42);
  CHECK(a.state.r == b.state.r);
  CHECK(a.state.delta == b.state.delta);
  CHECK(a.angles.beta1 == b.angles.beta1);
  const auto c = random_strategy(124, 42);
  CHECK(a.state.r != c.state.r);
}

TEST_CASE("gradient check") {
  const auto uni = InputDistribution::uniform();

  // smooth interior points: jittered optimal-frame strategies
  int checked = 0;
  for (uint64_t i = 0; i < 60; ++i) {
    CounterRng rng(0x96AD, i);
    const double th = rng.uniform(0.05, 0.25);
    MeasurementAngles m{0.05 + rng.uniform(0.0, 0.1), kPi / 4 + rng.uniform(-0.1, 0.1),
                        kPi / 8 + rng.uniform(-0.1, 0.1), -kPi / 8 + rng.uniform(-0.1, 0.1)};
    double r;
    try {
      r = solve_r_for_score(th, m, rng.uniform(0.77, 0.82));
    } catch (const std::exception&) {
      continue;
    }
    if (r < 0.05 || r > 0.99 || th > theta_max(r) - 1e-4) continue;
    const double lo = -0.25 + r * std::cos(th) / 2;
    const double hi = 0.25 - r * std::sin(th) / 2;
    const QubitStrategy s{{r, th, lo + rng.uniform(0.2, 0.8) * (hi - lo)}, m};
    for (int q = 0; q < 6; ++q) {
      const auto res = gradient_check(static_cast<EntropyQuantity>(q), s, uni);
      if (res.excluded) continue;
      ++checked;
      CHECK(res.max_rel_error <= 1e-4);
    }
  }
  CHECK(checked > 40);

  // boundary / non-smooth points are reported as excluded
  const auto r0 = gradient_check(EntropyQuantity::AB_00E, {{0.0, 0.1, 0.0}, {0.1, 0.2, 0.3, 0.4}}, uni);
  CHECK(r0.excluded);  // score at 1/2, below the curve range

  const QubitStrategy pure{{1.0, 0.0, 0.25}, {0.0, kPi / 4, kPi / 8, -kPi / 8}};
  const auto r1 = gradient_check(EntropyQuantity::AB_00E, pure, uni);
  CHECK(r1.excluded);  // r at the boundary, hbin arguments at the edge
}
