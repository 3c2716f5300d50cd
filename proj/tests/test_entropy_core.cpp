#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entropy_core.hpp"
#include "verify_oracle.hpp"

using namespace direx;

namespace {

QubitStrategy make_strategy(double r, double theta, double delta, double a0, double a1, double b0, double b1) {
  return {{r, theta, delta}, {a0, a1, b0, b1}};
}

const QubitStrategy kPureOptimal = make_strategy(1.0, 0.0, 0.25, 0.0, kPi / 4, kPi / 8, -kPi / 8);

// Tilted boundary strategy reaching the analytic one-sided minimum at score w.
QubitStrategy tilted_optimal(double w) {
  const double r = std::sqrt(2.0) * (2 * w - 1);
  const double th = theta_max(r);
  return make_strategy(r, th, delta_star(r, th), 0.0, kPi / 4, kPi / 8 - th / 2, -kPi / 8 + th / 2);
}

}  // namespace

TEST_CASE("hbin basics") {
  CHECK(hbin(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hbin(0.0) == 0.0);
  CHECK(hbin(1.0) == 0.0);
  CHECK(hbin(0.11) == doctest::Approx(0.49991595816452800).epsilon(1e-14));
  CHECK(hbin(-0.5e-9) == 0.0);  // clamped within tolerance
  CHECK_THROWS_AS(hbin(-1e-3), DomainError);
  CHECK_THROWS_AS(hbin(1.1), DomainError);
}

TEST_CASE("bell_spectrum") {
  const auto mixed = bell_spectrum({0.0, 0.0, 0.0});
  for (double v : mixed) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  const auto pure = bell_spectrum({1.0, 0.0, 0.25});
  CHECK(pure[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 1; i < 4; ++i) CHECK(std::fabs(pure[static_cast<size_t>(i)]) < 1e-14);

  const auto lam = bell_spectrum({0.9, 0.1, delta_star(0.9, 0.1)});
  double sum = 0;
  for (double v : lam) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lam[0] >= lam[3]);
  CHECK(lam[1] >= lam[2]);
  CHECK(lam[0] - lam[3] >= lam[1] - lam[2] - 1e-12);

  CHECK_THROWS_AS(bell_spectrum({1.2, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(bell_spectrum({1.0, 0.3, 0.25}), DomainError);  // theta beyond theta_max(1) = 0
  CHECK_THROWS_AS(bell_spectrum({0.5, 0.1, 0.5}), DomainError);   // delta outside interval
}

TEST_CASE("delta_star") {
  CHECK(std::fabs(delta_star(0.0, 0.3)) < 1e-15);
  CHECK(std::fabs(delta_star(1.0, kPi / 4)) < 1e-12);
  CHECK(delta_star(0.9, 0.1) == doctest::Approx(0.19846348201285143).epsilon(1e-14));

  // oracle: 1-D grid maximization of the spectrum entropy over delta
  for (const auto& [r, th] : {std::pair{0.9, 0.1}, std::pair{0.5, 0.3}, std::pair{0.75, 0.4}}) {
    const double lo = -0.25 + r * std::cos(th) / 2;
    const double hi = 0.25 - r * std::sin(th) / 2;
    double best_d = lo, best_h = -1;
    for (int i = 0; i <= 20000; ++i) {
      const double d = lo + (hi - lo) * i / 20000;
      const auto lam = bell_spectrum({r, th, d});
      const double h = shannon_entropy(lam.data(), 4);
      if (h > best_h) {
        best_h = h;
        best_d = d;
      }
    }
    CHECK(std::fabs(delta_star(r, th) - best_d) < 1e-3);
    const auto lam_star = bell_spectrum({r, th, delta_star(r, th)});
    CHECK(shannon_entropy(lam_star.data(), 4) >= best_h - 1e-8);
  }
}

TEST_CASE("epsilon_table") {
  const auto uniform = epsilon_table({0.0, 0.0, 0.0}, {0.3, -0.4, 1.0, 0.2});
  for (double e : uniform) CHECK(e == doctest::Approx(0.25).epsilon(1e-15));

  // maximal violation: every cell contributes (1 + 1/sqrt2)/4
  const auto eps = epsilon_table(kPureOptimal.state, kPureOptimal.angles);
  for (double e : eps) CHECK(e == doctest::Approx(0.42677669529663689).epsilon(1e-14));
  CHECK((eps[0] + eps[1] + eps[2] + eps[3]) / 2 == doctest::Approx(kQuantumMaxScore).epsilon(1e-14));

  // against the explicit post-measurement ensemble
  for (uint64_t i = 0; i < 64; ++i) {
    const auto s = random_strategy(0xE95, i);
    const auto table = epsilon_table(s.state, s.angles);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const double win_prob =
            x == 1 && y == 1
                ? eve_post_measurement_state(s, x, y, 0, 1).prob + eve_post_measurement_state(s, x, y, 1, 0).prob
                : eve_post_measurement_state(s, x, y, 0, 0).prob + eve_post_measurement_state(s, x, y, 1, 1).prob;
        CHECK(win_prob == doctest::Approx(2 * table[static_cast<size_t>(2 * x + y)]).epsilon(1e-11));
        CHECK(table[static_cast<size_t>(2 * x + y)] >= -1e-12);
        CHECK(table[static_cast<size_t>(2 * x + y)] <= 0.5 + 1e-12);
      }
    }
  }
}

TEST_CASE("chsh_score") {
  CHECK(chsh_score({0.0, 0.0, 0.0}, {0.1, 0.9, -0.3, 0.7}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(chsh_score(kPureOptimal) == doctest::Approx(kQuantumMaxScore).epsilon(1e-14));

  // score bound and delta invariance over random strategies
  for (uint64_t i = 0; i < 10000; ++i) {
    const auto s = random_strategy(0x5C03E, i);
    CHECK(chsh_score(s) <= 0.5 + s.state.r / (2 * std::sqrt(2.0)) + 1e-12);
    if (i < 200) {
      QubitStrategy s2 = s, s3 = s;
      const double lo = -0.25 + s.state.r * std::cos(s.state.theta) / 2;
      const double hi = 0.25 - s.state.r * std::sin(s.state.theta) / 2;
      s2.state.delta = lo + 0.25 * (hi - lo);
      s3.state.delta = lo + 0.75 * (hi - lo);
      CHECK(chsh_score(s2) == doctest::Approx(chsh_score(s3)).epsilon(1e-12));
    }
  }
}

TEST_CASE("eve_post_measurement_state") {
  for (uint64_t i = 0; i < 100; ++i) {
    const auto s = random_strategy(0xE7E, i);
    const auto lam = bell_spectrum(s.state);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        double total = 0;
        std::array<std::array<double, 4>, 4> accum{};
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const auto post = eve_post_measurement_state(s, x, y, a, b);
            double norm2 = 0;
            for (double z : post.zeta) norm2 += z * z;
            CHECK(norm2 == doctest::Approx(post.prob).epsilon(1e-10));
            total += post.prob;
            for (int u = 0; u < 4; ++u)
              for (int v = 0; v < 4; ++v)
                accum[static_cast<size_t>(u)][static_cast<size_t>(v)] +=
                    post.zeta[static_cast<size_t>(u)] * post.zeta[static_cast<size_t>(v)];
          }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        // mixture over outcomes returns the dephased state diag(lambda)
        for (int u = 0; u < 4; ++u)
          for (int v = 0; v < 4; ++v)
            CHECK(std::fabs(accum[static_cast<size_t>(u)][static_cast<size_t>(v)] -
                            (u == v ? lam[static_cast<size_t>(u)] : 0.0)) < 1e-10);
      }
    }
  }

  // pure state: support only on the first component
  const auto post = eve_post_measurement_state(kPureOptimal, 0, 1, 1, 0);
  CHECK(std::fabs(post.zeta[1]) < 1e-12);
  CHECK(std::fabs(post.zeta[2]) < 1e-12);
  CHECK(std::fabs(post.zeta[3]) < 1e-12);
}

TEST_CASE("entropy closed forms") {
  const auto uni = InputDistribution::uniform();

  // perfectly correlated pure state with aligned measurements
  const auto aligned = make_strategy(1.0, 0.0, 0.25, 0.0, kPi / 4, 0.0, -kPi / 8);
  CHECK(entropy(EntropyQuantity::AB_00E, aligned, uni) == doctest::Approx(1.0).epsilon(1e-12));

  // tilted family reproduces the analytic one-sided curve
  for (double w : {0.78, 0.80, 0.82, 0.84}) {
    const auto s = tilted_optimal(w);
    CHECK(chsh_score(s) == doctest::Approx(w).epsilon(1e-12));
    CHECK(entropy(EntropyQuantity::A_00E, s, uni) == doctest::Approx(analytic_a_00e(w)).epsilon(1e-10));
  }

  // maximal-violation family at delta* reproduces g1 / g2
  for (double w : {0.80, 0.85}) {
    const double r = std::sqrt(2.0) * (2 * w - 1);
    const auto s = make_strategy(r, 0.0, delta_star(r, 0.0), 0.0, kPi / 4, kPi / 8, -kPi / 8);
    CHECK(chsh_score(s) == doctest::Approx(w).epsilon(1e-12));
    CHECK(entropy(EntropyQuantity::AB_XYE, s, uni) == doctest::Approx(analytic_g1(w)).epsilon(1e-10));
    CHECK(entropy(EntropyQuantity::A_XYE, s, uni) == doctest::Approx(analytic_g2(w)).epsilon(1e-10));
  }

  // AB_00E at the maximal violation reaches 1 + hbin((1+1/sqrt2)/2)
  CHECK(entropy(EntropyQuantity::AB_00E, kPureOptimal, uni) ==
        doctest::Approx(1.6008760366928561).epsilon(1e-12));
}

TEST_CASE("entropy properties") {
  const auto uni = InputDistribution::uniform();
  const auto biased = InputDistribution::product(0.2, 0.35);

  for (uint64_t i = 0; i < 400; ++i) {
    const auto s = random_strategy(0xABCD, i);
    const auto& pxy = i % 2 == 0 ? uni : biased;

    // two-sided dominates one-sided
    CHECK(entropy(EntropyQuantity::AB_00E, s, pxy) >= entropy(EntropyQuantity::A_00E, s, pxy) - 1e-9);
    CHECK(entropy(EntropyQuantity::AB_XYE, s, pxy) >= entropy(EntropyQuantity::A_XYE, s, pxy) - 1e-9);
    CHECK(entropy(EntropyQuantity::AB_E, s, pxy) >= entropy(EntropyQuantity::A_E, s, pxy) - 1e-9);

    // conditioning order (data processing)
    CHECK(entropy(EntropyQuantity::AB_E, s, pxy) >= entropy(EntropyQuantity::AB_XYE, s, pxy) - 1e-9);
    CHECK(entropy(EntropyQuantity::A_E, s, pxy) >= entropy(EntropyQuantity::A_XYE, s, pxy) - 1e-9);
  }

  // delta enters the four input-conditioned quantities only through the
  // spectrum entropy
  for (uint64_t i = 0; i < 100; ++i) {
    const auto s = random_strategy(0xDE17A, i);
    const double lo = -0.25 + s.state.r * std::cos(s.state.theta) / 2;
    const double hi = 0.25 - s.state.r * std::sin(s.state.theta) / 2;
    QubitStrategy s1 = s, s2 = s;
    s1.state.delta = lo + 0.3 * (hi - lo);
    s2.state.delta = lo + 0.8 * (hi - lo);
    const auto l1 = bell_spectrum(s1.state);
    const auto l2 = bell_spectrum(s2.state);
    const double dh = shannon_entropy(l1.data(), 4) - shannon_entropy(l2.data(), 4);
    for (auto q : {EntropyQuantity::AB_00E, EntropyQuantity::AB_XYE, EntropyQuantity::A_00E,
                   EntropyQuantity::A_XYE}) {
      const double diff = entropy(q, s2, uni) - entropy(q, s1, uni);
      CHECK(std::fabs(diff - dh) < 1e-9);
    }
  }
}

TEST_CASE("analytic curves") {
  CHECK(std::fabs(analytic_a_00e(0.75)) < 1e-12);
  CHECK(analytic_a_00e(kQuantumMaxScore) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(analytic_a_00e(0.80) == doctest::Approx(0.34611243579453872).epsilon(1e-13));
  CHECK_THROWS_AS(analytic_a_00e(0.70), DomainError);
  CHECK_THROWS_AS(analytic_a_00e(0.90), DomainError);

  CHECK(analytic_g1(kQuantumMaxScore) == doctest::Approx(1.6008760366928561).epsilon(1e-13));
  CHECK(analytic_g1(0.84403) == doctest::Approx(1.4186).epsilon(2e-4));
  CHECK(analytic_g2(0.84698) == doctest::Approx(0.92394).epsilon(2e-4));
  CHECK(analytic_g1(0.85) == doctest::Approx(1.5186254067216845).epsilon(1e-13));
  CHECK(analytic_g2(0.85) == doctest::Approx(0.95439255100264203).epsilon(1e-13));
  CHECK_THROWS_AS(analytic_g1(0.74), DomainError);
  CHECK_THROWS_AS(analytic_g2(0.86), DomainError);
}

TEST_CASE("input distribution") {
  const auto d = InputDistribution::product(0.3, 0.4);
  CHECK(d.px(1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.py(1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(d.at(1, 1) == doctest::Approx(0.12).epsilon(1e-15));
  d.validate();
  InputDistribution bad;
  bad.p = {0.5, 0.5, 0.5, -0.5};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(InputDistribution::product(-0.1, 0.5), DomainError);
}
