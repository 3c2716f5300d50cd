#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "protocol_sim.hpp"

using namespace direx;

namespace {

ProtocolSpec spotcheck(uint64_t n, double gamma, double omega_exp, double delta) {
  ProtocolSpec p;
  p.variant = ProtocolVariant::SpotCheck;
  p.gamma = gamma;
  p.omega_exp = omega_exp;
  p.delta_conf = delta;
  p.n = n;
  return p;
}

ProtocolSpec biased(uint64_t n, double za, double zb, double omega_exp, double delta) {
  ProtocolSpec p;
  p.variant = ProtocolVariant::BiasedLocal;
  p.zeta_a = za;
  p.zeta_b = zb;
  p.omega_exp = omega_exp;
  p.delta_conf = delta;
  p.n = n;
  return p;
}

ProtocolSpec recycled(uint64_t n, double omega_exp, double delta) {
  ProtocolSpec p;
  p.variant = ProtocolVariant::RecycledInput;
  p.omega_exp = omega_exp;
  p.delta_conf = delta;
  p.n = n;
  return p;
}

uint64_t count_sum(const Transcript& t) {
  uint64_t s = 0;
  for (uint64_t c : t.counts) s += c;
  return s;
}

}  // namespace

TEST_CASE("determinism and count conservation") {
  const auto device = HonestDeviceModel::iid(0.80);
  for (const auto& p : {spotcheck(5000, 0.1, 0.80, 0.05), biased(5000, 0.25, 0.3, 0.80, 0.05),
                        recycled(5000, 0.80, 0.05)}) {
    const auto t1 = simulate(p, device, 99, 7);
    const auto t2 = simulate(p, device, 99, 7);
    CHECK(t1.counts == t2.counts);
    CHECK(t1.aborted == t2.aborted);
    CHECK(t1.score_hat == t2.score_hat);
    CHECK(count_sum(t1) == p.n);

    const auto t3 = simulate(p, device, 100, 7);
    CHECK(count_sum(t3) == p.n);
    CHECK(t1.counts != t3.counts);  // different seed, different stream
  }
}

TEST_CASE("ideal device never aborts") {
  const HonestDeviceModel ideal{{1.0, 1.0, 1.0, 1.0}};
  for (const auto& p : {spotcheck(2000, 0.2, 0.85, 0.001), biased(2000, 0.25, 0.25, 0.85, 0.001),
                        recycled(2000, 0.85, 0.001)}) {
    for (uint64_t trial = 0; trial < 50; ++trial) CHECK(!simulate(p, ideal, 5, trial).aborted);
  }
}

TEST_CASE("wide confidence never aborts empirically") {
  const auto device = HonestDeviceModel::iid(0.80);
  SimConfig cfg{11, 2000, 0};
  for (const auto& p : {spotcheck(10000, 0.1, 0.80, 0.2), biased(10000, 0.25, 0.25, 0.80, 0.2),
                        recycled(10000, 0.80, 0.2)}) {
    const auto rep = empirical_completeness(p, device, cfg);
    CHECK(rep.aborts == 0);
  }
}

TEST_CASE("estimate_score_biased") {
  // one round, inputs (1,1), win, zeta = 1/2: the weight is 1/(4*1/4) = 1
  Transcript t;
  t.n = 1;
  t.counts[4 * 1 + 2 * 1 + 1] = 1;
  CHECK(estimate_score_biased(t, 0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-15));

  Transcript empty;
  CHECK_THROWS_AS(estimate_score_biased(empty, 0.5, 0.5), DomainError);

  // unbiasedness: the trial-mean estimator approaches the device score
  const double omega = 0.78;
  const auto p = biased(100000, 0.25, 0.25, omega, 0.5);
  const auto device = HonestDeviceModel::iid(omega);
  SimConfig cfg{21, 1000, 0};
  const auto rep = empirical_completeness(p, device, cfg);
  const double se = rep.score_stddev / std::sqrt(static_cast<double>(cfg.trials));
  CHECK(std::fabs(rep.mean_score - omega) <= 3 * se + 1e-6);
}

TEST_CASE("estimator width scales like 1/sqrt(n)") {
  const double omega = 0.80;
  const auto device = HonestDeviceModel::iid(omega);
  double prev_std = 0;
  for (uint64_t n : {1000ull, 10000ull, 100000ull}) {
    const auto rep = empirical_completeness(biased(n, 0.25, 0.25, omega, 0.5), device, SimConfig{31, 400, 0});
    if (prev_std > 0) {
      const double shrink = prev_std / rep.score_stddev;  // expect ~sqrt(10) = 3.16
      CHECK(shrink > 3.16 / 2);
      CHECK(shrink < 3.16 * 2);
    }
    prev_std = rep.score_stddev;
  }
}

TEST_CASE("recycled equals biased at zeta one-half") {
  const double omega = 0.80;
  const auto device = HonestDeviceModel::iid(omega);
  // delta tuned so aborts actually occur with sizable probability
  const double delta = 1.2345e-3;  // threshold falls strictly between integer win counts
  const auto p2 = biased(10000, 0.5, 0.5, omega, delta);
  const auto p3 = recycled(10000, omega, delta);
  int aborts2 = 0, aborts3 = 0;
  for (uint64_t trial = 0; trial < 300; ++trial) {
    const auto t2 = simulate(p2, device, 5150, trial);
    const auto t3 = simulate(p3, device, 5150, trial);
    // identical win counts from the shared per-round draw streams
    uint64_t wins2 = 0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) wins2 += t2.counts[static_cast<size_t>(4 * x + 2 * y + 1)];
    CHECK(wins2 == t3.counts[1]);
    CHECK(t2.aborted == t3.aborted);
    aborts2 += t2.aborted ? 1 : 0;
    aborts3 += t3.aborted ? 1 : 0;
  }
  CHECK(aborts2 == aborts3);
  CHECK(aborts2 > 10);   // the comparison is non-vacuous
  CHECK(aborts2 < 290);
}

TEST_CASE("empirical completeness against the analytic bound") {
  // biased protocol: empirical abort rate below the bound within MC error
  const double omega = 0.80;
  const auto device = HonestDeviceModel::iid(omega);
  {
    const auto p = biased(10000, 0.25, 0.25, omega, 0.02);
    const auto rep = empirical_completeness(p, device, SimConfig{41, 2000, 0});
    const double slack = 3 * std::sqrt(rep.analytic_bound * (1 - rep.analytic_bound) / rep.trials) +
                         1.0 / rep.trials;
    CHECK(rep.abort_rate <= rep.analytic_bound + slack);
  }
  // recycled: bound astronomically small, no aborts observed
  {
    const auto p = recycled(10000, omega, 0.05);
    const auto rep = empirical_completeness(p, device, SimConfig{43, 2000, 0});
    CHECK(rep.analytic_bound <= 3e-22);
    CHECK(rep.aborts == 0);
  }
  // non-iid device: per-cell wins averaging to omega_exp
  {
    HonestDeviceModel skew{{0.85, 0.78, 0.77, 0.80}};
    CHECK(skew.mean_score() == doctest::Approx(0.80).epsilon(1e-12));
    const auto p = biased(10000, 0.3, 0.2, omega, 0.03);
    const auto rep = empirical_completeness(p, skew, SimConfig{47, 1500, 0});
    const double slack = 3 * std::sqrt(rep.analytic_bound * (1 - rep.analytic_bound) / rep.trials) +
                         1.0 / rep.trials;
    CHECK(rep.abort_rate <= rep.analytic_bound + slack);
  }
  // single trial yields rate 0 or 1
  {
    const auto rep = empirical_completeness(recycled(100, omega, 0.1), device, SimConfig{53, 1, 0});
    CHECK((rep.abort_rate == 0.0 || rep.abort_rate == 1.0));
  }
}

TEST_CASE("validation") {
  HonestDeviceModel bad{{1.2, 0.5, 0.5, 0.5}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  SimConfig cfg{1, 0, 0};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK_THROWS_AS(simulate(recycled(0, 0.8, 0.1), HonestDeviceModel::iid(0.8), 1, 0), DomainError);
}
