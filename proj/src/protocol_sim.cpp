#include "protocol_sim.hpp"

#include <cmath>

#include "parallel.hpp"
#include "rng.hpp"

namespace direx {

void HonestDeviceModel::validate() const {
  for (double w : omega_xy)
    if (!(w >= 0 && w <= 1)) throw DomainError("device winning probability outside [0,1]");
}

void SimConfig::validate() const {
  if (trials < 1) throw DomainError("trials must be >= 1");
}

namespace {

// Draw layout per round: slot 0 test indicator, 1 input X, 2 input Y,
// 3 win/lose. Identical slots across variants so the recycled protocol and
// the biased protocol at zeta = 1/2 consume the same variates.
constexpr uint64_t kDrawsPerRound = 4;

struct RoundDraw {
  double test, ux, uy, uwin;
};

RoundDraw round_draw(uint64_t seed, uint64_t stream, uint64_t round) {
  const uint64_t base = round * kDrawsPerRound;
  return {CounterRng::at(seed, stream, base), CounterRng::at(seed, stream, base + 1),
          CounterRng::at(seed, stream, base + 2), CounterRng::at(seed, stream, base + 3)};
}

}  // namespace

Transcript simulate(const ProtocolSpec& p, const HonestDeviceModel& device, uint64_t seed, uint64_t trial) {
  p.validate();
  device.validate();
  if (p.n == 0) throw DomainError("simulate needs n > 0");

  const uint64_t stream = mix64(trial ^ 0x51a77ull);
  Transcript t;
  t.n = p.n;

  switch (p.variant) {
    case ProtocolVariant::SpotCheck: {
      for (uint64_t i = 0; i < p.n; ++i) {
        const RoundDraw d = round_draw(seed, stream, i);
        if (d.test < p.gamma) {
          const int x = d.ux < 0.5 ? 0 : 1;
          const int y = d.uy < 0.5 ? 0 : 1;
          const bool win = d.uwin < device.omega_xy[static_cast<size_t>(2 * x + y)];
          ++t.counts[win ? 1 : 0];
        } else {
          ++t.counts[2];
        }
      }
      const double tests = static_cast<double>(t.counts[0] + t.counts[1]);
      t.score_hat = tests > 0 ? static_cast<double>(t.counts[1]) / tests : 0.0;
      t.aborted = static_cast<double>(t.counts[0]) >
                  static_cast<double>(p.n) * p.gamma * (1 - p.omega_exp + p.delta_conf);
      break;
    }
    case ProtocolVariant::BiasedLocal: {
      for (uint64_t i = 0; i < p.n; ++i) {
        const RoundDraw d = round_draw(seed, stream, i);
        const int x = d.ux < p.zeta_a ? 1 : 0;
        const int y = d.uy < p.zeta_b ? 1 : 0;
        const bool win = d.uwin < device.omega_xy[static_cast<size_t>(2 * x + y)];
        ++t.counts[static_cast<size_t>(4 * x + 2 * y + (win ? 1 : 0))];
      }
      t.score_hat = estimate_score_biased(t, p.zeta_a, p.zeta_b);
      t.aborted = t.score_hat < p.omega_exp - p.delta_conf;
      break;
    }
    case ProtocolVariant::RecycledInput: {
      for (uint64_t i = 0; i < p.n; ++i) {
        const RoundDraw d = round_draw(seed, stream, i);
        const int x = d.ux < 0.5 ? 1 : 0;
        const int y = d.uy < 0.5 ? 1 : 0;
        const bool win = d.uwin < device.omega_xy[static_cast<size_t>(2 * x + y)];
        ++t.counts[win ? 1 : 0];
      }
      t.score_hat = static_cast<double>(t.counts[1]) / static_cast<double>(p.n);
      t.aborted = static_cast<double>(t.counts[0]) > static_cast<double>(p.n) * (1 - p.omega_exp + p.delta_conf);
      break;
    }
  }
  return t;
}

double estimate_score_biased(const Transcript& t, double zeta_a, double zeta_b) {
  if (t.n == 0) throw DomainError("estimate_score_biased: empty transcript");
  const double px[2] = {1 - zeta_a, zeta_a};
  const double py[2] = {1 - zeta_b, zeta_b};
  double acc = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      acc += static_cast<double>(t.counts[static_cast<size_t>(4 * x + 2 * y + 1)]) /
             (static_cast<double>(t.n) * px[x] * py[y]);
  return acc / 4;
}

CompletenessReport empirical_completeness(const ProtocolSpec& p, const HonestDeviceModel& device,
                                          const SimConfig& config) {
  config.validate();
  CompletenessReport rep;
  rep.trials = config.trials;
  rep.analytic_bound = completeness_error(p);

  std::vector<uint8_t> aborted(config.trials);
  std::vector<double> scores(config.trials);
  parallel_for(config.trials, config.threads, [&](size_t i) {
    const Transcript t = simulate(p, device, config.seed, i);
    aborted[i] = t.aborted ? 1 : 0;
    scores[i] = t.score_hat;
  });

  double sum = 0, sum2 = 0;
  for (uint32_t i = 0; i < config.trials; ++i) {
    rep.aborts += aborted[i];
    sum += scores[i];
    sum2 += scores[i] * scores[i];
  }
  rep.abort_rate = static_cast<double>(rep.aborts) / config.trials;
  rep.mean_score = sum / config.trials;
  const double var = std::max(0.0, sum2 / config.trials - rep.mean_score * rep.mean_score);
  rep.score_stddev = std::sqrt(var);
  return rep;
}

}  // namespace direx
