#pragma once

#include <array>
#include <cstdint>

#include "eat_rates.hpp"

namespace direx {

// Honest i.i.d. device with per-input-pair winning probabilities and uniform
// output marginals; no quantum state is simulated.
struct HonestDeviceModel {
  std::array<double, 4> omega_xy{};  // row-major (x, y)

  static HonestDeviceModel iid(double omega_exp) { return {{omega_exp, omega_exp, omega_exp, omega_exp}}; }
  double mean_score() const { return (omega_xy[0] + omega_xy[1] + omega_xy[2] + omega_xy[3]) / 4; }
  void validate() const;
};

struct SimConfig {
  uint64_t seed = 1;
  uint32_t trials = 1;
  uint32_t threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

// Outcome counts of a single protocol run. Layout by variant:
//   SpotCheck:      counts[0] = tests lost, counts[1] = tests won,
//                   counts[2] = generation rounds
//   BiasedLocal:    counts[4x + 2y + w] over (x, y, w)
//   RecycledInput:  counts[0] = losses, counts[1] = wins
struct Transcript {
  uint64_t n = 0;
  std::array<uint64_t, 8> counts{};
  bool aborted = false;
  double score_hat = 0;
};

Transcript simulate(const ProtocolSpec& p, const HonestDeviceModel& device, uint64_t seed, uint64_t trial = 0);

// Inverse-propensity estimate of the CHSH score from a biased-protocol
// transcript: (1/4) sum_xy count(x,y,1) / (n pX(x) pY(y)).
double estimate_score_biased(const Transcript& t, double zeta_a, double zeta_b);

struct CompletenessReport {
  uint32_t trials = 0;
  uint32_t aborts = 0;
  double abort_rate = 0;
  double analytic_bound = 0;
  double mean_score = 0;
  double score_stddev = 0;
};

// Empirical abort frequency over config.trials honest runs next to the
// analytic completeness bound.
CompletenessReport empirical_completeness(const ProtocolSpec& p, const HonestDeviceModel& device,
                                          const SimConfig& config);

}  // namespace direx
