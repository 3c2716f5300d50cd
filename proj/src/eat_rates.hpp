#pragma once

#include <cstdint>
#include <vector>

#include "curve_builder.hpp"

namespace direx {

enum class ProtocolVariant { SpotCheck = 0, BiasedLocal = 1, RecycledInput = 2 };

const char* protocol_name(ProtocolVariant v);

struct ProtocolSpec {
  ProtocolVariant variant = ProtocolVariant::RecycledInput;
  double gamma = 0;      // SpotCheck test probability
  double zeta_a = 0;     // BiasedLocal input biases
  double zeta_b = 0;
  double omega_exp = 0;  // expected CHSH score
  double delta_conf = 0; // confidence width for the score
  uint64_t n = 0;        // rounds

  void validate() const;
};

struct ErrorBudget {
  double eps_h = 0;    // smoothing
  double eps_eat = 0;  // EAT failure floor (stands in for p_Omega)
  double eps_ext = 0;  // extractor error
  double eps_completeness = 0;
  double ext_loss_const = 0;  // additive O(1) of the extractor loss model

  double eps_s() const;  // max(eps_eat, 2 eps_h + eps_ext)
  void validate() const;
};

// Affine function on score-outcome distributions, stored as its value on
// each deterministic outcome, with the bookkeeping the EAT needs.
struct MinTradeoff {
  ProtocolVariant variant;
  std::vector<double> outcome_values;
  double slope = 0;       // F'(t)
  double tangent_at = 0;  // t
  double f_at_t = 0;      // F(t)
  double shift = 0;       // additive offset (2 for recycled input, else 0)
  double max_over_all = 0;
  double min_over_achievable = 0;
  double var_bound = 0;

  // f evaluated on the achievable distribution with observed score s.
  double eval_at_score(double s) const { return shift + f_at_t + slope * (s - tangent_at); }
};

MinTradeoff mintradeoff_recycled(double t, const RateCurve& f_curve);
MinTradeoff mintradeoff_spotcheck(double t, double gamma, const RateCurve& f_curve);
MinTradeoff mintradeoff_biased(double t, double zeta_a, double zeta_b, const RateCurve& f_curve);

// Spot-check min-tradeoff with the free affine extension off the achievable
// set parameterized by `anchor`: the bottom outcome takes the value of the
// tangent at score `anchor`. anchor = 1 reproduces mintradeoff_spotcheck;
// smaller anchors trade a larger Max(f) for a smaller variance. Any anchor
// yields a valid min-tradeoff (the restriction to achievable distributions
// is unchanged), so the rate search may optimize over it.
MinTradeoff mintradeoff_spotcheck_anchored(double t, double gamma, double anchor, const RateCurve& f_curve);

// Completeness error of an honest run: BiasedLocal uses the displayed
// exp(-32 n (delta zetaA zetaB)^2); RecycledInput uses exp(-2 n delta^2);
// SpotCheck uses the binomial Kullback-Leibler tail on the per-round test
// failure indicator (the additive-range form is far too weak at the gammas
// of interest).
double completeness_error(const ProtocolSpec& p);

// Smallest delta meeting the target completeness error at the given n.
double delta_for_completeness(const ProtocolSpec& p, double eps_c);

// Expected input randomness in bits for the full protocol run.
double input_randomness(const ProtocolSpec& p);

// Smooth min-entropy lower bound for the transcript, at the given alpha.
// Negative results are returned as-is.
double eat_bound(const ProtocolSpec& p, const ErrorBudget& b, const MinTradeoff& mt, const RateCurve& f_curve,
                 double alpha);

struct EatResult {
  double hmin_bound = 0;
  double input_bits = 0;
  double output_len = 0;
  double net_expansion = 0;
  double alpha = 0;
  double t = 0;
  double gamma_or_zeta = 0;
  double delta_conf = 0;
  double rate_r = 0;  // first-order tangent rate at omega_exp - delta
  double eps_s = 0;
};

struct NetOptions {
  bool optimize_rate_param = false;  // sweep gamma (SpotCheck) / zeta (BiasedLocal)
  uint32_t alpha_coarse = 48;
  uint32_t t_coarse = 25;
};

// Best certified net expansion at fixed n, optimizing alpha and the tangent
// point (and optionally gamma / zeta). delta is fixed by inverting the
// completeness bound for the budget's target.
EatResult net_expansion(const ProtocolSpec& p, const ErrorBudget& b, const RateCurve& f_curve,
                        const NetOptions& opts = {});

struct CrossoverReport {
  bool found = false;
  uint64_t n = 0;
  EatResult result;
};

// Smallest n (within factor 1.01) with positive net expansion, re-optimizing
// the free parameters at every probe. Gives up if n = 1e12 cannot expand.
CrossoverReport crossover_n(const ProtocolSpec& family, const ErrorBudget& b, const RateCurve& f_curve,
                            const NetOptions& opts = {});

}  // namespace direx
