#include "eat_rates.hpp"

#include <algorithm>
#include <cmath>

namespace direx {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double log2d(double x) { return std::log(x) / kLn2; }

// Binary KL divergence D(q1 || q0) in nats.
double kl_bernoulli(double q1, double q0) {
  q1 = std::clamp(q1, 0.0, 1.0);
  q0 = std::clamp(q0, 1e-300, 1.0 - 1e-16);
  double acc = 0;
  if (q1 > 0) acc += q1 * std::log(q1 / q0);
  if (q1 < 1) acc += (1 - q1) * std::log((1 - q1) / (1 - q0));
  return acc;
}

// Continued fraction for the regularized incomplete beta (Lentz), valid for
// x < (a+1)/(a+b+2).
double betacf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 4000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  if (x < (a + 1) / (a + b + 2))
    return std::exp(ln_front) * betacf(a, b, x) / a;
  return 1.0 - std::exp(ln_front) * betacf(b, a, 1.0 - x) / b;
}

// P[Binomial(n, q) > m], exact via the incomplete beta.
double binomial_tail_gt(double n, double q, double m) {
  if (q <= 0) return 0;
  if (q >= 1) return m >= n ? 0.0 : 1.0;
  const double k = std::floor(m) + 1;  // P[X > m] = P[X >= k]
  if (k <= 0) return 1;
  if (k > n) return 0;
  return reg_inc_beta(k, n - k + 1, q);
}

void check_rate_curve(ProtocolVariant v, const RateCurve& f) {
  const bool ok = v == ProtocolVariant::RecycledInput
                      ? (f.quantity == EntropyQuantity::AB_XYE || f.quantity == EntropyQuantity::A_XYE)
                      : (f.quantity == EntropyQuantity::AB_00E || f.quantity == EntropyQuantity::A_00E);
  if (!ok)
    throw MismatchError(std::string("curve quantity ") + quantity_name(f.quantity) + " does not fit protocol " +
                        protocol_name(v));
}

struct TangentData {
  double t;
  double value;  // F(t)
  double slope;  // F'(t)
};

TangentData tangent_at(const RateCurve& f, double t) {
  const MonotoneCubic interp = curve_interpolant(f);
  if (!(t >= kClassicalScore && t <= f.points.back().omega + 1e-12))
    throw DomainError("tangent point outside curve domain");
  // inside the linear envelope segment the tangent is the envelope line
  if (f.tangent && t <= f.tangent->omega_star)
    return {t, f.tangent->slope * (t - kClassicalScore), f.tangent->slope};
  return {t, interp.eval(t), interp.deriv(t)};
}

// F extended linearly below the classical score so the EAT rate term stays a
// valid lower bound on the whole achievable range.
double rate_extended(const MonotoneCubic& interp, const RateCurve& f, double s) {
  const double left = std::max(kClassicalScore, interp.x_min());
  if (s >= left) return interp.eval(s);
  const double slope = f.tangent ? f.tangent->slope : 0.0;
  return slope * (s - kClassicalScore);
}

}  // namespace

const char* protocol_name(ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::SpotCheck: return "spotcheck";
    case ProtocolVariant::BiasedLocal: return "biased";
    case ProtocolVariant::RecycledInput: return "recycled";
  }
  return "?";
}

void ProtocolSpec::validate() const {
  if (!(omega_exp > kClassicalScore && omega_exp <= kQuantumMaxScore))
    throw DomainError("omega_exp outside (3/4, (1+1/sqrt2)/2]");
  if (delta_conf < 0) throw DomainError("delta_conf must be >= 0");
  if (variant == ProtocolVariant::SpotCheck && !(gamma > 0 && gamma <= 1))
    throw DomainError("gamma outside (0, 1]");
  if (variant == ProtocolVariant::BiasedLocal &&
      !(zeta_a > 0 && zeta_a <= 0.5 && zeta_b > 0 && zeta_b <= 0.5))
    throw DomainError("zeta outside (0, 1/2]");
}

double ErrorBudget::eps_s() const { return std::max(eps_eat, 2 * eps_h + eps_ext); }

void ErrorBudget::validate() const {
  const auto in01 = [](double v) { return v > 0 && v < 1; };
  if (!in01(eps_h) || !in01(eps_eat) || !in01(eps_ext) || !in01(eps_completeness))
    throw DomainError("error budget entries must be in (0, 1)");
  if (eps_s() >= 1) throw DomainError("degenerate budget: composed soundness error reaches 1");
}

MinTradeoff mintradeoff_recycled(double t, const RateCurve& f_curve) {
  check_rate_curve(ProtocolVariant::RecycledInput, f_curve);
  const TangentData td = tangent_at(f_curve, t);
  MinTradeoff mt;
  mt.variant = ProtocolVariant::RecycledInput;
  mt.slope = td.slope;
  mt.tangent_at = t;
  mt.f_at_t = td.value;
  mt.shift = 2.0;  // rate certifies H(ABXY|E) = 2 + H(AB|XYE)
  const double f0 = 2.0 + td.value + td.slope * (0.0 - t);
  const double f1 = 2.0 + td.value + td.slope * (1.0 - t);
  mt.outcome_values = {f0, f1};
  mt.max_over_all = std::max(f0, f1);
  mt.min_over_achievable = 2.0 + td.value + td.slope * (kQuantumMinScore - t);
  // Bhatia-Davis on the binary outcome, worst over achievable means
  mt.var_bound = td.slope * td.slope / 4.0;
  return mt;
}

MinTradeoff mintradeoff_spotcheck_anchored(double t, double gamma, double anchor, const RateCurve& f_curve) {
  if (!(gamma > 0 && gamma <= 1)) throw DomainError("gamma outside (0, 1]");
  if (!(anchor >= 0 && anchor <= 1)) throw DomainError("anchor outside [0, 1]");
  check_rate_curve(ProtocolVariant::SpotCheck, f_curve);
  const TangentData td = tangent_at(f_curve, t);
  MinTradeoff mt;
  mt.variant = ProtocolVariant::SpotCheck;
  mt.slope = td.slope;
  mt.tangent_at = t;
  mt.f_at_t = td.value;
  // On achievable distributions p_s = (gamma(1-s), gamma s, 1-gamma) the
  // function must equal the tangent g_t(s); the vertex values solve
  //   gamma(v1 - v0) = slope,  v_bot = v0 + anchor*(v1 - v0),
  //   f(p_s) = g_t(s).
  const double jump = td.slope / gamma;
  const double v0 = td.value - t * td.slope - (1 - gamma) * anchor * jump;
  const double v1 = v0 + jump;
  const double vb = v0 + anchor * jump;
  mt.outcome_values = {v0, v1, vb};
  mt.max_over_all = std::max({v0, v1, vb});
  mt.min_over_achievable = td.value + td.slope * (kQuantumMinScore - t);
  mt.var_bound = (mt.max_over_all - std::min({v0, v1, vb})) * (mt.max_over_all - std::min({v0, v1, vb})) / 4.0;
  return mt;
}

MinTradeoff mintradeoff_spotcheck(double t, double gamma, const RateCurve& f_curve) {
  return mintradeoff_spotcheck_anchored(t, gamma, 1.0, f_curve);
}

MinTradeoff mintradeoff_biased(double t, double zeta_a, double zeta_b, const RateCurve& f_curve) {
  if (!(zeta_a > 0 && zeta_a <= 0.5 && zeta_b > 0 && zeta_b <= 0.5))
    throw DomainError("zeta outside (0, 1/2]");
  check_rate_curve(ProtocolVariant::BiasedLocal, f_curve);
  const TangentData td = tangent_at(f_curve, t);
  MinTradeoff mt;
  mt.variant = ProtocolVariant::BiasedLocal;
  mt.slope = td.slope;
  mt.tangent_at = t;
  mt.f_at_t = td.value;
  const double c0 = td.value - t * td.slope;
  const double px[2] = {1 - zeta_a, zeta_a};
  const double py[2] = {1 - zeta_b, zeta_b};
  mt.outcome_values.resize(8);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int w = 0; w < 2; ++w)
        mt.outcome_values[static_cast<size_t>(4 * x + 2 * y + w)] =
            w == 1 ? td.slope / (4 * px[x] * py[y]) + c0 : c0;
  mt.max_over_all = td.slope / (4 * zeta_a * zeta_b) + c0;
  mt.min_over_achievable = td.value - td.slope * (t - kQuantumMinScore);
  const double zz = zeta_a * zeta_b;
  mt.var_bound = zz < 0.125 ? td.slope * td.slope * (1.0 / (4 * zz) - 1.0)
                            : (td.slope / (8 * zz)) * (td.slope / (8 * zz));
  return mt;
}

double completeness_error(const ProtocolSpec& p) {
  p.validate();
  if (p.n == 0) return 1.0;
  const double n = static_cast<double>(p.n);
  switch (p.variant) {
    case ProtocolVariant::BiasedLocal: {
      const double a = p.delta_conf * p.zeta_a * p.zeta_b;
      return std::exp(-32.0 * n * a * a);
    }
    case ProtocolVariant::RecycledInput:
      return std::exp(-2.0 * n * p.delta_conf * p.delta_conf);
    case ProtocolVariant::SpotCheck: {
      // Exact binomial tail of the test-failure count. The additive-range
      // Hoeffding form is hopeless at small gamma, and even the KL form
      // gives up a further ~10% in delta at the deep tails used here.
      const double q0 = p.gamma * (1 - p.omega_exp);
      const double thresh = n * p.gamma * (1 - p.omega_exp + p.delta_conf);
      const double exact = binomial_tail_gt(n, q0, thresh);
      const double q1 = std::min(1.0, p.gamma * (1 - p.omega_exp + p.delta_conf));
      const double kl = std::exp(-n * kl_bernoulli(q1, q0));
      return std::isfinite(exact) && exact >= 0 ? std::min(exact, kl) : kl;
    }
  }
  return 1.0;
}

double delta_for_completeness(const ProtocolSpec& p, double eps_c) {
  if (!(eps_c > 0 && eps_c < 1)) throw DomainError("completeness target outside (0,1)");
  if (p.n == 0) throw DomainError("delta inversion needs n > 0");
  const double n = static_cast<double>(p.n);
  const double lg = std::log(1.0 / eps_c);
  switch (p.variant) {
    case ProtocolVariant::BiasedLocal:
      return std::sqrt(lg / (32.0 * n)) / (p.zeta_a * p.zeta_b);
    case ProtocolVariant::RecycledInput:
      return std::sqrt(lg / (2.0 * n));
    case ProtocolVariant::SpotCheck: {
      // invert the binomial KL tail by bisection
      ProtocolSpec q = p;
      double lo = 0, hi = 1;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        q.delta_conf = mid;
        if (completeness_error(q) > eps_c)
          lo = mid;
        else
          hi = mid;
        if (hi - lo < 1e-15) break;
      }
      return hi;
    }
  }
  throw DomainError("unknown protocol variant");
}

double input_randomness(const ProtocolSpec& p) {
  p.validate();
  const double n = static_cast<double>(p.n);
  switch (p.variant) {
    case ProtocolVariant::SpotCheck:
      return n * (hbin(p.gamma) + 2 * p.gamma) + 3;
    case ProtocolVariant::BiasedLocal:
      return n * (hbin(p.zeta_a) + hbin(p.zeta_b)) + 6;
    case ProtocolVariant::RecycledInput:
      return 2 * n;
  }
  return 0;
}

double eat_bound(const ProtocolSpec& p, const ErrorBudget& b, const MinTradeoff& mt, const RateCurve& f_curve,
                 double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("alpha outside (1, 2)");
  if (mt.variant != p.variant) throw MismatchError("min-tradeoff does not match protocol variant");
  b.validate();
  const double n = static_cast<double>(p.n);
  const double a = alpha - 1.0;
  const double d_c = p.variant == ProtocolVariant::RecycledInput ? 16.0 : 4.0;
  const double log_dc = log2d(d_c);

  const MonotoneCubic interp = curve_interpolant(f_curve);
  const double v_log = log2d(1.0 + 2.0 * d_c * d_c);

  // worst accepted score and the first-order rate
  const double s_obs = p.omega_exp - p.delta_conf;
  const double r = mt.eval_at_score(s_obs);

  // inf over achievable score distributions on a fixed grid
  constexpr int kGrid = 2000;
  double inf_term = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double s = kQuantumMinScore + (kQuantumMaxScore - kQuantumMinScore) * i / kGrid;
    const double delta_fp = std::max(0.0, (mt.shift + rate_extended(interp, f_curve, s)) - mt.eval_at_score(s));
    double var = 0;
    switch (p.variant) {
      case ProtocolVariant::RecycledInput:
        var = s * (1 - s) * mt.slope * mt.slope;
        break;
      case ProtocolVariant::SpotCheck: {
        // the outcome distribution is fully determined by the conditional
        // score: (gamma(1-s), gamma s, 1-gamma); exact variance of f
        const double pr[3] = {p.gamma * (1 - s), p.gamma * s, 1 - p.gamma};
        const double mu = pr[0] * mt.outcome_values[0] + pr[1] * mt.outcome_values[1] + pr[2] * mt.outcome_values[2];
        for (int u = 0; u < 3; ++u)
          var += pr[u] * (mt.outcome_values[static_cast<size_t>(u)] - mu) *
                 (mt.outcome_values[static_cast<size_t>(u)] - mu);
        break;
      }
      case ProtocolVariant::BiasedLocal: {
        const double zz = p.zeta_a * p.zeta_b;
        var = mt.slope * mt.slope * s * std::max(0.0, 1.0 / (4 * zz) - s);
        break;
      }
    }
    const double v = 0.5 * kLn2 * (v_log + std::sqrt(2.0 + var)) * (v_log + std::sqrt(2.0 + var));
    inf_term = std::min(inf_term, delta_fp - a * v);
  }

  const double spread = log_dc + mt.max_over_all - mt.min_over_achievable;
  const double pow_term = std::exp2(std::min(a * spread, 1000.0));
  // ln(2^spread + e^2), overflow-safe
  const double ln_arg = spread > 60 ? spread * kLn2 : std::log(std::exp2(spread) + std::exp(2.0));
  const double k_alpha = pow_term * ln_arg * ln_arg * ln_arg / (6.0 * (2.0 - alpha) * (2.0 - alpha) *
                                                                (2.0 - alpha) * kLn2);

  // 1 - sqrt(1 - eps_h^2) evaluated stably
  const double eh2 = b.eps_h * b.eps_h;
  const double one_minus = eh2 / (1.0 + std::sqrt(std::max(0.0, 1.0 - eh2)));
  const double log_penalty = (alpha / a) * (-log2d(b.eps_eat) - log2d(one_minus));

  return n * r - log_penalty + n * (inf_term - a * a * k_alpha);
}

namespace {

struct AlphaOpt {
  double alpha = 1.5;
  double hmin = -std::numeric_limits<double>::infinity();
};

AlphaOpt best_alpha(const ProtocolSpec& p, const ErrorBudget& b, const MinTradeoff& mt, const RateCurve& f,
                    uint32_t coarse) {
  AlphaOpt out;
  const double lo = std::log(1e-9), hi = std::log(1.0 - 1e-6);
  double best_u = lo;
  for (uint32_t i = 0; i <= coarse; ++i) {
    const double u = lo + (hi - lo) * i / coarse;
    const double alpha = 1.0 + std::exp(u);
    const double v = eat_bound(p, b, mt, f, alpha);
    if (v > out.hmin) {
      out.hmin = v;
      out.alpha = alpha;
      best_u = u;
    }
  }
  // golden refinement in log(alpha - 1)
  const double phi = 0.6180339887498949;
  double a_lo = std::max(lo, best_u - (hi - lo) / coarse);
  double a_hi = std::min(hi, best_u + (hi - lo) / coarse);
  double x1 = a_hi - phi * (a_hi - a_lo), x2 = a_lo + phi * (a_hi - a_lo);
  double f1 = eat_bound(p, b, mt, f, 1.0 + std::exp(x1));
  double f2 = eat_bound(p, b, mt, f, 1.0 + std::exp(x2));
  for (int it = 0; it < 50; ++it) {
    if (f1 < f2) {
      a_lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = a_lo + phi * (a_hi - a_lo);
      f2 = eat_bound(p, b, mt, f, 1.0 + std::exp(x2));
    } else {
      a_hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = a_hi - phi * (a_hi - a_lo);
      f1 = eat_bound(p, b, mt, f, 1.0 + std::exp(x1));
    }
  }
  const double u = f1 > f2 ? x1 : x2;
  const double alpha = 1.0 + std::exp(u);
  const double v = eat_bound(p, b, mt, f, alpha);
  if (v > out.hmin) {
    out.hmin = v;
    out.alpha = alpha;
  }
  return out;
}

MinTradeoff make_mintradeoff(const ProtocolSpec& p, double t, const RateCurve& f, double anchor) {
  switch (p.variant) {
    case ProtocolVariant::SpotCheck: return mintradeoff_spotcheck_anchored(t, p.gamma, anchor, f);
    case ProtocolVariant::BiasedLocal: return mintradeoff_biased(t, p.zeta_a, p.zeta_b, f);
    case ProtocolVariant::RecycledInput: return mintradeoff_recycled(t, f);
  }
  throw DomainError("unknown protocol variant");
}

EatResult evaluate_at(const ProtocolSpec& p0, const ErrorBudget& b, const RateCurve& f, const NetOptions& opts) {
  ProtocolSpec p = p0;
  p.delta_conf = delta_for_completeness(p, b.eps_completeness);

  const double t_lo = f.tangent ? f.tangent->omega_star : std::max(f.points.front().omega, kClassicalScore + 1e-6);
  const double t_hi = f.points.back().omega - 1e-9;

  // Spot-check only: candidate anchors for the min-tradeoff extension.
  std::vector<double> anchors = {1.0};
  if (p.variant == ProtocolVariant::SpotCheck)
    anchors = {1.0, 0.98, 0.96, 0.94, 0.92, 0.9, 0.87, 0.84, 0.8, 0.75, 0.7, 0.6};

  EatResult best;
  best.hmin_bound = -std::numeric_limits<double>::infinity();
  const auto consider = [&](double t, double anchor) {
    t = std::clamp(t, t_lo, t_hi);
    const MinTradeoff mt = make_mintradeoff(p, t, f, anchor);
    const AlphaOpt ao = best_alpha(p, b, mt, f, opts.alpha_coarse);
    if (ao.hmin > best.hmin_bound) {
      best.hmin_bound = ao.hmin;
      best.alpha = ao.alpha;
      best.t = t;
      best.rate_r = mt.eval_at_score(p.omega_exp - p.delta_conf);
      return true;
    }
    return false;
  };

  for (const double anchor : anchors) {
    if (t_hi <= t_lo) {
      consider(t_lo, anchor);
      continue;
    }
    double best_t = t_lo;
    for (uint32_t i = 0; i <= opts.t_coarse; ++i) {
      const double t = t_lo + (t_hi - t_lo) * i / opts.t_coarse;
      if (consider(t, anchor)) best_t = t;
    }
    const double step = (t_hi - t_lo) / opts.t_coarse;
    double lo = std::max(t_lo, best_t - step), hi = std::min(t_hi, best_t + step);
    for (int it = 0; it < 24; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      const MinTradeoff mt1 = make_mintradeoff(p, m1, f, anchor);
      const MinTradeoff mt2 = make_mintradeoff(p, m2, f, anchor);
      const double v1 = best_alpha(p, b, mt1, f, 16).hmin;
      const double v2 = best_alpha(p, b, mt2, f, 16).hmin;
      if (v1 < v2)
        lo = m1;
      else
        hi = m2;
    }
    consider(0.5 * (lo + hi), anchor);
  }

  const double n = static_cast<double>(p.n);
  best.delta_conf = p.delta_conf;
  best.eps_s = b.eps_s();
  best.input_bits = input_randomness(p);
  const double ext_loss = 2.0 * log2d(1.0 / b.eps_ext) + b.ext_loss_const;
  const double recycle_loss = p.variant == ProtocolVariant::RecycledInput ? log2d(4.0 * n) : 0.0;
  best.output_len = best.hmin_bound - ext_loss - recycle_loss;
  best.net_expansion = best.output_len - best.input_bits;
  best.gamma_or_zeta = p.variant == ProtocolVariant::SpotCheck ? p.gamma
                       : p.variant == ProtocolVariant::BiasedLocal ? p.zeta_a
                                                                   : 0.0;
  return best;
}

}  // namespace

EatResult net_expansion(const ProtocolSpec& p, const ErrorBudget& b, const RateCurve& f_curve,
                        const NetOptions& opts) {
  p.validate();
  b.validate();
  check_rate_curve(p.variant, f_curve);
  if (p.n == 0) throw DomainError("net_expansion needs n > 0");

  if (!opts.optimize_rate_param || p.variant == ProtocolVariant::RecycledInput) return evaluate_at(p, b, f_curve, opts);

  // sweep the rate parameter (gamma or zeta_a = zeta_b) on a log grid
  EatResult best;
  best.net_expansion = -std::numeric_limits<double>::infinity();
  best.hmin_bound = -std::numeric_limits<double>::infinity();
  double best_v = -std::numeric_limits<double>::infinity();
  const double lo = std::log(1e-6), hi = std::log(0.5);
  constexpr int kSteps = 28;
  double best_u = lo;
  for (int i = 0; i <= kSteps; ++i) {
    const double u = lo + (hi - lo) * i / kSteps;
    ProtocolSpec q = p;
    const double v = std::exp(u);
    if (q.variant == ProtocolVariant::SpotCheck)
      q.gamma = v;
    else
      q.zeta_a = q.zeta_b = v;
    const EatResult r = evaluate_at(q, b, f_curve, opts);
    if (r.net_expansion > best_v) {
      best_v = r.net_expansion;
      best = r;
      best_u = u;
      best.gamma_or_zeta = v;
    }
  }
  double g_lo = std::max(lo, best_u - (hi - lo) / kSteps), g_hi = std::min(hi, best_u + (hi - lo) / kSteps);
  for (int it = 0; it < 20; ++it) {
    const double m1 = g_lo + (g_hi - g_lo) / 3, m2 = g_hi - (g_hi - g_lo) / 3;
    const auto val = [&](double u) {
      ProtocolSpec q = p;
      const double v = std::exp(u);
      if (q.variant == ProtocolVariant::SpotCheck)
        q.gamma = v;
      else
        q.zeta_a = q.zeta_b = v;
      return evaluate_at(q, b, f_curve, opts).net_expansion;
    };
    if (val(m1) < val(m2))
      g_lo = m1;
    else
      g_hi = m2;
  }
  ProtocolSpec q = p;
  const double v = std::exp(0.5 * (g_lo + g_hi));
  if (q.variant == ProtocolVariant::SpotCheck)
    q.gamma = v;
  else
    q.zeta_a = q.zeta_b = v;
  const EatResult r = evaluate_at(q, b, f_curve, opts);
  if (r.net_expansion > best_v) {
    best = r;
    best.gamma_or_zeta = v;
  }
  return best;
}

CrossoverReport crossover_n(const ProtocolSpec& family, const ErrorBudget& b, const RateCurve& f_curve,
                            const NetOptions& opts) {
  CrossoverReport report;
  const auto net_at = [&](uint64_t n) {
    ProtocolSpec p = family;
    p.n = n;
    return net_expansion(p, b, f_curve, opts);
  };

  constexpr uint64_t kMax = 1000000000000ull;  // 1e12
  EatResult top = net_at(kMax);
  if (top.net_expansion <= 0) return report;  // no expansion up to 1e12

  uint64_t lo = 1000, hi = kMax;
  EatResult lo_res = net_at(lo);
  if (lo_res.net_expansion > 0) {
    report.found = true;
    report.n = lo;
    report.result = lo_res;
    return report;
  }
  EatResult hi_res = top;
  while (static_cast<double>(hi) / static_cast<double>(lo) > 1.01) {
    const uint64_t mid = static_cast<uint64_t>(std::sqrt(static_cast<double>(lo) * static_cast<double>(hi)));
    const EatResult r = net_at(mid);
    if (r.net_expansion > 0) {
      hi = mid;
      hi_res = r;
    } else {
      lo = mid;
    }
  }
  report.found = true;
  report.n = hi;
  report.result = hi_res;
  return report;
}

}  // namespace direx
