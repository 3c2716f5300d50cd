#include "curve_builder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "box_minimize.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sym_eigen.hpp"
#include "verify_oracle.hpp"

namespace direx {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kLog2E = 1.4426950408889634074;
constexpr double kWallPenalty = 1e5;

double log2_clamped(double x) { return std::log(std::max(x, 1e-18)) * kLog2E; }

// hbin'(p) in bits, with the log divergence capped near the edges.
double hbin_deriv(double p) {
  p = std::clamp(p, 1e-18, 1.0 - 1e-16);
  return (std::log1p(-p) - std::log(p)) * kLog2E;
}

double hbin_clamped(double p) {
  p = std::clamp(p, 0.0, 1.0);
  if (p <= 0 || p >= 1) return 0;
  return -p * std::log(p) * kLog2E - (1 - p) * std::log1p(-p) * kLog2E;
}

// ---------------------------------------------------------------------------
// Reduced objectives. Layout of the free vector x:
//   delta-reducible quantities: (theta, a0, a1, b0, b1)
//   AB_E / A_E:                 (theta, s_delta, a0, a1, b0, b1)
// R is recovered from the score constraint; s_delta in [0,1] spans the
// admissible delta interval. The physicality constraint lam0+lam1 <= 1,
// i.e. R(cos theta + sin theta) <= 1, is handled as a smooth exterior
// penalty (the optima of several quantities sit exactly on that wall), and
// winners are re-solved on the wall and projected back before reporting.
// ---------------------------------------------------------------------------

struct CellTrig {
  double cm, sm, cp, sp;  // cos/sin of 2(a-b) and 2(a+b)
};

struct ScoreGeometry {
  double ct, st;          // cos/sin theta
  CellTrig cell[4];       // cells (00, 01, 10, 11), angle pairs (a_x, b_y)
  double tc, ts;          // correlator sums
  double c;               // score slope: S = 1/2 + R*c
  double dtc[4], dts[4];  // partials wrt (a0, a1, b0, b1)
};

ScoreGeometry score_geometry(double theta, const double* ang) {
  ScoreGeometry g{};
  g.ct = std::cos(theta);
  g.st = std::sin(theta);
  for (int k = 0; k < 4; ++k) {
    const double u = ang[k >> 1];
    const double v = ang[2 + (k & 1)];
    g.cell[k].cm = std::cos(2 * (u - v));
    g.cell[k].sm = std::sin(2 * (u - v));
    g.cell[k].cp = std::cos(2 * (u + v));
    g.cell[k].sp = std::sin(2 * (u + v));
  }
  for (int j = 0; j < 4; ++j) g.dtc[j] = g.dts[j] = 0;
  g.tc = g.ts = 0;
  for (int k = 0; k < 4; ++k) {
    const double w = k == 3 ? -1.0 : 1.0;
    g.tc += w * g.cell[k].cm;
    g.ts += w * g.cell[k].cp;
    const int ai = k >> 1, bi = 2 + (k & 1);
    g.dtc[ai] += w * (-2 * g.cell[k].sm);
    g.dtc[bi] += w * (2 * g.cell[k].sm);
    g.dts[ai] += w * (-2 * g.cell[k].sp);
    g.dts[bi] += w * (-2 * g.cell[k].sp);
  }
  g.c = (g.ct * g.tc + g.st * g.ts) / 8;
  return g;
}

struct DeltaChoice {
  double value;
  double d_r;      // partial wrt R at fixed theta
  double d_theta;  // partial wrt theta at fixed R
};

DeltaChoice delta_star_with_partials(double r, double ct, double st, double theta) {
  const double lo = -0.25 + r * ct / 2;
  const double hi = 0.25 - r * st / 2;
  const double raw = r * r * std::cos(2 * theta) / 4;
  if (hi <= lo) return {0.5 * (lo + hi), (ct - st) / 4, -r * (st + ct) / 4};  // collapsed (wall) interval
  if (raw >= hi) return {hi, -st / 2, -r * ct / 2};
  if (raw <= lo) return {lo, ct / 2, -r * st / 2};
  return {raw, r * std::cos(2 * theta) / 2, -r * r * std::sin(2 * theta) / 2};
}

struct ReducedObjective {
  EntropyQuantity q;
  double omega;
  InputDistribution pxy;
  bool free_delta;  // AB_E / A_E
  int dim;

  double operator()(const double* x, double* grad) const {
    if (free_delta) return eval_free_delta(x, grad);
    return eval_reduced(x, grad);
  }

  double recover_r(double theta, const double* ang, double* c_out) const {
    const ScoreGeometry g = score_geometry(theta, ang);
    if (c_out) *c_out = g.c;
    if (g.c < 1e-10) return kNan;
    const double r = (omega - 0.5) / g.c;
    if (r < -1e-14 || r > 1.0 + 1e-12) return kNan;
    return std::clamp(r, 0.0, 1.0);
  }

  // Largest theta at which the configuration is physical; NaN when none is.
  double wall_theta(const double* ang) const {
    const auto feas = [&](double th) {
      const ScoreGeometry g = score_geometry(th, ang);
      if (g.c < 1e-10) return false;
      const double r = (omega - 0.5) / g.c;
      if (r < -1e-14 || r > 1.0 + 1e-12) return false;
      return r * (g.ct + g.st) <= 1.0 + 1e-14;
    };
    if (feas(kPi / 4)) return kPi / 4;
    double lo = kNan;
    for (int k = 15; k >= 0; --k) {
      const double th = kPi / 4 * k / 16.0;
      if (feas(th)) {
        lo = th;
        break;
      }
    }
    if (std::isnan(lo)) return kNan;
    double hi = lo + kPi / 64.0;
    for (int it = 0; it < 70; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feas(mid) ? lo : hi) = mid;
    }
    return lo;
  }

  QubitStrategy strategy_at(const double* x) const {
    const double* ang = x + (free_delta ? 2 : 1);
    QubitStrategy s;
    s.state.theta = x[0];
    s.state.r = recover_r(x[0], ang, nullptr);
    s.angles = {ang[0], ang[1], ang[2], ang[3]};
    if (std::isnan(s.state.r)) throw InfeasibleError("score unreachable at this point");
    if (s.state.r * (std::cos(x[0]) + std::sin(x[0])) > 1.0 + 1e-13) {
      const double tw = wall_theta(ang);
      if (std::isnan(tw)) throw InfeasibleError("no physical theta for these angles");
      s.state.theta = tw;
      s.state.r = recover_r(tw, ang, nullptr);
      if (std::isnan(s.state.r)) throw InfeasibleError("no physical theta for these angles");
    }
    if (free_delta) {
      const double lo = -0.25 + s.state.r * std::cos(s.state.theta) / 2;
      const double hi = 0.25 - s.state.r * std::sin(s.state.theta) / 2;
      s.state.delta = hi > lo ? lo + std::clamp(x[1], 0.0, 1.0) * (hi - lo) : 0.5 * (lo + hi);
    } else {
      s.state.delta = delta_star(s.state.r, s.state.theta);
    }
    return s;
  }

 private:
  // Analytic value+gradient for the four input-conditioned quantities.
  double eval_reduced(const double* x, double* grad) const {
    const double theta = x[0];
    const double* ang = x + 1;
    const ScoreGeometry g = score_geometry(theta, ang);
    if (g.c < 1e-10) return kNan;
    const double r_raw = (omega - 0.5) / g.c;
    if (r_raw < -1e-12) return kNan;
    const double rr = std::clamp(r_raw, 0.0, 1.0);

    double dr[5] = {0, 0, 0, 0, 0};
    const double dc_dtheta = (-g.st * g.tc + g.ct * g.ts) / 8;
    dr[0] = -(rr / g.c) * dc_dtheta;
    for (int j = 0; j < 4; ++j) dr[1 + j] = -(rr / g.c) * (g.ct * g.dtc[j] + g.st * g.dts[j]) / 8;

    const DeltaChoice dc = delta_star_with_partials(rr, g.ct, g.st, theta);
    double ddelta[5];
    for (int j = 0; j < 5; ++j) ddelta[j] = dc.d_r * dr[j] + (j == 0 ? dc.d_theta : 0.0);

    const double lam[4] = {0.25 + rr * g.ct / 2 + dc.value, 0.25 + rr * g.st / 2 - dc.value,
                           0.25 - rr * g.st / 2 - dc.value, 0.25 - rr * g.ct / 2 + dc.value};
    const double dlam_r[4] = {g.ct / 2, g.st / 2, -g.st / 2, -g.ct / 2};
    const double dlam_t[4] = {-rr * g.st / 2, rr * g.ct / 2, -rr * g.ct / 2, rr * g.st / 2};
    const double dlam_d[4] = {1, -1, -1, 1};

    double h_lam = 0;
    double dh_lam[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      const double li = std::max(lam[i], 0.0);
      if (li > 1e-300) h_lam -= li * std::log(li) * kLog2E;
      if (grad) {
        const double lg = log2_clamped(li);
        for (int j = 0; j < 5; ++j) {
          const double dl = dlam_r[i] * dr[j] + (j == 0 ? dlam_t[i] : 0.0) + dlam_d[i] * ddelta[j];
          dh_lam[j] -= lg * dl;
        }
      }
    }

    double value = 1.0 - h_lam;
    double dval[5] = {0, 0, 0, 0, 0};
    if (grad)
      for (int j = 0; j < 5; ++j) dval[j] = -dh_lam[j];

    const bool two_sided = q == EntropyQuantity::AB_00E || q == EntropyQuantity::AB_XYE;
    if (two_sided) {
      for (int k = 0; k < 4; ++k) {
        const double weight = q == EntropyQuantity::AB_00E ? (k == 0 ? 1.0 : 0.0) : pxy.p[static_cast<size_t>(k)];
        if (weight == 0) continue;
        const double sign = k == 3 ? -1.0 : 1.0;
        const double corr = g.ct * g.cell[k].cm + g.st * g.cell[k].cp;
        const double eps = 0.25 * (1.0 + sign * rr * corr);
        const double p = std::clamp(2 * eps, 0.0, 1.0);
        value += weight * hbin_clamped(p);
        if (grad) {
          const double hp = hbin_deriv(p);
          const int ai = k >> 1, bi = 2 + (k & 1);
          for (int j = 0; j < 5; ++j) {
            double dcorr = j == 0 ? (-g.st * g.cell[k].cm + g.ct * g.cell[k].cp) : 0.0;
            if (j == 1 + ai) dcorr += g.ct * (-2 * g.cell[k].sm) + g.st * (-2 * g.cell[k].sp);
            if (j == 1 + bi) dcorr += g.ct * (2 * g.cell[k].sm) + g.st * (-2 * g.cell[k].sp);
            const double deps = 0.25 * sign * (dr[j] * corr + rr * dcorr);
            dval[j] += weight * hp * 2 * deps;
          }
        }
      }
    } else {
      const double s2t = std::sin(2 * theta);
      const double c2t = std::cos(2 * theta);
      for (int xi = 0; xi < 2; ++xi) {
        const double weight = q == EntropyQuantity::A_00E ? (xi == 0 ? 1.0 : 0.0) : pxy.px(xi);
        if (weight == 0) continue;
        const double alpha = ang[xi];
        const double u = std::max(1e-18, 1.0 + s2t * std::cos(4 * alpha));
        const double su = std::sqrt(u);
        const double gv = std::clamp(0.5 * (1.0 + rr * su), 0.0, 1.0);
        value += weight * hbin_clamped(gv);
        if (grad) {
          const double hp = hbin_deriv(gv);
          for (int j = 0; j < 5; ++j) {
            double du = j == 0 ? 2 * c2t * std::cos(4 * alpha) : 0.0;
            if (j == 1 + xi) du += -4 * s2t * std::sin(4 * alpha);
            const double dg = 0.5 * (dr[j] * su + rr * du / (2 * su));
            dval[j] += weight * hp * dg;
          }
        }
      }
    }

    // exterior penalties: unreachable R and the physicality wall
    const double over_r = std::max(0.0, r_raw - 1.0);
    if (over_r > 0) {
      value += kWallPenalty * over_r * over_r;
      if (grad) {
        // d r_raw / dx = -(r_raw/c) dc/dx
        dval[0] += kWallPenalty * 2 * over_r * (-(r_raw / g.c) * dc_dtheta);
        for (int j = 0; j < 4; ++j)
          dval[1 + j] += kWallPenalty * 2 * over_r * (-(r_raw / g.c) * (g.ct * g.dtc[j] + g.st * g.dts[j]) / 8);
      }
    }
    const double wall = std::max(0.0, rr * (g.ct + g.st) - 1.0);
    if (wall > 0) {
      value += kWallPenalty * wall * wall;
      if (grad) {
        for (int j = 0; j < 5; ++j) {
          const double dwall = dr[j] * (g.ct + g.st) + (j == 0 ? rr * (g.ct - g.st) : 0.0);
          dval[j] += kWallPenalty * 2 * wall * dwall;
        }
      }
    }

    if (!std::isfinite(value)) return kNan;
    if (grad)
      for (int j = 0; j < 5; ++j) grad[j] = std::isfinite(dval[j]) ? dval[j] : 0.0;
    return value;
  }

  // Non-throwing local evaluation for AB_E / A_E with clamped spectrum and
  // the same exterior penalties; winners are re-checked through entropy().
  double value_free_delta(const double* x) const {
    const double theta = x[0];
    const double sd = std::clamp(x[1], 0.0, 1.0);
    const double* ang = x + 2;
    const ScoreGeometry g = score_geometry(theta, ang);
    if (g.c < 1e-10) return kNan;
    const double r_raw = (omega - 0.5) / g.c;
    if (r_raw < -1e-12) return kNan;
    const double rr = std::clamp(r_raw, 0.0, 1.0);
    const double lo = -0.25 + rr * g.ct / 2;
    const double hi = 0.25 - rr * g.st / 2;
    const double delta = hi > lo ? lo + sd * (hi - lo) : 0.5 * (lo + hi);

    double lam[4] = {0.25 + rr * g.ct / 2 + delta, 0.25 + rr * g.st / 2 - delta, 0.25 - rr * g.st / 2 - delta,
                     0.25 - rr * g.ct / 2 + delta};
    std::array<double, 4> root{};
    for (int i = 0; i < 4; ++i) {
      lam[i] = std::max(lam[i], 0.0);
      root[static_cast<size_t>(i)] = std::sqrt(lam[i]);
    }
    const double h_lam = shannon_entropy(lam, 4);

    const auto zeta = [&](double a, double b, std::array<double, 4>* z) {
      (*z)[0] = root[0] * std::cos(b - a) * kInvSqrt2;
      (*z)[1] = root[1] * std::cos(b + a) * kInvSqrt2;
      (*z)[2] = root[2] * std::sin(b + a) * kInvSqrt2;
      (*z)[3] = root[3] * std::sin(b - a) * kInvSqrt2;
    };

    double value;
    if (q == EntropyQuantity::AB_E) {
      double ebar = 0;
      for (int k = 0; k < 4; ++k) {
        const double sign = k == 3 ? -1.0 : 1.0;
        const double eps = 0.25 * (1.0 + sign * rr * (g.ct * g.cell[k].cm + g.st * g.cell[k].cp));
        ebar += pxy.p[static_cast<size_t>(k)] * (k == 3 ? 0.5 - eps : eps);
      }
      value = 1.0 + hbin_clamped(2 * ebar);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          Mat4 sigma = mat4_zero();
          double pab = 0;
          std::array<double, 4> z;
          for (int xx = 0; xx < 2; ++xx) {
            for (int yy = 0; yy < 2; ++yy) {
              zeta(ang[xx] + a * (kPi / 2), ang[2 + yy] + b * (kPi / 2), &z);
              mat4_add_outer(sigma, z, pxy.at(xx, yy));
              pab += pxy.at(xx, yy) * (z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3]);
            }
          }
          if (pab <= 1e-300) continue;
          for (double& v : sigma) v /= pab;
          const auto ev = sym4_eigenvalues(sigma);
          value += pab * shannon_entropy(ev.data(), 4);
        }
      }
      value -= h_lam;
    } else {
      value = 1.0 - h_lam;
      for (int a = 0; a < 2; ++a) {
        Mat4 sigma = mat4_zero();
        std::array<double, 4> z;
        for (int b = 0; b < 2; ++b) {
          for (int xx = 0; xx < 2; ++xx) {
            for (int yy = 0; yy < 2; ++yy) {
              zeta(ang[xx] + a * (kPi / 2), ang[2 + yy] + b * (kPi / 2), &z);
              mat4_add_outer(sigma, z, 2 * pxy.at(xx, yy));
            }
          }
        }
        const auto ev = sym4_eigenvalues(sigma);
        value += 0.5 * shannon_entropy(ev.data(), 4);
      }
    }

    const double over_r = std::max(0.0, r_raw - 1.0);
    const double wall = std::max(0.0, rr * (g.ct + g.st) - 1.0);
    value += kWallPenalty * (over_r * over_r + wall * wall);
    return std::isfinite(value) ? value : kNan;
  }

  double eval_free_delta(const double* x, double* grad) const {
    const double f = value_free_delta(x);
    if (grad) {
      constexpr double h = 1e-6;
      double xt[6];
      for (int j = 0; j < 6; ++j) xt[j] = x[j];
      for (int j = 0; j < 6; ++j) {
        const double x0 = x[j];
        xt[j] = x0 + h;
        const double fp = value_free_delta(xt);
        xt[j] = x0 - h;
        const double fm = value_free_delta(xt);
        xt[j] = x0;
        if (std::isnan(fp) && std::isnan(fm))
          grad[j] = 0;
        else if (std::isnan(fp))
          grad[j] = (f - fm) / h;
        else if (std::isnan(fm))
          grad[j] = (fp - f) / h;
        else
          grad[j] = (fp - fm) / (2 * h);
      }
    }
    return f;
  }

 public:
  // Entropy at the wall theta for the given angle block (and s_delta for the
  // free-delta quantities); the value path is penalty-free by construction.
  double wall_value(const double* xw) const {
    const double* ang = xw + (free_delta ? 1 : 0);
    const double tw = wall_theta(ang);
    if (std::isnan(tw)) return kNan;
    double xfull[6];
    xfull[0] = tw;
    int k = 1;
    if (free_delta) xfull[k++] = xw[0];
    for (int j = 0; j < 4; ++j) xfull[k + j] = ang[j];
    return free_delta ? value_free_delta(xfull) : eval_reduced(xfull, nullptr);
  }
};

// Canonical starting points: the maximal-violation measurement frame, the
// tilted boundary family (exact for A|00E), and the near-classical corner.
std::vector<std::vector<double>> canonical_starts(const ReducedObjective& obj) {
  std::vector<std::vector<double>> out;
  const double w = obj.omega;
  const auto push = [&](double theta, double a0, double a1, double b0, double b1, double sd) {
    std::vector<double> x;
    if (obj.free_delta)
      x = {theta, sd, a0, a1, b0, b1};
    else
      x = {theta, a0, a1, b0, b1};
    out.push_back(std::move(x));
  };
  push(0.0, 0.0, kPi / 4, kPi / 8, -kPi / 8, 0.98);
  const double rb = std::clamp(std::sqrt(2.0) * (2 * w - 1), 0.0, 1.0);
  const double tb = theta_max(rb);
  push(tb, 0.0, kPi / 4, kPi / 8 - tb / 2, -kPi / 8 + tb / 2, 0.5);
  // near-classical corner, slightly detuned so gradients do not vanish
  push(tb, 0.02, 0.03, 0.015, -0.025, 0.5);
  if (obj.free_delta) {
    push(0.0, 0.0, kPi / 4, kPi / 8, -kPi / 8, 0.5);
    push(tb, 0.0, kPi / 4, kPi / 8 - tb / 2, -kPi / 8 + tb / 2, 0.02);
  }
  return out;
}

bool sample_start(const ReducedObjective& obj, CounterRng& rng, std::vector<double>* x) {
  for (int tries = 0; tries < 128; ++tries) {
    const double theta = rng.uniform(0.0, kPi / 4);
    double ang[4];
    for (double& a : ang) a = rng.uniform(-kPi / 2, kPi / 2);
    const double sd = rng.next_double();
    const double r = obj.recover_r(theta, ang, nullptr);
    if (std::isnan(r) || r * (std::cos(theta) + std::sin(theta)) > 1.0) continue;
    x->clear();
    x->push_back(theta);
    if (obj.free_delta) x->push_back(sd);
    for (double a : ang) x->push_back(a);
    return true;
  }
  return false;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (tolerance <= 0) throw DomainError("optimizer tolerance must be positive");
}

void RateCurve::validate() const {
  if (points.empty()) throw DomainError("curve has no points");
  for (size_t i = 1; i < points.size(); ++i)
    if (!(points[i].omega > points[i - 1].omega)) throw DomainError("curve points must be strictly increasing in omega");
  pxy.validate();
}

double solve_r_for_score(double theta, const MeasurementAngles& m, double omega) {
  if (!(omega >= 0.5 - 1e-12 && omega <= kQuantumMaxScore + 1e-12))
    throw DomainError("solve_r_for_score: omega outside [1/2, (1+1/sqrt2)/2]");
  const double ang[4] = {m.alpha0, m.alpha1, m.beta0, m.beta1};
  const ScoreGeometry g = score_geometry(theta, ang);
  if (std::fabs(g.c) < 1e-10) throw InfeasibleError("degenerate angles: score is flat in R");
  const double r = (omega - 0.5) / g.c;
  if (r < -1e-12 || r > 1.0 + 1e-12) throw InfeasibleError("score unreachable for these angles");
  return std::clamp(r, 0.0, 1.0);
}

MinimizeResult minimize_entropy_at_score(EntropyQuantity q, double omega, const InputDistribution& pxy,
                                         const OptimizerConfig& cfg, const std::vector<QubitStrategy>& warm_starts) {
  cfg.validate();
  pxy.validate();
  if (!(omega > kClassicalScore && omega <= kQuantumMaxScore + 1e-12))
    throw DomainError("minimize_entropy_at_score: omega outside (3/4, (1+1/sqrt2)/2]");
  omega = std::min(omega, kQuantumMaxScore);

  ReducedObjective obj{q, omega, pxy, !quantity_is_delta_reducible(q), 0};
  obj.dim = obj.free_delta ? 6 : 5;

  std::vector<double> lo(static_cast<size_t>(obj.dim)), hi(static_cast<size_t>(obj.dim));
  lo[0] = 0.0;
  hi[0] = kPi / 4;
  size_t a0 = 1;
  if (obj.free_delta) {
    lo[1] = 0.0;
    hi[1] = 1.0;
    a0 = 2;
  }
  for (size_t j = a0; j < static_cast<size_t>(obj.dim); ++j) {
    lo[j] = -kPi / 2;
    hi[j] = kPi / 2;
  }

  std::vector<std::vector<double>> starts = canonical_starts(obj);
  for (const auto& w : warm_starts) {
    std::vector<double> x;
    x.push_back(std::clamp(w.state.theta, 0.0, kPi / 4));
    if (obj.free_delta) {
      const double dlo = -0.25 + w.state.r * std::cos(w.state.theta) / 2;
      const double dhi = 0.25 - w.state.r * std::sin(w.state.theta) / 2;
      const double span = dhi - dlo;
      x.push_back(std::fabs(span) > 1e-15 ? std::clamp((w.state.delta - dlo) / span, 0.0, 1.0) : 0.5);
    }
    x.insert(x.end(), {w.angles.alpha0, w.angles.alpha1, w.angles.beta0, w.angles.beta1});
    starts.push_back(std::move(x));
  }
  const size_t fixed_starts = starts.size();
  const size_t total = fixed_starts + cfg.restarts;
  const uint64_t salt = mix64(std::bit_cast<uint64_t>(omega)) ^ (static_cast<uint64_t>(q) << 56);

  struct Slot {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> x;
  };
  std::vector<Slot> slots(total);

  const BoxObjective fn = [&obj](const double* x, double* g) { return obj(x, g); };

  // Wall-restricted sub-problem: theta pinned to the physicality wall, the
  // remaining coordinates free. Several optima live exactly on that wall.
  const int wdim = obj.free_delta ? 5 : 4;
  std::vector<double> wlo(static_cast<size_t>(wdim), -kPi / 2), whi(static_cast<size_t>(wdim), kPi / 2);
  if (obj.free_delta) {
    wlo[0] = 0.0;
    whi[0] = 1.0;
  }
  const BoxObjective wall_fn = [&obj](const double* xw, double* gw) {
    const double f = obj.wall_value(xw);
    if (gw) {
      const int n = obj.free_delta ? 5 : 4;
      constexpr double h = 1e-6;
      double xt[5];
      for (int j = 0; j < n; ++j) xt[j] = xw[j];
      for (int j = 0; j < n; ++j) {
        const double x0v = xw[j];
        xt[j] = x0v + h;
        const double fp = obj.wall_value(xt);
        xt[j] = x0v - h;
        const double fm = obj.wall_value(xt);
        xt[j] = x0v;
        if (std::isnan(fp) && std::isnan(fm))
          gw[j] = 0;
        else if (std::isnan(fp))
          gw[j] = (f - fm) / h;
        else if (std::isnan(fm))
          gw[j] = (fp - f) / h;
        else
          gw[j] = (fp - fm) / (2 * h);
      }
    }
    return f;
  };

  parallel_for(total, cfg.threads, [&](size_t i) {
    std::vector<double> x0;
    if (i < fixed_starts) {
      x0 = starts[i];
    } else {
      CounterRng rng(cfg.seed, mix64(salt ^ (i - fixed_starts)));
      if (!sample_start(obj, rng, &x0)) return;  // infeasible restart, skipped
    }
    for (auto& v : x0) v = std::clamp(v, -10.0, 10.0);
    BoxResult res = minimize_box(fn, lo, hi, x0, static_cast<int>(cfg.max_iters), cfg.tolerance);
    if (!std::isfinite(res.value)) return;

    // re-solve on the wall from the same angle block
    std::vector<double> xw(static_cast<size_t>(wdim));
    {
      int k = 0;
      if (obj.free_delta) xw[static_cast<size_t>(k++)] = res.x[1];
      for (int j = 0; j < 4; ++j) xw[static_cast<size_t>(k + j)] = res.x[static_cast<size_t>((obj.free_delta ? 2 : 1) + j)];
    }
    BoxResult wres = minimize_box(wall_fn, wlo, whi, xw, static_cast<int>(std::min<uint32_t>(cfg.max_iters, 120)),
                                  cfg.tolerance);

    // keep the better of the two, re-evaluated exactly at a feasible strategy
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    try {
      const QubitStrategy cand = obj.strategy_at(res.x.data());
      best_val = entropy(q, cand, pxy);
      best_x = res.x;
    } catch (const std::exception&) {
    }
    if (std::isfinite(wres.value) && wres.value < best_val) {
      // rebuild the full coordinate vector with theta on the wall
      const double* ang = wres.x.data() + (obj.free_delta ? 1 : 0);
      const double tw = obj.wall_theta(ang);
      if (!std::isnan(tw)) {
        std::vector<double> xf;
        xf.push_back(tw);
        if (obj.free_delta) xf.push_back(wres.x[0]);
        for (int j = 0; j < 4; ++j) xf.push_back(ang[j]);
        try {
          const QubitStrategy cand = obj.strategy_at(xf.data());
          const double v = entropy(q, cand, pxy);
          if (v < best_val) {
            best_val = v;
            best_x = xf;
          }
        } catch (const std::exception&) {
        }
      }
    }
    if (!best_x.empty()) {
      slots[i].value = best_val;
      slots[i].x = std::move(best_x);
    }
  });

  MinimizeResult out;
  out.restarts_run = static_cast<uint32_t>(total);
  size_t best = total;
  for (size_t i = 0; i < total; ++i) {
    if (!std::isfinite(slots[i].value)) continue;
    ++out.feasible_restarts;
    if (best == total || slots[i].value < slots[best].value) best = i;
  }
  if (best == total) throw InfeasibleError("no feasible restart at omega=" + std::to_string(omega));

  QubitStrategy argmin = obj.strategy_at(slots[best].x.data());
  const double exact = entropy(q, argmin, pxy);
  const double score = chsh_score(argmin);
  if (std::fabs(score - omega) > 1e-7) throw NumericError("minimizer returned off-score strategy");
  out.point.omega = omega;
  out.point.entropy = exact;
  out.point.argmin = argmin;
  return out;
}

RateCurve build_g_curve(EntropyQuantity q, const std::vector<double>& grid, const InputDistribution& pxy,
                        const OptimizerConfig& cfg) {
  if (grid.size() < 8) throw DomainError("build_g_curve: need at least 8 grid points");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > kClassicalScore && grid[i] <= kQuantumMaxScore + 1e-12))
      throw DomainError("build_g_curve: grid point outside (3/4, (1+1/sqrt2)/2]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("build_g_curve: grid must be sorted increasing");
  }

  OptimizerConfig point_cfg = cfg;
  point_cfg.threads = 1;
  std::vector<MinimizeResult> results(grid.size());
  std::vector<std::string> failures(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](size_t i) {
    try {
      results[i] = minimize_entropy_at_score(q, grid[i], pxy, point_cfg);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (size_t i = 0; i < grid.size(); ++i)
    if (!failures[i].empty()) throw InfeasibleError("curve point omega=" + std::to_string(grid[i]) + ": " + failures[i]);

  // warm sweeps: retry each point from its neighbors' argmins
  OptimizerConfig warm_cfg = cfg;
  warm_cfg.restarts = 0;
  warm_cfg.threads = 1;
  const auto sweep = [&](bool forward) {
    for (size_t k = 0; k < grid.size(); ++k) {
      const size_t i = forward ? k : grid.size() - 1 - k;
      std::vector<QubitStrategy> warm;
      if (results[i].point.argmin) warm.push_back(*results[i].point.argmin);
      if (i > 0 && results[i - 1].point.argmin) warm.push_back(*results[i - 1].point.argmin);
      if (i + 1 < grid.size() && results[i + 1].point.argmin) warm.push_back(*results[i + 1].point.argmin);
      MinimizeResult r = minimize_entropy_at_score(q, grid[i], pxy, warm_cfg, warm);
      if (r.point.entropy < results[i].point.entropy) results[i] = r;
    }
  };
  sweep(true);
  sweep(false);

  RateCurve curve;
  curve.quantity = q;
  curve.pxy = pxy;
  curve.kind = CurveKind::G;
  curve.points.reserve(grid.size());
  for (auto& r : results) curve.points.push_back(std::move(r.point));
  curve.validate();
  return curve;
}

MonotoneCubic curve_interpolant(const RateCurve& c) {
  c.validate();
  std::vector<double> xs, ys;
  if (c.points.front().omega > kClassicalScore + 1e-12) {
    xs.push_back(kClassicalScore);
    ys.push_back(0.0);
  }
  for (const auto& p : c.points) {
    xs.push_back(p.omega);
    ys.push_back(p.entropy);
  }
  return MonotoneCubic(std::move(xs), std::move(ys));
}

RateCurve convex_envelope(const RateCurve& g) {
  if (g.kind != CurveKind::G) throw DomainError("convex_envelope expects a G curve");
  g.validate();
  const MonotoneCubic interp = curve_interpolant(g);

  const double w_lo = std::max(kClassicalScore + 1e-4, g.points.front().omega);
  const double w_hi = g.points.back().omega;
  const auto h = [&](double w) { return interp.deriv(w) * (w - kClassicalScore) - interp.eval(w); };

  // refined scan for sign changes of h
  std::vector<double> roots;
  const int kSub = 8;
  double prev_w = w_lo;
  double prev_h = h(w_lo);
  for (size_t pi = 0; pi + 1 < g.points.size(); ++pi) {
    const double a = std::max(w_lo, g.points[pi].omega);
    const double b = std::min(w_hi, g.points[pi + 1].omega);
    if (!(b > a)) continue;
    for (int s = 1; s <= kSub; ++s) {
      const double w = a + (b - a) * s / kSub;
      const double hw = h(w);
      if ((prev_h < 0 && hw >= 0) || (prev_h > 0 && hw <= 0)) {
        double x_lo = prev_w, x_hi = w, f_lo = prev_h;
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (x_lo + x_hi);
          const double fm = h(mid);
          if ((f_lo < 0) == (fm < 0)) {
            x_lo = mid;
            f_lo = fm;
          } else {
            x_hi = mid;
          }
          if (x_hi - x_lo < 1e-12) break;
        }
        roots.push_back(0.5 * (x_lo + x_hi));
      }
      prev_w = w;
      prev_h = hw;
    }
  }

  RateCurve f;
  f.quantity = g.quantity;
  f.pxy = g.pxy;
  f.kind = CurveKind::F;

  if (roots.empty()) {
    f.points = g.points;
  } else {
    const double omega_star = roots.back();
    const double slope = interp.deriv(omega_star);
    f.tangent = TangentInfo{omega_star, slope};
    f.tangent_warning = roots.size() > 1;
    for (const auto& p : g.points) {
      if (std::fabs(p.omega - omega_star) < 1e-4) continue;
      if (p.omega < omega_star) {
        f.points.push_back({p.omega, slope * (p.omega - kClassicalScore), std::nullopt});
      } else {
        f.points.push_back(p);
      }
    }
    CurvePoint star{omega_star, slope * (omega_star - kClassicalScore), std::nullopt};
    const auto it = std::lower_bound(f.points.begin(), f.points.end(), omega_star,
                                     [](const CurvePoint& p, double w) { return p.omega < w; });
    f.points.insert(it, star);
  }

  // lower-hull pass: guards the convexity invariant against optimizer noise
  // and the slight concave approach some curves have near the maximal score
  const size_t n = f.points.size();
  std::vector<size_t> hull;
  for (size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const auto& a = f.points[hull[hull.size() - 2]];
      const auto& b = f.points[hull[hull.size() - 1]];
      const auto& c = f.points[i];
      const double cross = (b.omega - a.omega) * (c.entropy - a.entropy) - (c.omega - a.omega) * (b.entropy - a.entropy);
      if (cross <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  size_t seg = 0;
  for (size_t i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() && f.points[hull[seg + 1]].omega < f.points[i].omega) ++seg;
    if (seg + 1 >= hull.size()) break;
    const auto& a = f.points[hull[seg]];
    const auto& b = f.points[hull[seg + 1]];
    const double t = (f.points[i].omega - a.omega) / (b.omega - a.omega);
    const double hv = a.entropy + t * (b.entropy - a.entropy);
    if (hv < f.points[i].entropy - 1e-12) {
      f.points[i].entropy = hv;
      f.points[i].argmin = std::nullopt;
    }
  }

  f.validate();
  return f;
}

std::vector<double> default_grid(uint32_t base_points) {
  if (base_points < 8) base_points = 8;
  std::vector<double> g;
  const double lo = kClassicalScore + 5e-4;
  for (uint32_t i = 0; i < base_points; ++i)
    g.push_back(lo + (kQuantumMaxScore - lo) * i / (base_points - 1));
  for (int i = 0; i <= 9; ++i) g.push_back(lo + 5e-4 * i);
  for (double w = 0.8400; w < kQuantumMaxScore; w += 5e-4) g.push_back(w);
  g.push_back(kQuantumMaxScore);
  std::sort(g.begin(), g.end());
  std::vector<double> out;
  for (double w : g) {
    if (!out.empty() && w - out.back() < 1e-9) continue;
    if (w > kQuantumMaxScore) w = kQuantumMaxScore;
    out.push_back(w);
  }
  return out;
}

// --------------------------- import / export -------------------------------

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string export_curve(const RateCurve& c, CurveFormat fmt) {
  c.validate();
  if (fmt == CurveFormat::Csv) {
    std::ostringstream os;
    os << "# direx-curve v1\n";
    os << "# quantity=" << quantity_name(c.quantity) << "\n";
    os << "# kind=" << (c.kind == CurveKind::G ? "G" : "F") << "\n";
    os << "# pxy=" << fmt17(c.pxy.p[0]) << "," << fmt17(c.pxy.p[1]) << "," << fmt17(c.pxy.p[2]) << ","
       << fmt17(c.pxy.p[3]) << "\n";
    if (c.tangent)
      os << "# tangent=" << fmt17(c.tangent->omega_star) << "," << fmt17(c.tangent->slope) << "\n";
    if (c.tangent_warning) os << "# tangent_warning=1\n";
    os << "omega,entropy,R,theta,delta,alpha0,alpha1,beta0,beta1\n";
    for (const auto& p : c.points) {
      os << fmt17(p.omega) << "," << fmt17(p.entropy);
      if (p.argmin) {
        const auto& s = *p.argmin;
        os << "," << fmt17(s.state.r) << "," << fmt17(s.state.theta) << "," << fmt17(s.state.delta) << ","
           << fmt17(s.angles.alpha0) << "," << fmt17(s.angles.alpha1) << "," << fmt17(s.angles.beta0) << ","
           << fmt17(s.angles.beta1);
      } else {
        os << ",,,,,,,";
      }
      os << "\n";
    }
    return os.str();
  }

  nlohmann::json j;
  j["format"] = "direx-curve";
  j["version"] = 1;
  j["quantity"] = quantity_name(c.quantity);
  j["kind"] = c.kind == CurveKind::G ? "G" : "F";
  j["pxy"] = c.pxy.p;
  if (c.tangent)
    j["tangent"] = {{"omega_star", c.tangent->omega_star}, {"slope", c.tangent->slope}};
  else
    j["tangent"] = nullptr;
  j["tangent_warning"] = c.tangent_warning;
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : c.points) {
    nlohmann::json jp;
    jp["omega"] = p.omega;
    jp["entropy"] = p.entropy;
    if (p.argmin) {
      const auto& s = *p.argmin;
      jp["strategy"] = {{"r", s.state.r},          {"theta", s.state.theta},   {"delta", s.state.delta},
                        {"alpha0", s.angles.alpha0}, {"alpha1", s.angles.alpha1}, {"beta0", s.angles.beta0},
                        {"beta1", s.angles.beta1}};
    } else {
      jp["strategy"] = nullptr;
    }
    pts.push_back(std::move(jp));
  }
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

RateCurve import_csv(const std::string& text) {
  RateCurve c;
  bool have_quantity = false;
  bool header_seen = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      std::string val = line.substr(eq + 1);
      if (!val.empty() && val.back() == '\r') val.pop_back();
      if (key == "quantity") {
        if (!quantity_from_name(val, &c.quantity)) throw IoError("unknown curve quantity: " + val);
        have_quantity = true;
      } else if (key == "kind") {
        c.kind = val == "F" ? CurveKind::F : CurveKind::G;
      } else if (key == "pxy") {
        const auto parts = split_csv_line(val);
        if (parts.size() != 4) throw IoError("bad pxy header");
        for (int i = 0; i < 4; ++i) c.pxy.p[static_cast<size_t>(i)] = std::stod(parts[static_cast<size_t>(i)]);
      } else if (key == "tangent") {
        const auto parts = split_csv_line(val);
        if (parts.size() != 2) throw IoError("bad tangent header");
        c.tangent = TangentInfo{std::stod(parts[0]), std::stod(parts[1])};
      } else if (key == "tangent_warning") {
        c.tangent_warning = val == "1" || val == "true";
      }
      continue;
    }
    if (!header_seen) {  // column header row
      header_seen = true;
      continue;
    }
    const auto parts = split_csv_line(line);
    if (parts.size() != 2 && parts.size() != 9) throw IoError("bad curve row: " + line);
    CurvePoint p;
    p.omega = std::stod(parts[0]);
    p.entropy = std::stod(parts[1]);
    if (parts.size() == 9 && !parts[2].empty()) {
      QubitStrategy s;
      s.state.r = std::stod(parts[2]);
      s.state.theta = std::stod(parts[3]);
      s.state.delta = std::stod(parts[4]);
      s.angles.alpha0 = std::stod(parts[5]);
      s.angles.alpha1 = std::stod(parts[6]);
      s.angles.beta0 = std::stod(parts[7]);
      s.angles.beta1 = std::stod(parts[8]);
      p.argmin = s;
    }
    c.points.push_back(p);
  }
  if (!have_quantity) throw IoError("curve file missing quantity header");
  c.validate();
  return c;
}

RateCurve import_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "direx-curve") throw IoError("not a direx curve file");
  RateCurve c;
  if (!quantity_from_name(j.at("quantity").get<std::string>(), &c.quantity))
    throw IoError("unknown curve quantity");
  c.kind = j.at("kind").get<std::string>() == "F" ? CurveKind::F : CurveKind::G;
  const auto pv = j.at("pxy");
  for (int i = 0; i < 4; ++i) c.pxy.p[static_cast<size_t>(i)] = pv.at(static_cast<size_t>(i)).get<double>();
  if (!j.at("tangent").is_null())
    c.tangent = TangentInfo{j["tangent"].at("omega_star").get<double>(), j["tangent"].at("slope").get<double>()};
  c.tangent_warning = j.value("tangent_warning", false);
  for (const auto& jp : j.at("points")) {
    CurvePoint p;
    p.omega = jp.at("omega").get<double>();
    p.entropy = jp.at("entropy").get<double>();
    if (!jp.at("strategy").is_null()) {
      const auto& js = jp["strategy"];
      QubitStrategy s;
      s.state.r = js.at("r").get<double>();
      s.state.theta = js.at("theta").get<double>();
      s.state.delta = js.at("delta").get<double>();
      s.angles.alpha0 = js.at("alpha0").get<double>();
      s.angles.alpha1 = js.at("alpha1").get<double>();
      s.angles.beta0 = js.at("beta0").get<double>();
      s.angles.beta1 = js.at("beta1").get<double>();
      p.argmin = s;
    }
    c.points.push_back(p);
  }
  c.validate();
  return c;
}

}  // namespace

RateCurve import_curve(const std::string& text, CurveFormat fmt) {
  return fmt == CurveFormat::Csv ? import_csv(text) : import_json(text);
}

void save_curve(const RateCurve& c, const std::string& path) {
  const CurveFormat fmt = path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? CurveFormat::Json
                                                                                      : CurveFormat::Csv;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << export_curve(c, fmt);
  if (!os) throw IoError("write failed: " + path);
}

RateCurve load_curve(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return import_curve(text, CurveFormat::Json);
  return import_curve(text, CurveFormat::Csv);
}

// ------------------------------ gradient check -----------------------------

GradientCheckResult gradient_check(EntropyQuantity q, const QubitStrategy& s, const InputDistribution& pxy) {
  GradientCheckResult out;
  validate_strategy(s);
  const double omega = chsh_score(s);
  if (omega <= kClassicalScore + 1e-6 || omega > kQuantumMaxScore - 1e-9) {
    out.excluded = true;
    out.reason = "score outside the open curve range";
    return out;
  }
  if (s.state.r < 0.02 || s.state.r > 0.995) {
    out.excluded = true;
    out.reason = "r too close to the boundary";
    return out;
  }
  if (s.state.theta < 1e-5 || s.state.theta > theta_max(s.state.r) - 1e-5) {
    out.excluded = true;
    out.reason = "theta too close to the boundary";
    return out;
  }
  const auto eps = epsilon_table(s.state, s.angles);
  for (double e : eps) {
    if (2 * e < 1e-4 || 2 * e > 1 - 1e-4) {
      out.excluded = true;
      out.reason = "hbin argument near 0/1 (non-smooth region)";
      return out;
    }
  }
  // delta_star clamp boundary is a derivative branch switch
  if (quantity_is_delta_reducible(q)) {
    const double raw = s.state.r * s.state.r * std::cos(2 * s.state.theta) / 4;
    const double lo = -0.25 + s.state.r * std::cos(s.state.theta) / 2;
    const double hi = 0.25 - s.state.r * std::sin(s.state.theta) / 2;
    if (std::min(std::fabs(raw - lo), std::fabs(raw - hi)) < 1e-5) {
      out.excluded = true;
      out.reason = "delta_star at clamp boundary";
      return out;
    }
  }

  ReducedObjective obj{q, omega, pxy, !quantity_is_delta_reducible(q), 0};
  obj.dim = obj.free_delta ? 6 : 5;
  std::vector<double> x;
  x.push_back(s.state.theta);
  if (obj.free_delta) {
    const double lo = -0.25 + s.state.r * std::cos(s.state.theta) / 2;
    const double hi = 0.25 - s.state.r * std::sin(s.state.theta) / 2;
    const double span = hi - lo;
    x.push_back(std::fabs(span) > 1e-12 ? std::clamp((s.state.delta - lo) / span, 0.0, 1.0) : 0.5);
    if (x[1] < 1e-4 || x[1] > 1 - 1e-4) {
      out.excluded = true;
      out.reason = "delta too close to its box edge";
      return out;
    }
  }
  x.insert(x.end(), {s.angles.alpha0, s.angles.alpha1, s.angles.beta0, s.angles.beta1});

  std::vector<double> g(x.size());
  const double f0 = obj(x.data(), g.data());
  if (!std::isfinite(f0)) {
    out.excluded = true;
    out.reason = "objective infeasible at the point";
    return out;
  }
  constexpr double h = 1e-6;
  for (size_t j = 0; j < x.size(); ++j) {
    std::vector<double> xt = x;
    xt[j] = x[j] + h;
    const double fp = obj(xt.data(), nullptr);
    xt[j] = x[j] - h;
    const double fm = obj(xt.data(), nullptr);
    if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
    const double fd = (fp - fm) / (2 * h);
    const double rel = std::fabs(g[j] - fd) / std::max(1.0, std::fabs(fd));
    out.max_rel_error = std::max(out.max_rel_error, rel);
  }
  return out;
}

}  // namespace direx
