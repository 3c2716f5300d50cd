#include "direx/direx.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "curve_builder.hpp"
#include "eat_rates.hpp"
#include "entropy_core.hpp"
#include "parallel.hpp"
#include "protocol_sim.hpp"
#include "verify_oracle.hpp"

struct direx_curve {
  direx::RateCurve curve;
};

namespace {

thread_local std::string g_last_error;

direx_status fail(direx_status code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

template <class Fn>
direx_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DIREX_OK;
  } catch (const direx::DomainError& e) {
    return fail(DIREX_ERR_DOMAIN, e.what());
  } catch (const direx::InfeasibleError& e) {
    return fail(DIREX_ERR_INFEASIBLE, e.what());
  } catch (const direx::IoError& e) {
    return fail(DIREX_ERR_IO, e.what());
  } catch (const direx::MismatchError& e) {
    return fail(DIREX_ERR_MISMATCH, e.what());
  } catch (const direx::NumericError& e) {
    return fail(DIREX_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(DIREX_ERR_NUMERIC, e.what());
  }
}

direx::QubitStrategy to_strategy(const double s[7]) {
  direx::QubitStrategy q;
  q.state.r = s[0];
  q.state.theta = s[1];
  q.state.delta = s[2];
  q.angles = {s[3], s[4], s[5], s[6]};
  return q;
}

void from_strategy(const direx::QubitStrategy& q, double s[7]) {
  s[0] = q.state.r;
  s[1] = q.state.theta;
  s[2] = q.state.delta;
  s[3] = q.angles.alpha0;
  s[4] = q.angles.alpha1;
  s[5] = q.angles.beta0;
  s[6] = q.angles.beta1;
}

direx::InputDistribution to_pxy(const double p[4]) {
  direx::InputDistribution d;
  for (int i = 0; i < 4; ++i) d.p[static_cast<size_t>(i)] = p[i];
  return d;
}

bool to_quantity(int q, direx::EntropyQuantity* out) {
  if (q < 0 || q > 5) return false;
  *out = static_cast<direx::EntropyQuantity>(q);
  return true;
}

direx::ProtocolSpec to_protocol(const direx_protocol* p) {
  direx::ProtocolSpec s;
  s.variant = static_cast<direx::ProtocolVariant>(p->variant);
  s.gamma = p->gamma;
  s.zeta_a = p->zeta_a;
  s.zeta_b = p->zeta_b;
  s.omega_exp = p->omega_exp;
  s.delta_conf = p->delta_conf;
  s.n = p->rounds;
  return s;
}

direx::ErrorBudget to_budget(const direx_error_budget* b) {
  direx::ErrorBudget e;
  e.eps_h = b->eps_h;
  e.eps_eat = b->eps_eat;
  e.eps_ext = b->eps_ext;
  e.eps_completeness = b->eps_completeness;
  e.ext_loss_const = b->ext_loss_const;
  return e;
}

void from_eat(const direx::EatResult& r, direx_eat_result* out) {
  out->hmin_bound = r.hmin_bound;
  out->input_bits = r.input_bits;
  out->output_len = r.output_len;
  out->net_expansion = r.net_expansion;
  out->alpha = r.alpha;
  out->t = r.t;
  out->gamma_or_zeta = r.gamma_or_zeta;
  out->delta_conf = r.delta_conf;
  out->rate_r = r.rate_r;
  out->eps_s = r.eps_s;
}

}  // namespace

extern "C" {

const char* direx_version(void) { return "0.1.0"; }

const char* direx_status_str(int status) {
  switch (status) {
    case DIREX_OK: return "ok";
    case DIREX_ERR_ARG: return "invalid argument";
    case DIREX_ERR_DOMAIN: return "domain error";
    case DIREX_ERR_NUMERIC: return "numeric error";
    case DIREX_ERR_IO: return "i/o error";
    case DIREX_ERR_INFEASIBLE: return "infeasible";
    case DIREX_ERR_MISMATCH: return "data mismatch";
    default: return "unknown status";
  }
}

const char* direx_last_error(void) { return g_last_error.c_str(); }

void direx_opt_config_default(direx_opt_config* cfg) {
  if (!cfg) return;
  cfg->restarts = 10000;
  cfg->max_iters = 200;
  cfg->tolerance = 1e-9;
  cfg->seed = 0x5eed;
  cfg->threads = 0;
}

direx_status direx_hbin(double p, double* out) {
  if (!out) return fail(DIREX_ERR_ARG, "null out");
  return guard([&] { *out = direx::hbin(p); });
}

direx_status direx_theta_max(double r, double* out) {
  if (!out) return fail(DIREX_ERR_ARG, "null out");
  return guard([&] { *out = direx::theta_max(r); });
}

direx_status direx_delta_star(double r, double theta, double* out) {
  if (!out) return fail(DIREX_ERR_ARG, "null out");
  return guard([&] { *out = direx::delta_star(r, theta); });
}

direx_status direx_bell_spectrum(const double strategy[7], double lambda[4]) {
  if (!strategy || !lambda) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    const auto lam = direx::bell_spectrum(to_strategy(strategy).state);
    for (int i = 0; i < 4; ++i) lambda[i] = lam[static_cast<size_t>(i)];
  });
}

direx_status direx_epsilon_table(const double strategy[7], double eps[4]) {
  if (!strategy || !eps) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    const auto s = to_strategy(strategy);
    direx::validate_strategy(s);
    const auto table = direx::epsilon_table(s.state, s.angles);
    for (int i = 0; i < 4; ++i) eps[i] = table[static_cast<size_t>(i)];
  });
}

direx_status direx_chsh_score(const double strategy[7], double* out) {
  if (!strategy || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    const auto s = to_strategy(strategy);
    direx::validate_strategy(s);
    *out = direx::chsh_score(s);
  });
}

direx_status direx_entropy(int quantity, const double strategy[7], const double pxy[4], double* out) {
  if (!strategy || !pxy || !out) return fail(DIREX_ERR_ARG, "null argument");
  direx::EntropyQuantity q;
  if (!to_quantity(quantity, &q)) return fail(DIREX_ERR_ARG, "unknown quantity");
  return guard([&] { *out = direx::entropy(q, to_strategy(strategy), to_pxy(pxy)); });
}

direx_status direx_entropy_brute_force(int quantity, const double strategy[7], const double pxy[4], double* out) {
  if (!strategy || !pxy || !out) return fail(DIREX_ERR_ARG, "null argument");
  direx::EntropyQuantity q;
  if (!to_quantity(quantity, &q)) return fail(DIREX_ERR_ARG, "unknown quantity");
  return guard([&] { *out = direx::brute_force_entropy(q, to_strategy(strategy), to_pxy(pxy)); });
}

direx_status direx_analytic_a00e(double omega, double* out) {
  if (!out) return fail(DIREX_ERR_ARG, "null out");
  return guard([&] { *out = direx::analytic_a_00e(omega); });
}

direx_status direx_analytic_g1(double omega, double* out) {
  if (!out) return fail(DIREX_ERR_ARG, "null out");
  return guard([&] { *out = direx::analytic_g1(omega); });
}

direx_status direx_analytic_g2(double omega, double* out) {
  if (!out) return fail(DIREX_ERR_ARG, "null out");
  return guard([&] { *out = direx::analytic_g2(omega); });
}

direx_status direx_random_strategy(uint64_t seed, uint64_t index, double strategy[7]) {
  if (!strategy) return fail(DIREX_ERR_ARG, "null out");
  return guard([&] { from_strategy(direx::random_strategy(seed, index), strategy); });
}

direx_status direx_solve_r_for_score(double theta, const double angles[4], double omega, double* out) {
  if (!angles || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    const direx::MeasurementAngles m{angles[0], angles[1], angles[2], angles[3]};
    *out = direx::solve_r_for_score(theta, m, omega);
  });
}

direx_status direx_default_grid(uint32_t base_points, double* out, size_t capacity, size_t* out_n) {
  if (!out_n) return fail(DIREX_ERR_ARG, "null out_n");
  return guard([&] {
    const auto grid = direx::default_grid(base_points);
    *out_n = grid.size();
    if (out) {
      if (capacity < grid.size()) throw direx::DomainError("grid buffer too small");
      std::memcpy(out, grid.data(), grid.size() * sizeof(double));
    }
  });
}

direx_status direx_curve_build(int quantity, const double* omegas, size_t n, const double pxy[4],
                               const direx_opt_config* cfg, direx_curve** out) {
  if (!omegas || !pxy || !out) return fail(DIREX_ERR_ARG, "null argument");
  direx::EntropyQuantity q;
  if (!to_quantity(quantity, &q)) return fail(DIREX_ERR_ARG, "unknown quantity");
  return guard([&] {
    direx::OptimizerConfig oc;
    if (cfg) {
      oc.restarts = cfg->restarts;
      oc.max_iters = cfg->max_iters;
      oc.tolerance = cfg->tolerance;
      oc.seed = cfg->seed;
      oc.threads = cfg->threads;
    }
    const std::vector<double> grid(omegas, omegas + n);
    auto curve = direx::build_g_curve(q, grid, to_pxy(pxy), oc);
    *out = new direx_curve{std::move(curve)};
  });
}

direx_status direx_curve_envelope(const direx_curve* g, direx_curve** out) {
  if (!g || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] { *out = new direx_curve{direx::convex_envelope(g->curve)}; });
}

void direx_curve_free(direx_curve* c) { delete c; }

direx_status direx_curve_info(const direx_curve* c, int* quantity, int* kind, size_t* num_points) {
  if (!c) return fail(DIREX_ERR_ARG, "null curve");
  if (quantity) *quantity = static_cast<int>(c->curve.quantity);
  if (kind) *kind = c->curve.kind == direx::CurveKind::F ? 1 : 0;
  if (num_points) *num_points = c->curve.points.size();
  return DIREX_OK;
}

direx_status direx_curve_point(const direx_curve* c, size_t index, double* omega, double* entropy,
                               double strategy_or_null[7], int* has_strategy) {
  if (!c) return fail(DIREX_ERR_ARG, "null curve");
  if (index >= c->curve.points.size()) return fail(DIREX_ERR_ARG, "point index out of range");
  const auto& p = c->curve.points[index];
  if (omega) *omega = p.omega;
  if (entropy) *entropy = p.entropy;
  if (has_strategy) *has_strategy = p.argmin ? 1 : 0;
  if (strategy_or_null && p.argmin) from_strategy(*p.argmin, strategy_or_null);
  return DIREX_OK;
}

direx_status direx_curve_tangent(const direx_curve* c, int* has_tangent, double* omega_star, double* slope) {
  if (!c || !has_tangent) return fail(DIREX_ERR_ARG, "null argument");
  *has_tangent = c->curve.tangent ? 1 : 0;
  if (c->curve.tangent) {
    if (omega_star) *omega_star = c->curve.tangent->omega_star;
    if (slope) *slope = c->curve.tangent->slope;
  }
  return DIREX_OK;
}

direx_status direx_curve_eval(const direx_curve* c, double omega, double* value, double* deriv_or_null) {
  if (!c || !value) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    const auto interp = direx::curve_interpolant(c->curve);
    *value = interp.eval(omega);
    if (deriv_or_null) *deriv_or_null = interp.deriv(omega);
  });
}

direx_status direx_curve_save(const direx_curve* c, const char* path) {
  if (!c || !path) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] { direx::save_curve(c->curve, path); });
}

direx_status direx_curve_load(const char* path, direx_curve** out) {
  if (!path || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] { *out = new direx_curve{direx::load_curve(path)}; });
}

direx_status direx_curve_export(const direx_curve* c, int format, char** text) {
  if (!c || !text) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    const auto s =
        direx::export_curve(c->curve, format == 1 ? direx::CurveFormat::Json : direx::CurveFormat::Csv);
    *text = new char[s.size() + 1];
    std::memcpy(*text, s.c_str(), s.size() + 1);
  });
}

void direx_string_free(char* text) { delete[] text; }

direx_status direx_completeness_error(const direx_protocol* p, double* out) {
  if (!p || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] { *out = direx::completeness_error(to_protocol(p)); });
}

direx_status direx_delta_for_completeness(const direx_protocol* p, double eps_c, double* out) {
  if (!p || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] { *out = direx::delta_for_completeness(to_protocol(p), eps_c); });
}

direx_status direx_input_randomness(const direx_protocol* p, double* out) {
  if (!p || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] { *out = direx::input_randomness(to_protocol(p)); });
}

direx_status direx_eat_net(const direx_curve* f, const direx_protocol* p, const direx_error_budget* b,
                           int optimize_rate_param, direx_eat_result* out) {
  if (!f || !p || !b || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    direx::NetOptions opts;
    opts.optimize_rate_param = optimize_rate_param != 0;
    const auto r = direx::net_expansion(to_protocol(p), to_budget(b), f->curve, opts);
    from_eat(r, out);
  });
}

direx_status direx_eat_crossover(const direx_curve* f, const direx_protocol* p, const direx_error_budget* b,
                                 int optimize_rate_param, int* found, uint64_t* n_out, direx_eat_result* out) {
  if (!f || !p || !b || !found || !n_out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    direx::NetOptions opts;
    opts.optimize_rate_param = optimize_rate_param != 0;
    const auto rep = direx::crossover_n(to_protocol(p), to_budget(b), f->curve, opts);
    *found = rep.found ? 1 : 0;
    *n_out = rep.n;
    if (out && rep.found) from_eat(rep.result, out);
  });
}

direx_status direx_simulate(const direx_protocol* p, const double omega_xy[4], const direx_sim_config* cfg,
                            direx_sim_summary* out, uint8_t* aborted_or_null, double* scores_or_null) {
  if (!p || !omega_xy || !cfg || !out) return fail(DIREX_ERR_ARG, "null argument");
  return guard([&] {
    direx::HonestDeviceModel device;
    for (int i = 0; i < 4; ++i) device.omega_xy[static_cast<size_t>(i)] = omega_xy[i];
    direx::SimConfig sc{cfg->seed, cfg->trials, cfg->threads};
    const auto proto = to_protocol(p);
    if (aborted_or_null || scores_or_null) {
      direx::parallel_for(cfg->trials, cfg->threads, [&](size_t i) {
        const auto t = direx::simulate(proto, device, cfg->seed, i);
        if (aborted_or_null) aborted_or_null[i] = t.aborted ? 1 : 0;
        if (scores_or_null) scores_or_null[i] = t.score_hat;
      });
    }
    const auto rep = direx::empirical_completeness(proto, device, sc);
    out->trials = rep.trials;
    out->aborts = rep.aborts;
    out->abort_rate = rep.abort_rate;
    out->analytic_bound = rep.analytic_bound;
    out->mean_score = rep.mean_score;
    out->score_stddev = rep.score_stddev;
  });
}

direx_status direx_verify_oracle(uint64_t seed, uint32_t count, double tol, uint32_t threads, double* max_dev) {
  if (!max_dev) return fail(DIREX_ERR_ARG, "null out");
  if (count == 0) return fail(DIREX_ERR_ARG, "count must be positive");
  direx_status status = DIREX_OK;
  const direx_status inner = guard([&] {
    const auto uniform = direx::InputDistribution::uniform();
    std::vector<double> worst(count, 0.0);
    std::vector<uint8_t> failed(count, 0);
    direx::parallel_for(count, threads, [&](size_t i) {
      try {
        const auto s = direx::random_strategy(seed, i);
        double w = 0;
        for (int q = 0; q < 6; ++q) {
          const auto quantity = static_cast<direx::EntropyQuantity>(q);
          const double a = direx::entropy(quantity, s, uniform);
          const double b = direx::brute_force_entropy(quantity, s, uniform);
          w = std::max(w, std::fabs(a - b));
        }
        worst[i] = w;
      } catch (const std::exception&) {
        failed[i] = 1;
      }
    });
    double dev = 0;
    for (size_t i = 0; i < count; ++i) {
      if (failed[i]) throw direx::NumericError("oracle evaluation failed on a sampled strategy");
      dev = std::max(dev, worst[i]);
    }
    *max_dev = dev;
    if (dev > tol) status = DIREX_ERR_MISMATCH;
  });
  if (inner != DIREX_OK) return inner;
  if (status != DIREX_OK) return fail(status, "entropy paths disagree beyond tolerance");
  return DIREX_OK;
}

direx_status direx_verify_envelope(const direx_curve* f, uint64_t seed, uint32_t count, double tol,
                                   double* worst_margin) {
  if (!f || !worst_margin) return fail(DIREX_ERR_ARG, "null argument");
  if (count == 0) return fail(DIREX_ERR_ARG, "count must be positive");
  direx_status status = DIREX_OK;
  const direx_status inner = guard([&] {
    const auto interp = direx::curve_interpolant(f->curve);
    double worst = std::numeric_limits<double>::infinity();
    for (uint32_t i = 0; i < count; ++i) {
      const auto s = direx::random_strategy(seed, i);
      const double score = direx::chsh_score(s);
      const double h = direx::entropy(f->curve.quantity, s, f->curve.pxy);
      double fval;
      if (score <= direx::kClassicalScore) {
        fval = f->curve.tangent ? f->curve.tangent->slope * (score - direx::kClassicalScore) : 0.0;
      } else {
        fval = interp.eval(score);
      }
      worst = std::min(worst, h - fval);
    }
    *worst_margin = worst;
    if (worst < -tol) status = DIREX_ERR_MISMATCH;
  });
  if (inner != DIREX_OK) return inner;
  if (status != DIREX_OK) return fail(status, "a sampled strategy fell below the envelope");
  return DIREX_OK;
}

}  // extern "C"
