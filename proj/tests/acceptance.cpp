// Acceptance suite: every release-gating check in one binary, one verdict
// line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

#include "curve_builder.hpp"
#include "parallel.hpp"
#include "eat_rates.hpp"
#include "protocol_sim.hpp"
#include "verify_oracle.hpp"

using namespace direx;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s  %s\n", pass ? "PASS" : "FAIL", criterion, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

OptimizerConfig opt_config(uint32_t restarts) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = 0xACCE97;
  cfg.threads = 0;  // hardware concurrency
  return cfg;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

// dense near the top where the E-quantity tangent points live
std::vector<double> e_quantity_grid() {
  std::vector<double> g = uniform_grid(0.7505, 0.8445, 17);
  for (double w = 0.845; w < kQuantumMaxScore - 1e-9; w += 2.5e-4) g.push_back(w);
  g.push_back(kQuantumMaxScore);
  return g;
}

// F evaluated with the linear extension below the classical score
double envelope_value(const RateCurve& f, const MonotoneCubic& interp, double score) {
  if (score <= kClassicalScore) return f.tangent ? f.tangent->slope * (score - kClassicalScore) : 0.0;
  return interp.eval(score);
}

ErrorBudget paper_budget() {
  ErrorBudget b;
  b.eps_eat = 3.09e-12;
  b.eps_h = 3.09e-12 * 0.4995;
  b.eps_ext = 3.09e-12 * 1e-3;
  b.eps_completeness = 1e-6;
  return b;
}

}  // namespace

int main() {
  const auto uni = InputDistribution::uniform();
  const unsigned hw = std::thread::hardware_concurrency();
  std::printf("acceptance suite, %u hardware threads\n", hw ? hw : 1);

  // ---- criterion 1: analytic oracle for the one-sided spot-checking curve
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = uniform_grid(0.7505, kQuantumMaxScore, 20);
    const auto curve = build_g_curve(EntropyQuantity::A_00E, grid, uni, opt_config(500));
    double worst = 0;
    for (const auto& p : curve.points) worst = std::max(worst, std::fabs(p.entropy - analytic_a_00e(p.omega)));
    const double elapsed = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "(max |G - analytic| = %.3e over 20 points, 500 restarts, %.1f s)", worst,
                  elapsed);
    report(1, "numerical G_A|00E matches the closed form within 1e-4", worst <= 1e-4 && elapsed <= 300.0, buf);
  }

  // ---- shared curve builds for the remaining criteria
  const auto grid_std = default_grid(40);
  const auto g_ab_xye = build_g_curve(EntropyQuantity::AB_XYE, grid_std, uni, opt_config(250));
  const auto g_a_xye = build_g_curve(EntropyQuantity::A_XYE, grid_std, uni, opt_config(250));
  const auto g_ab_00e = build_g_curve(EntropyQuantity::AB_00E, grid_std, uni, opt_config(250));
  const auto g_a_00e = build_g_curve(EntropyQuantity::A_00E, grid_std, uni, opt_config(250));
  const auto grid_e = e_quantity_grid();
  const auto g_ab_e = build_g_curve(EntropyQuantity::AB_E, grid_e, uni, opt_config(240));
  const auto g_a_e = build_g_curve(EntropyQuantity::A_E, grid_e, uni, opt_config(240));

  const auto f_ab_xye = convex_envelope(g_ab_xye);
  const auto f_a_xye = convex_envelope(g_a_xye);
  const auto f_ab_00e = convex_envelope(g_ab_00e);
  const auto f_a_00e = convex_envelope(g_a_00e);
  const auto f_ab_e = convex_envelope(g_ab_e);
  const auto f_a_e = convex_envelope(g_a_e);

  // ---- criterion 2: conjectured analytic forms for the XYE curves
  {
    bool pass = f_ab_xye.tangent && f_a_xye.tangent;
    double ws1 = 0, ws2 = 0, worst1 = 0, worst2 = 0;
    if (pass) {
      ws1 = f_ab_xye.tangent->omega_star;
      ws2 = f_a_xye.tangent->omega_star;
      for (const auto& p : g_ab_xye.points)
        if (p.omega >= ws1) worst1 = std::max(worst1, std::fabs(p.entropy - analytic_g1(p.omega)));
      for (const auto& p : g_a_xye.points)
        if (p.omega >= ws2) worst2 = std::max(worst2, std::fabs(p.entropy - analytic_g2(p.omega)));
      pass = std::fabs(ws1 - 0.84403) <= 5e-4 && std::fabs(ws2 - 0.84698) <= 5e-4 && worst1 <= 1e-4 &&
             worst2 <= 1e-4;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "(omega*_AB|XYE = %.6f, omega*_A|XYE = %.6f; max dev vs g1 = %.2e, vs g2 = %.2e)", ws1, ws2,
                  worst1, worst2);
    report(2, "G_AB|XYE and G_A|XYE reproduce g1/g2 with the paper tangent points", pass, buf);
  }

  // ---- criterion 3: curve landmarks for the E-conditioned quantities
  {
    bool pass = f_ab_e.tangent && f_a_e.tangent;
    double w1 = 0, v1 = 0, w2 = 0, v2 = 0, top = 0;
    if (pass) {
      const auto i_ab = curve_interpolant(g_ab_e);
      const auto i_a = curve_interpolant(g_a_e);
      w1 = f_ab_e.tangent->omega_star;
      v1 = i_ab.eval(w1);
      w2 = f_a_e.tangent->omega_star;
      v2 = i_a.eval(w2);
      for (const auto& p : f_ab_e.points) top = std::max(top, p.entropy);
      pass = std::fabs(w1 - 0.8523) <= 2e-3 && std::fabs(v1 - 1.8735) <= 2e-3 &&
             std::fabs(w2 - 0.8505) <= 2e-3 && std::fabs(v2 - 0.967) <= 2e-3 &&
             std::fabs(top - 1.9078523006019285) <= 1e-3;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf), "(AB|E tangent (%.4f, %.4f), A|E tangent (%.4f, %.4f), max F_AB|E %.4f)",
                  w1, v1, w2, v2, top);
    report(3, "F_AB|E and F_A|E tangent points and maximum match the reference values", pass, buf);
  }

  // ---- criterion 4: no sampled strategy beats the claimed minima
  {
    struct Item {
      const RateCurve* f;
      EntropyQuantity q;
    };
    const Item items[] = {{&f_ab_00e, EntropyQuantity::AB_00E}, {&f_ab_xye, EntropyQuantity::AB_XYE},
                          {&f_ab_e, EntropyQuantity::AB_E},     {&f_a_00e, EntropyQuantity::A_00E},
                          {&f_a_xye, EntropyQuantity::A_XYE},   {&f_a_e, EntropyQuantity::A_E}};
    double worst_margin = 1e300;
    for (const auto& item : items) {
      const auto interp = curve_interpolant(*item.f);
      for (uint64_t i = 0; i < 1000; ++i) {
        const auto s = random_strategy(0xE47E10 + static_cast<uint64_t>(item.q), i);
        const double margin =
            entropy(item.q, s, uni) - envelope_value(*item.f, interp, chsh_score(s));
        worst_margin = std::min(worst_margin, margin);
      }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "(worst entropy-above-envelope margin = %.3e over 6000 strategies)",
                  worst_margin);
    report(4, "never-below-envelope over seeded random strategies", worst_margin >= -1e-6, buf);
  }

  // ---- criterion 5: dual-path entropy oracle
  {
    const auto t0 = std::chrono::steady_clock::now();
    const uint32_t count = 10000;
    std::vector<double> worst(count, 0.0);
    std::vector<uint8_t> failed(count, 0);
    parallel_for(count, 0, [&](size_t i) {
      try {
        const auto s = random_strategy(0x09AC1E, i);
        double w = 0;
        for (int q = 0; q < 6; ++q) {
          const auto quantity = static_cast<EntropyQuantity>(q);
          w = std::max(w, std::fabs(entropy(quantity, s, uni) - brute_force_entropy(quantity, s, uni)));
        }
        worst[i] = w;
      } catch (const std::exception&) {
        failed[i] = 1;
      }
    });
    double dev = 0;
    int bad = 0;
    for (uint32_t i = 0; i < count; ++i) {
      dev = std::max(dev, worst[i]);
      bad += failed[i];
    }
    const double elapsed = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "(max |closed form - brute force| = %.3e on %u strategies x 6, %.1f s)", dev,
                  count, elapsed);
    report(5, "entropy formulas agree with the ensemble brute force within 1e-8",
           bad == 0 && dev <= 1e-8 && elapsed <= 120.0, buf);
  }

  // ---- criterion 6: EAT crossover reproduction
  {
    const auto budget = paper_budget();
    ProtocolSpec rec;
    rec.variant = ProtocolVariant::RecycledInput;
    rec.omega_exp = 0.752;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rec_cross = crossover_n(rec, budget, f_ab_xye);
    const double t_rec = seconds_since(t0);

    ProtocolSpec spot;
    spot.variant = ProtocolVariant::SpotCheck;
    spot.gamma = 3.383e-4;
    spot.omega_exp = 0.752;
    const auto t1 = std::chrono::steady_clock::now();
    const auto spot_cross = crossover_n(spot, budget, f_a_00e);
    const double t_spot = seconds_since(t1);

    const bool pass_rec = rec_cross.found && rec_cross.n >= 40000000ull && rec_cross.n <= 160000000ull &&
                          t_rec <= 120.0;
    const bool pass_spot = spot_cross.found && spot_cross.n >= 45000000000ull &&
                           spot_cross.n <= 180000000000ull && t_spot <= 120.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "(recycled n* = %.3e in %.0f s; spot-check one-sided n* = %.3e in %.0f s)",
                  static_cast<double>(rec_cross.n), t_rec, static_cast<double>(spot_cross.n), t_spot);
    report(6, "crossover rounds land in the published windows", pass_rec && pass_spot, buf);
  }

  // ---- criterion 7: first-order EAT term dominates asymptotically
  {
    const auto budget = paper_budget();
    ProtocolSpec rec;
    rec.variant = ProtocolVariant::RecycledInput;
    rec.omega_exp = 0.752;
    rec.n = 1000000000000ull;
    const auto res = net_expansion(rec, budget, f_ab_xye);
    const double per_round = res.hmin_bound / static_cast<double>(rec.n);
    const double rel = std::fabs(per_round - res.rate_r) / res.rate_r;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "(hmin/n = %.6f vs tangent rate %.6f, rel dev %.2e)", per_round, res.rate_r,
                  rel);
    report(7, "hmin/n at n = 1e12 within 1% of the tangent rate", rel <= 0.01, buf);
  }

  // ---- criterion 8: simulator completeness and the protocol equivalence
  {
    const double omega = 0.80;
    const auto device = HonestDeviceModel::iid(omega);
    const SimConfig sim{0x51CA9, 10000, 0};
    bool pass = true;
    std::string detail = "(";

    ProtocolSpec variants[3];
    variants[0].variant = ProtocolVariant::SpotCheck;
    variants[0].gamma = 0.1;
    variants[0].delta_conf = 0.01;
    variants[1].variant = ProtocolVariant::BiasedLocal;
    variants[1].zeta_a = variants[1].zeta_b = 0.25;
    variants[1].delta_conf = 0.02;
    variants[2].variant = ProtocolVariant::RecycledInput;
    variants[2].delta_conf = 0.005;
    for (auto& p : variants) {
      p.omega_exp = omega;
      p.n = 10000;
      const auto rep = empirical_completeness(p, device, sim);
      const double slack =
          3 * std::sqrt(rep.analytic_bound * (1 - rep.analytic_bound) / rep.trials) + 1.0 / rep.trials;
      if (rep.abort_rate > rep.analytic_bound + slack) pass = false;
      char frag[64];
      std::snprintf(frag, sizeof(frag), "%s %.3f<=%.3f ", protocol_name(p.variant), rep.abort_rate,
                    rep.analytic_bound + slack);
      detail += frag;
    }

    // recycled protocol == biased protocol at zeta = 1/2 on shared streams
    ProtocolSpec p2 = variants[1];
    p2.zeta_a = p2.zeta_b = 0.5;
    p2.delta_conf = 1.2345e-3;
    ProtocolSpec p3 = variants[2];
    p3.delta_conf = 1.2345e-3;
    uint32_t mismatches = 0, aborts = 0;
    for (uint64_t trial = 0; trial < 2000; ++trial) {
      const auto t2 = simulate(p2, device, sim.seed, trial);
      const auto t3 = simulate(p3, device, sim.seed, trial);
      if (t2.aborted != t3.aborted) ++mismatches;
      aborts += t3.aborted ? 1 : 0;
    }
    if (mismatches != 0 || aborts == 0 || aborts == 2000) pass = false;
    char frag[96];
    std::snprintf(frag, sizeof(frag), "; zeta-1/2 equivalence: %u mismatches, %u/2000 aborts)", mismatches,
                  aborts);
    detail += frag;
    report(8, "empirical abort rates below analytic bounds; protocol equivalence", pass, detail);
  }

  // ---- criterion 9: monotone G curves, convex F curves
  {
    struct Named {
      const RateCurve* g;
      const RateCurve* f;
      const char* name;
    };
    const Named all[] = {{&g_ab_00e, &f_ab_00e, "AB_00E"}, {&g_ab_xye, &f_ab_xye, "AB_XYE"},
                         {&g_ab_e, &f_ab_e, "AB_E"},       {&g_a_00e, &f_a_00e, "A_00E"},
                         {&g_a_xye, &f_a_xye, "A_XYE"},    {&g_a_e, &f_a_e, "A_E"}};
    double worst_mono = 0, worst_convex = 0;
    for (const auto& item : all) {
      for (size_t i = 1; i < item.g->points.size(); ++i)
        worst_mono = std::min(worst_mono, item.g->points[i].entropy - item.g->points[i - 1].entropy);
      for (size_t i = 1; i + 1 < item.f->points.size(); ++i) {
        const auto& a = item.f->points[i - 1];
        const auto& b = item.f->points[i];
        const auto& c = item.f->points[i + 1];
        const double s0 = (b.entropy - a.entropy) / (b.omega - a.omega);
        const double s1 = (c.entropy - b.entropy) / (c.omega - b.omega);
        worst_convex = std::min(worst_convex, s1 - s0);
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "(worst G increment %.2e, worst F slope difference %.2e)", worst_mono,
                  worst_convex);
    report(9, "G curves nondecreasing and F curves convex for all six quantities",
           worst_mono >= -1e-6 && worst_convex >= -1e-7, buf);
  }

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
