#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entropy_core.hpp"
#include "interpolant.hpp"

namespace direx {

struct OptimizerConfig {
  uint32_t restarts = 10000;   // random restarts per grid point
  uint32_t max_iters = 200;    // local-solver iterations per restart
  double tolerance = 1e-9;     // objective tolerance of the local solver
  uint64_t seed = 0x5eed;
  uint32_t threads = 0;        // 0 = hardware concurrency

  void validate() const;
};

struct CurvePoint {
  double omega = 0;
  double entropy = 0;
  // Linear-envelope points are convex mixtures of strategies and carry no
  // single qubit witness.
  std::optional<QubitStrategy> argmin;
};

struct TangentInfo {
  double omega_star = 0;
  double slope = 0;
};

enum class CurveKind { G = 0, F = 1 };

struct RateCurve {
  EntropyQuantity quantity = EntropyQuantity::AB_00E;
  InputDistribution pxy;
  CurveKind kind = CurveKind::G;
  std::vector<CurvePoint> points;      // strictly increasing in omega
  std::optional<TangentInfo> tangent;  // present on F curves with a linear part
  bool tangent_warning = false;        // multiple tangent roots were found

  void validate() const;
};

// Solves S = 1/2 + R*c(theta, angles) for R. Throws InfeasibleError when the
// angle configuration is degenerate (|c| < 1e-10) or the score is not
// reachable with R in [0, 1].
double solve_r_for_score(double theta, const MeasurementAngles& m, double omega);

struct MinimizeResult {
  CurvePoint point;
  uint32_t restarts_run = 0;
  uint32_t feasible_restarts = 0;
};

// Multi-start constrained minimization of the quantity at fixed CHSH score.
// R is eliminated through the score constraint; delta is eliminated via
// delta_star for the input-conditioned quantities and kept as a free box
// variable for AB_E / A_E. The result is an upper bound on the infimum.
MinimizeResult minimize_entropy_at_score(EntropyQuantity q, double omega, const InputDistribution& pxy,
                                         const OptimizerConfig& cfg,
                                         const std::vector<QubitStrategy>& warm_starts = {});

RateCurve build_g_curve(EntropyQuantity q, const std::vector<double>& grid, const InputDistribution& pxy,
                        const OptimizerConfig& cfg);

// Convex lower bound of a G curve: tangent through (3/4, 0) found by
// bisection on h(w) = G'(w)(w - 3/4) - G(w), followed by a lower-hull pass
// that enforces the convexity invariant on the emitted points.
RateCurve convex_envelope(const RateCurve& g);

// Interpolant over the curve points, anchored at (3/4, 0) when the leftmost
// point sits above the classical score.
MonotoneCubic curve_interpolant(const RateCurve& c);

// Default omega grid: uniform base plus 5e-4-step refinement near 3/4 and
// near the tangent-point band.
std::vector<double> default_grid(uint32_t base_points = 60);

enum class CurveFormat { Csv = 0, Json = 1 };

std::string export_curve(const RateCurve& c, CurveFormat fmt);
RateCurve import_curve(const std::string& text, CurveFormat fmt);
void save_curve(const RateCurve& c, const std::string& path);   // format from extension
RateCurve load_curve(const std::string& path);

}  // namespace direx
