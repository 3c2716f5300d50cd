#include "box_minimize.hpp"

#include <algorithm>

namespace direx {

namespace {

void clamp_to_box(std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi) {
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

}  // namespace

BoxResult minimize_box(const BoxObjective& fn, const std::vector<double>& lo, const std::vector<double>& hi,
                       std::vector<double> x0, int max_iters, double tol) {
  const size_t n = x0.size();
  clamp_to_box(x0, lo, hi);

  BoxResult res;
  res.x = x0;

  std::vector<double> g(n), gn(n), d(n), xn(n), s(n), y(n), hg(n);
  std::vector<double> H(n * n, 0.0);
  const auto reset_h = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
  };
  reset_h();

  double f = fn(res.x.data(), g.data());
  if (!std::isfinite(f)) {
    res.value = f;
    return res;
  }

  const auto active_mask = [&](const std::vector<double>& x, const std::vector<double>& grad, uint32_t* mask) {
    *mask = 0;
    for (size_t i = 0; i < n; ++i) {
      const bool at_lo = x[i] <= lo[i] + 1e-14 && grad[i] > 0;
      const bool at_hi = x[i] >= hi[i] - 1e-14 && grad[i] < 0;
      if (at_lo || at_hi) *mask |= (1u << i);
    }
  };

  uint32_t active = 0;
  active_mask(res.x, g, &active);
  int stall = 0;

  for (int iter = 0; iter < max_iters; ++iter) {
    res.iterations = iter + 1;

    // projected gradient, zeroed on binding faces
    double pg_norm = 0;
    for (size_t i = 0; i < n; ++i) {
      const double pg = (active & (1u << i)) ? 0.0 : g[i];
      hg[i] = pg;
      pg_norm = std::max(pg_norm, std::fabs(pg));
    }
    if (pg_norm < 1e-9) {
      res.converged = true;
      break;
    }

    for (size_t i = 0; i < n; ++i) {
      double acc = 0;
      for (size_t j = 0; j < n; ++j) acc += H[i * n + j] * hg[j];
      d[i] = -acc;
    }
    double dir_deriv = 0;
    for (size_t i = 0; i < n; ++i) dir_deriv += d[i] * hg[i];
    if (!(dir_deriv < 0)) {  // not a descent direction; fall back
      for (size_t i = 0; i < n; ++i) d[i] = -hg[i];
      reset_h();
      dir_deriv = -pg_norm * pg_norm;
    }

    double alpha = 1.0;
    double fn_val = f;
    bool accepted = false;
    for (int ls = 0; ls < 48; ++ls) {
      for (size_t i = 0; i < n; ++i) xn[i] = res.x[i] + alpha * d[i];
      clamp_to_box(xn, lo, hi);
      double step_sq = 0, proj_dd = 0;
      for (size_t i = 0; i < n; ++i) {
        const double dx = xn[i] - res.x[i];
        step_sq += dx * dx;
        proj_dd += g[i] * dx;
      }
      if (step_sq == 0) break;
      fn_val = fn(xn.data(), nullptr);
      if (std::isfinite(fn_val) && fn_val <= f + 1e-4 * proj_dd) {
        accepted = true;
        break;
      }
      // plain decrease exit for very small steps (rounding-limited region)
      if (std::isfinite(fn_val) && fn_val < f && std::sqrt(step_sq) < 1e-11) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no further progress possible along descent dirs
      break;
    }

    const double f_prev = f;
    f = fn(xn.data(), gn.data());
    if (!std::isfinite(f)) {
      f = f_prev;
      res.converged = false;
      break;
    }

    for (size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - res.x[i];
      y[i] = gn[i] - g[i];
    }
    res.x = xn;
    g = gn;

    uint32_t new_active = 0;
    active_mask(res.x, g, &new_active);
    if (new_active != active) {
      reset_h();
      active = new_active;
    } else {
      double sy = 0, ss = 0, yy = 0;
      for (size_t i = 0; i < n; ++i) {
        sy += s[i] * y[i];
        ss += s[i] * s[i];
        yy += y[i] * y[i];
      }
      if (sy > 1e-12 * std::sqrt(ss * yy) && sy > 0) {
        // BFGS inverse update
        std::vector<double> hy(n, 0.0);
        for (size_t i = 0; i < n; ++i)
          for (size_t j = 0; j < n; ++j) hy[i] += H[i * n + j] * y[j];
        double yhy = 0;
        for (size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
        const double c1 = (sy + yhy) / (sy * sy);
        for (size_t i = 0; i < n; ++i) {
          for (size_t j = 0; j < n; ++j) {
            H[i * n + j] += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
          }
        }
      }
    }

    if (std::fabs(f_prev - f) < tol * (1.0 + std::fabs(f))) {
      if (++stall >= 2) {
        res.converged = true;
        break;
      }
    } else {
      stall = 0;
    }
  }

  res.value = f;
  return res;
}

}  // namespace direx
