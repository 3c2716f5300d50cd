#include "interpolant.hpp"

#include <algorithm>
#include <cmath>

namespace direx {

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  const size_t n = xs_.size();
  if (n < 2 || ys_.size() != n) throw DomainError("interpolant needs >= 2 points");
  for (size_t i = 1; i < n; ++i)
    if (!(xs_[i] > xs_[i - 1])) throw DomainError("interpolant abscissae must be strictly increasing");

  std::vector<double> sec(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) sec[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);

  slopes_.assign(n, 0.0);
  slopes_[0] = sec[0];
  slopes_[n - 1] = sec[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (sec[i - 1] * sec[i] <= 0) {
      slopes_[i] = 0;
    } else {
      // harmonic mean weighted by interval widths
      const double w1 = 2 * (xs_[i + 1] - xs_[i]) + (xs_[i] - xs_[i - 1]);
      const double w2 = (xs_[i + 1] - xs_[i]) + 2 * (xs_[i] - xs_[i - 1]);
      slopes_[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
    }
  }
  // Fritsch-Carlson limiter keeps the interpolant monotone on each segment.
  for (size_t i = 0; i + 1 < n; ++i) {
    if (sec[i] == 0) {
      slopes_[i] = slopes_[i + 1] = 0;
      continue;
    }
    const double a = slopes_[i] / sec[i];
    const double b = slopes_[i + 1] / sec[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      slopes_[i] = t * a * sec[i];
      slopes_[i + 1] = t * b * sec[i];
    }
  }
}

size_t MonotoneCubic::segment(double x) const {
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  size_t i = static_cast<size_t>(it - xs_.begin());
  if (i == 0) return 0;
  if (i >= xs_.size()) return xs_.size() - 2;
  return i - 1;
}

double MonotoneCubic::eval(double x) const {
  x = std::clamp(x, std::max(xs_.front(), kClassicalScore), std::min(xs_.back(), kQuantumMaxScore));
  const size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * ys_[i] + h10 * h * slopes_[i] + h01 * ys_[i + 1] + h11 * h * slopes_[i + 1];
}

double MonotoneCubic::deriv(double x) const {
  x = std::clamp(x, std::max(xs_.front(), kClassicalScore), std::min(xs_.back(), kQuantumMaxScore));
  const size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double dh00 = (6 * t2 - 6 * t) / h;
  const double dh10 = 3 * t2 - 4 * t + 1;
  const double dh01 = (-6 * t2 + 6 * t) / h;
  const double dh11 = 3 * t2 - 2 * t;
  return dh00 * ys_[i] + dh10 * slopes_[i] + dh01 * ys_[i + 1] + dh11 * slopes_[i + 1];
}

}  // namespace direx
