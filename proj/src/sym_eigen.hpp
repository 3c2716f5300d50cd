#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace direx {

// Dense symmetric 4x4 matrix, row-major. All adversary-side states in the
// reduced strategy family are real symmetric, so this is the only
// eigenproblem the project needs; no complex arithmetic anywhere.
using Mat4 = std::array<double, 16>;

inline Mat4 mat4_zero() { return Mat4{}; }

inline void mat4_add_outer(Mat4& m, const std::array<double, 4>& v, double w) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[static_cast<size_t>(4 * i + j)] += w * v[static_cast<size_t>(i)] * v[static_cast<size_t>(j)];
}

// Cyclic Jacobi. Converges to well below 1e-12 off-diagonal mass in a
// handful of sweeps for 4x4 inputs.
inline std::array<double, 4> sym4_eigenvalues(Mat4 a) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += a[static_cast<size_t>(4 * p + q)] * a[static_cast<size_t>(4 * p + q)];
    if (off < 1e-28) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        const double apq = a[static_cast<size_t>(4 * p + q)];
        if (std::fabs(apq) < 1e-300) continue;
        const double app = a[static_cast<size_t>(4 * p + p)];
        const double aqq = a[static_cast<size_t>(4 * q + q)];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[static_cast<size_t>(4 * k + p)];
          const double akq = a[static_cast<size_t>(4 * k + q)];
          a[static_cast<size_t>(4 * k + p)] = c * akp - s * akq;
          a[static_cast<size_t>(4 * k + q)] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[static_cast<size_t>(4 * p + k)];
          const double aqk = a[static_cast<size_t>(4 * q + k)];
          a[static_cast<size_t>(4 * p + k)] = c * apk - s * aqk;
          a[static_cast<size_t>(4 * q + k)] = s * apk + c * aqk;
        }
      }
    }
  }
  return {a[0], a[5], a[10], a[15]};
}

}  // namespace direx
