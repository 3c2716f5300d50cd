#include "verify_oracle.hpp"

#include <cmath>

#include "rng.hpp"
#include "sym_eigen.hpp"

namespace direx {

namespace {

// The oracle re-derives the ensemble from the Schmidt-basis inner products
// on its own rather than calling eve_post_measurement_state, so the two
// entropy paths stay independently maintained.
struct Ensemble {
  // index (x, y, a, b)
  std::array<double, 4> zeta[2][2][2][2];
  double prob[2][2][2][2];
  std::array<double, 4> spectrum;
};

Ensemble build_ensemble(const QubitStrategy& s) {
  Ensemble e{};
  e.spectrum = bell_spectrum(s.state);
  std::array<double, 4> root{};
  for (int i = 0; i < 4; ++i) root[static_cast<size_t>(i)] = std::sqrt(e.spectrum[static_cast<size_t>(i)]);
  const double half = kPi / 2;
  for (int x = 0; x < 2; ++x) {
    const double base_a = x == 0 ? s.angles.alpha0 : s.angles.alpha1;
    for (int y = 0; y < 2; ++y) {
      const double base_b = y == 0 ? s.angles.beta0 : s.angles.beta1;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double al = base_a + a * half;
          const double be = base_b + b * half;
          std::array<double, 4>& z = e.zeta[x][y][a][b];
          z[0] = root[0] * std::cos(be - al) * kInvSqrt2;
          z[1] = root[1] * std::cos(be + al) * kInvSqrt2;
          z[2] = root[2] * std::sin(be + al) * kInvSqrt2;
          z[3] = root[3] * std::sin(be - al) * kInvSqrt2;
          e.prob[x][y][a][b] = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3];
        }
      }
    }
  }
  return e;
}

double matrix_entropy(const Mat4& m) {
  const auto ev = sym4_eigenvalues(m);
  return shannon_entropy(ev.data(), 4);
}

// H(C|E) for the ensemble conditioned on inputs (x, y); C = AB or A.
double conditional_entropy_xy(const Ensemble& e, int x, int y, bool two_sided, double h_e) {
  if (two_sided) {
    double probs[4];
    double middle = 0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double p = e.prob[x][y][a][b];
        probs[2 * a + b] = p;
        if (p <= 1e-300) continue;
        Mat4 m = mat4_zero();
        mat4_add_outer(m, e.zeta[x][y][a][b], 1.0 / p);
        middle += p * matrix_entropy(m);
      }
    }
    return shannon_entropy(probs, 4) + middle - h_e;
  }
  double probs[2];
  double middle = 0;
  for (int a = 0; a < 2; ++a) {
    const double pa = e.prob[x][y][a][0] + e.prob[x][y][a][1];
    probs[a] = pa;
    if (pa <= 1e-300) continue;
    Mat4 m = mat4_zero();
    for (int b = 0; b < 2; ++b) mat4_add_outer(m, e.zeta[x][y][a][b], 1.0 / pa);
    middle += pa * matrix_entropy(m);
  }
  return shannon_entropy(probs, 2) + middle - h_e;
}

}  // namespace

double brute_force_entropy(EntropyQuantity q, const QubitStrategy& s, const InputDistribution& pxy) {
  validate_strategy(s);
  const Ensemble e = build_ensemble(s);

  // H(E) from the averaged adversary state rather than the spectrum directly.
  Mat4 rho_e = mat4_zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) mat4_add_outer(rho_e, e.zeta[0][0][a][b], 1.0);
  const double h_e = matrix_entropy(rho_e);

  switch (q) {
    case EntropyQuantity::AB_00E:
      return conditional_entropy_xy(e, 0, 0, true, h_e);
    case EntropyQuantity::A_00E:
      return conditional_entropy_xy(e, 0, 0, false, h_e);
    case EntropyQuantity::AB_XYE:
    case EntropyQuantity::A_XYE: {
      pxy.validate();
      const bool two = q == EntropyQuantity::AB_XYE;
      double acc = 0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) acc += pxy.at(x, y) * conditional_entropy_xy(e, x, y, two, h_e);
      return acc;
    }
    case EntropyQuantity::AB_E: {
      pxy.validate();
      double probs[4];
      double middle = 0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          double pab = 0;
          Mat4 m = mat4_zero();
          for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
              pab += pxy.at(x, y) * e.prob[x][y][a][b];
              mat4_add_outer(m, e.zeta[x][y][a][b], pxy.at(x, y));
            }
          }
          probs[2 * a + b] = pab;
          if (pab <= 1e-300) continue;
          for (double& v : m) v /= pab;
          middle += pab * matrix_entropy(m);
        }
      }
      return shannon_entropy(probs, 4) + middle - h_e;
    }
    case EntropyQuantity::A_E: {
      pxy.validate();
      double probs[2];
      double middle = 0;
      for (int a = 0; a < 2; ++a) {
        double pa = 0;
        Mat4 m = mat4_zero();
        for (int b = 0; b < 2; ++b) {
          for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
              pa += pxy.at(x, y) * e.prob[x][y][a][b];
              mat4_add_outer(m, e.zeta[x][y][a][b], pxy.at(x, y));
            }
          }
        }
        probs[a] = pa;
        if (pa <= 1e-300) continue;
        for (double& v : m) v /= pa;
        middle += pa * matrix_entropy(m);
      }
      return shannon_entropy(probs, 2) + middle - h_e;
    }
  }
  throw DomainError("unknown entropy quantity");
}

QubitStrategy random_strategy(uint64_t seed, uint64_t index) {
  CounterRng rng(seed, mix64(index) ^ 0xd1ce5bull);
  QubitStrategy s;
  for (int tries = 0; tries < 4096; ++tries) {
    const double r = rng.next_double();
    const double theta = rng.uniform(0.0, kPi / 4);
    if (theta > theta_max(r)) continue;
    s.state.r = r;
    s.state.theta = theta;
    const double lo = -0.25 + r * std::cos(theta) / 2;
    const double hi = 0.25 - r * std::sin(theta) / 2;
    s.state.delta = rng.uniform(lo, hi);
    s.angles.alpha0 = rng.uniform(-kPi / 2, kPi / 2);
    s.angles.alpha1 = rng.uniform(-kPi / 2, kPi / 2);
    s.angles.beta0 = rng.uniform(-kPi / 2, kPi / 2);
    s.angles.beta1 = rng.uniform(-kPi / 2, kPi / 2);
    return s;
  }
  throw NumericError("random_strategy: rejection sampling failed");
}

}  // namespace direx
