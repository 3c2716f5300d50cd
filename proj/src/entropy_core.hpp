#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "common.hpp"

namespace direx {

// Bell-diagonal two-qubit state parameterized by (r, theta, delta):
//   lam0 = 1/4 + r*cos(theta)/2 + delta      lam1 = 1/4 + r*sin(theta)/2 - delta
//   lam2 = 1/4 - r*sin(theta)/2 - delta      lam3 = 1/4 - r*cos(theta)/2 + delta
// Valid region: 0 <= r <= 1, 0 <= theta <= theta_max(r),
// -1/4 + r*cos(theta)/2 <= delta <= 1/4 - r*sin(theta)/2.
struct BellDiagonalParams {
  double r = 0;
  double theta = 0;
  double delta = 0;
};

// Projector angles for the two binary measurements per side. The second
// outcome of each measurement is the angle shifted by pi/2; all angles are
// pi-periodic.
struct MeasurementAngles {
  double alpha0 = 0;
  double alpha1 = 0;
  double beta0 = 0;
  double beta1 = 0;
};

struct QubitStrategy {
  BellDiagonalParams state;
  MeasurementAngles angles;
};

// Distribution over the four input pairs, row-major (x, y).
struct InputDistribution {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};

  static InputDistribution uniform() { return {}; }
  // Product form with P(X=1) = zeta_a, P(Y=1) = zeta_b.
  static InputDistribution product(double zeta_a, double zeta_b);

  double at(int x, int y) const { return p[static_cast<size_t>(2 * x + y)]; }
  double px(int x) const { return p[static_cast<size_t>(2 * x)] + p[static_cast<size_t>(2 * x + 1)]; }
  double py(int y) const { return p[static_cast<size_t>(y)] + p[static_cast<size_t>(2 + y)]; }
  void validate() const;
};

enum class EntropyQuantity { AB_00E = 0, AB_XYE = 1, AB_E = 2, A_00E = 3, A_XYE = 4, A_E = 5 };

const char* quantity_name(EntropyQuantity q);
bool quantity_from_name(const std::string& name, EntropyQuantity* out);
// True for the quantities conditioned on the inputs (00E / XYE), where the
// objective depends on delta only through the spectrum entropy.
bool quantity_is_delta_reducible(EntropyQuantity q);
bool quantity_is_two_sided(EntropyQuantity q);

// Binary entropy in bits; clamps p within 1e-9 of [0,1], hard error beyond.
double hbin(double p);

// Shannon entropy in bits of a nonnegative vector (values below 1e-300 are
// treated as exact zeros).
double shannon_entropy(const double* v, int n);

// Upper end of the valid theta range for a given r.
double theta_max(double r);

// Spectrum maximizer of H(lambda) over delta: r^2 cos(2 theta)/4 clamped
// into the admissible delta interval.
double delta_star(double r, double theta);

void validate_state(const BellDiagonalParams& s);
void validate_strategy(const QubitStrategy& s);

// Eigenvalues (lam0..lam3); entries within 1e-12 below zero are clamped to 0.
std::array<double, 4> bell_spectrum(const BellDiagonalParams& s);

// Correlator table entries (eps00, eps01, eps10, eps11). The winning outcome
// probability of cell (x,y) is 2*eps_xy for (x,y) != (1,1) and 2*eps11 for
// (1,1); in the joint table the (1,1) diagonal cells carry 1/2 - eps11, not
// eps11. That sign flip is applied wherever p_AB marginals are formed.
std::array<double, 4> epsilon_table(const BellDiagonalParams& s, const MeasurementAngles& m);

// CHSH score (eps00+eps01+eps10+eps11)/2; independent of delta.
double chsh_score(const BellDiagonalParams& s, const MeasurementAngles& m);
double chsh_score(const QubitStrategy& s);

struct EvePostState {
  double prob;                  // p_AB|xy(a, b)
  std::array<double, 4> zeta;   // unnormalized vector, |zeta|^2 = prob
};

// Adversary-side post-measurement pure state for outcome (a,b) on inputs
// (x,y), as an unnormalized real 4-vector in the Schmidt basis.
EvePostState eve_post_measurement_state(const QubitStrategy& s, int x, int y, int a, int b);

// Conditional von Neumann entropy of the requested quantity for the given
// strategy, in bits. pxy is ignored for the 00E variants.
double entropy(EntropyQuantity q, const QubitStrategy& s, const InputDistribution& pxy);

// Closed-form minimum curves.
double analytic_a_00e(double omega);  // 1 - hbin((1 + sqrt(16 w(w-1) + 3))/2)
double analytic_g1(double omega);     // 1 + hbin(w) - 2 hbin(1/2 + (2w-1)/sqrt(2))
double analytic_g2(double omega);     // 1 - hbin(1/2 + (2w-1)/sqrt(2))

}  // namespace direx
