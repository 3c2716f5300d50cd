#include "entropy_core.hpp"

#include <algorithm>
#include <cmath>

#include "sym_eigen.hpp"

namespace direx {

namespace {

constexpr double kLog2E = 1.4426950408889634074;  // 1/ln(2)

double log2_safe(double x) { return std::log(x) * kLog2E; }

double require_finite(double v, const char* tag) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite intermediate in ") + tag);
  return v;
}

}  // namespace

InputDistribution InputDistribution::product(double zeta_a, double zeta_b) {
  if (!(zeta_a >= 0.0 && zeta_a <= 1.0 && zeta_b >= 0.0 && zeta_b <= 1.0))
    throw DomainError("product input bias outside [0,1]");
  InputDistribution d;
  const double px1 = zeta_a, py1 = zeta_b;
  d.p = {(1 - px1) * (1 - py1), (1 - px1) * py1, px1 * (1 - py1), px1 * py1};
  return d;
}

void InputDistribution::validate() const {
  double sum = 0;
  for (double v : p) {
    if (!(v >= -1e-12)) throw DomainError("input distribution has negative entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw DomainError("input distribution does not sum to 1");
}

const char* quantity_name(EntropyQuantity q) {
  switch (q) {
    case EntropyQuantity::AB_00E: return "AB_00E";
    case EntropyQuantity::AB_XYE: return "AB_XYE";
    case EntropyQuantity::AB_E: return "AB_E";
    case EntropyQuantity::A_00E: return "A_00E";
    case EntropyQuantity::A_XYE: return "A_XYE";
    case EntropyQuantity::A_E: return "A_E";
  }
  return "?";
}

bool quantity_from_name(const std::string& name, EntropyQuantity* out) {
  for (int i = 0; i < 6; ++i) {
    const auto q = static_cast<EntropyQuantity>(i);
    if (name == quantity_name(q)) {
      *out = q;
      return true;
    }
  }
  return false;
}

bool quantity_is_delta_reducible(EntropyQuantity q) {
  return q != EntropyQuantity::AB_E && q != EntropyQuantity::A_E;
}

bool quantity_is_two_sided(EntropyQuantity q) {
  return q == EntropyQuantity::AB_00E || q == EntropyQuantity::AB_XYE || q == EntropyQuantity::AB_E;
}

double hbin(double p) {
  constexpr double kSlack = 1e-9;
  if (!(p >= -kSlack && p <= 1.0 + kSlack)) throw DomainError("hbin argument outside [0,1]");
  p = std::clamp(p, 0.0, 1.0);
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * log2_safe(p) - (1 - p) * log2_safe(1 - p);
}

double shannon_entropy(const double* v, int n) {
  double h = 0;
  for (int i = 0; i < n; ++i) {
    const double x = v[i];
    if (x > 1e-300) h -= x * log2_safe(x);
  }
  return h;
}

double theta_max(double r) {
  if (r <= kInvSqrt2) return kPi / 4;
  return kPi / 4 - std::acos(std::min(1.0, 1.0 / (r * std::sqrt(2.0))));
}

double delta_star(double r, double theta) {
  const double lo = -0.25 + r * std::cos(theta) / 2;
  const double hi = 0.25 - r * std::sin(theta) / 2;
  return std::clamp(r * r * std::cos(2 * theta) / 4, std::min(lo, hi), std::max(lo, hi));
}

void validate_state(const BellDiagonalParams& s) {
  constexpr double kTol = 1e-9;
  if (!(s.r >= -kTol && s.r <= 1.0 + kTol)) throw DomainError("r outside [0,1]");
  if (!(s.theta >= -kTol && s.theta <= theta_max(std::min(s.r, 1.0)) + kTol))
    throw DomainError("theta outside [0, theta_max(r)]");
  const double lo = -0.25 + s.r * std::cos(s.theta) / 2;
  const double hi = 0.25 - s.r * std::sin(s.theta) / 2;
  if (!(s.delta >= lo - kTol && s.delta <= hi + kTol)) throw DomainError("delta outside admissible interval");
}

void validate_strategy(const QubitStrategy& s) { validate_state(s.state); }

std::array<double, 4> bell_spectrum(const BellDiagonalParams& s) {
  validate_state(s);
  const double c = s.r * std::cos(s.theta) / 2;
  const double q = s.r * std::sin(s.theta) / 2;
  std::array<double, 4> lam = {0.25 + c + s.delta, 0.25 + q - s.delta, 0.25 - q - s.delta, 0.25 - c + s.delta};
  for (double& v : lam) {
    if (v < 0) {
      if (v < -1e-12) throw DomainError("bell spectrum entry below zero");
      v = 0;
    }
  }
  return lam;
}

std::array<double, 4> epsilon_table(const BellDiagonalParams& s, const MeasurementAngles& m) {
  const double rc = s.r * std::cos(s.theta);
  const double rs = s.r * std::sin(s.theta);
  const auto cell = [&](double a, double b, double sign) {
    return 0.25 * (1.0 + sign * (rc * std::cos(2 * (a - b)) + rs * std::cos(2 * (a + b))));
  };
  return {cell(m.alpha0, m.beta0, 1.0), cell(m.alpha0, m.beta1, 1.0), cell(m.alpha1, m.beta0, 1.0),
          cell(m.alpha1, m.beta1, -1.0)};
}

double chsh_score(const BellDiagonalParams& s, const MeasurementAngles& m) {
  const auto eps = epsilon_table(s, m);
  return (eps[0] + eps[1] + eps[2] + eps[3]) / 2;
}

double chsh_score(const QubitStrategy& s) { return chsh_score(s.state, s.angles); }

EvePostState eve_post_measurement_state(const QubitStrategy& s, int x, int y, int a, int b) {
  const auto lam = bell_spectrum(s.state);
  const double alpha = (x == 0 ? s.angles.alpha0 : s.angles.alpha1) + a * (kPi / 2);
  const double beta = (y == 0 ? s.angles.beta0 : s.angles.beta1) + b * (kPi / 2);
  const std::array<double, 4> inner = {std::cos(beta - alpha) * kInvSqrt2, std::cos(beta + alpha) * kInvSqrt2,
                                       std::sin(beta + alpha) * kInvSqrt2, std::sin(beta - alpha) * kInvSqrt2};
  EvePostState out{};
  double prob = 0;
  for (int i = 0; i < 4; ++i) {
    out.zeta[static_cast<size_t>(i)] = std::sqrt(lam[static_cast<size_t>(i)]) * inner[static_cast<size_t>(i)];
    prob += out.zeta[static_cast<size_t>(i)] * out.zeta[static_cast<size_t>(i)];
  }
  out.prob = prob;
  return out;
}

namespace {

double g_of_alpha(const BellDiagonalParams& s, double alpha) {
  const double u = std::max(0.0, 1.0 + std::sin(2 * s.theta) * std::cos(4 * alpha));
  return 0.5 * (1.0 + s.r * std::sqrt(u));
}

std::array<double, 4> zeta_from_roots(const std::array<double, 4>& root_lam, double alpha, double beta) {
  return {root_lam[0] * std::cos(beta - alpha) * kInvSqrt2, root_lam[1] * std::cos(beta + alpha) * kInvSqrt2,
          root_lam[2] * std::sin(beta + alpha) * kInvSqrt2, root_lam[3] * std::sin(beta - alpha) * kInvSqrt2};
}

double angle_of(const MeasurementAngles& m, int x, int side_b, int outcome) {
  const double base = side_b ? (x == 0 ? m.beta0 : m.beta1) : (x == 0 ? m.alpha0 : m.alpha1);
  return base + outcome * (kPi / 2);
}

double entropy_ab_e(const QubitStrategy& s, const InputDistribution& pxy) {
  const auto lam = bell_spectrum(s.state);
  std::array<double, 4> root{};
  for (int i = 0; i < 4; ++i) root[static_cast<size_t>(i)] = std::sqrt(lam[static_cast<size_t>(i)]);
  const auto eps = epsilon_table(s.state, s.angles);
  // H(AB) uses the joint-table marginal; the (1,1) cell contributes 1/2-eps11.
  const double ebar = pxy.at(0, 0) * eps[0] + pxy.at(0, 1) * eps[1] + pxy.at(1, 0) * eps[2] +
                      pxy.at(1, 1) * (0.5 - eps[3]);
  const double h_ab = 1.0 + hbin(std::clamp(2 * ebar, 0.0, 1.0));
  double middle = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Mat4 sigma = mat4_zero();
      double pab = 0;
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          const auto z = zeta_from_roots(root, angle_of(s.angles, x, 0, a), angle_of(s.angles, y, 1, b));
          mat4_add_outer(sigma, z, pxy.at(x, y));
          pab += pxy.at(x, y) * (z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3]);
        }
      }
      if (pab <= 1e-300) continue;
      for (double& v : sigma) v /= pab;
      const auto ev = sym4_eigenvalues(sigma);
      middle += pab * shannon_entropy(ev.data(), 4);
    }
  }
  return h_ab + middle - shannon_entropy(lam.data(), 4);
}

double entropy_a_e(const QubitStrategy& s, const InputDistribution& pxy) {
  const auto lam = bell_spectrum(s.state);
  std::array<double, 4> root{};
  for (int i = 0; i < 4; ++i) root[static_cast<size_t>(i)] = std::sqrt(lam[static_cast<size_t>(i)]);
  double middle = 0;
  for (int a = 0; a < 2; ++a) {
    Mat4 sigma = mat4_zero();
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          const auto z = zeta_from_roots(root, angle_of(s.angles, x, 0, a), angle_of(s.angles, y, 1, b));
          mat4_add_outer(sigma, z, 2 * pxy.at(x, y));
        }
      }
    }
    const auto ev = sym4_eigenvalues(sigma);
    middle += 0.5 * shannon_entropy(ev.data(), 4);
  }
  return 1.0 + middle - shannon_entropy(lam.data(), 4);
}

}  // namespace

double entropy(EntropyQuantity q, const QubitStrategy& s, const InputDistribution& pxy) {
  validate_strategy(s);
  if (!quantity_is_delta_reducible(q) || q == EntropyQuantity::AB_XYE || q == EntropyQuantity::A_XYE)
    pxy.validate();

  double result = 0;
  switch (q) {
    case EntropyQuantity::AB_00E: {
      const auto lam = bell_spectrum(s.state);
      const auto eps = epsilon_table(s.state, s.angles);
      result = 1.0 + hbin(std::clamp(2 * eps[0], 0.0, 1.0)) - shannon_entropy(lam.data(), 4);
      break;
    }
    case EntropyQuantity::AB_XYE: {
      const auto lam = bell_spectrum(s.state);
      const auto eps = epsilon_table(s.state, s.angles);
      double acc = 1.0;
      acc += pxy.at(0, 0) * hbin(std::clamp(2 * eps[0], 0.0, 1.0));
      acc += pxy.at(0, 1) * hbin(std::clamp(2 * eps[1], 0.0, 1.0));
      acc += pxy.at(1, 0) * hbin(std::clamp(2 * eps[2], 0.0, 1.0));
      acc += pxy.at(1, 1) * hbin(std::clamp(2 * eps[3], 0.0, 1.0));
      result = acc - shannon_entropy(lam.data(), 4);
      break;
    }
    case EntropyQuantity::A_00E: {
      const auto lam = bell_spectrum(s.state);
      result = 1.0 + hbin(std::clamp(g_of_alpha(s.state, s.angles.alpha0), 0.0, 1.0)) -
               shannon_entropy(lam.data(), 4);
      break;
    }
    case EntropyQuantity::A_XYE: {
      const auto lam = bell_spectrum(s.state);
      result = 1.0 + pxy.px(0) * hbin(std::clamp(g_of_alpha(s.state, s.angles.alpha0), 0.0, 1.0)) +
               pxy.px(1) * hbin(std::clamp(g_of_alpha(s.state, s.angles.alpha1), 0.0, 1.0)) -
               shannon_entropy(lam.data(), 4);
      break;
    }
    case EntropyQuantity::AB_E:
      result = entropy_ab_e(s, pxy);
      break;
    case EntropyQuantity::A_E:
      result = entropy_a_e(s, pxy);
      break;
  }
  require_finite(result, quantity_name(q));
  if (result < -1e-9) throw NumericError(std::string("negative entropy for ") + quantity_name(q));
  return std::max(result, 0.0);
}

double analytic_a_00e(double omega) {
  if (!(omega >= kClassicalScore - 1e-12 && omega <= kQuantumMaxScore + 1e-12))
    throw DomainError("analytic_a_00e: omega outside [3/4, (1+1/sqrt2)/2]");
  omega = std::clamp(omega, kClassicalScore, kQuantumMaxScore);
  const double u = std::max(0.0, 16 * omega * (omega - 1) + 3);
  return 1.0 - hbin(0.5 * (1.0 + std::sqrt(u)));
}

namespace {

double g_curve_arg(double omega) {
  if (!(omega >= kClassicalScore - 1e-12 && omega <= kQuantumMaxScore + 1e-12))
    throw DomainError("analytic curve: omega outside [3/4, (1+1/sqrt2)/2]");
  omega = std::clamp(omega, kClassicalScore, kQuantumMaxScore);
  return std::min(1.0, 0.5 + (2 * omega - 1) * kInvSqrt2);
}

}  // namespace

double analytic_g1(double omega) { return 1.0 + hbin(std::clamp(omega, 0.0, 1.0)) - 2 * hbin(g_curve_arg(omega)); }

double analytic_g2(double omega) { return 1.0 - hbin(g_curve_arg(omega)); }

}  // namespace direx
