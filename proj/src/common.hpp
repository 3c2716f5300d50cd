#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace direx {

// CHSH score landmarks: classical optimum, quantum optimum, and the lowest
// score reachable by deliberately losing (output relabelling symmetry).
inline constexpr double kClassicalScore = 0.75;
inline constexpr double kQuantumMaxScore = 0.85355339059327376220;  // (1 + 1/sqrt(2))/2
inline constexpr double kQuantumMinScore = 0.14644660940672623780;  // (1 - 1/sqrt(2))/2

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kPi = 3.14159265358979323846;

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct MismatchError : std::runtime_error {
  explicit MismatchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace direx
