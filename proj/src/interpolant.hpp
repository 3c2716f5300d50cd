#pragma once

#include <vector>

#include "common.hpp"

namespace direx {

// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes, one-sided at
// the endpoints). Passes through every knot exactly; evaluation clamps the
// argument to [3/4, (1+1/sqrt2)/2] intersected with the knot span edges
// handled by linear end segments.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

  double eval(double x) const;
  double deriv(double x) const;

  double x_min() const { return xs_.front(); }
  double x_max() const { return xs_.back(); }
  bool empty() const { return xs_.empty(); }

 private:
  size_t segment(double x) const;
  std::vector<double> xs_, ys_, slopes_;
};

}  // namespace direx
