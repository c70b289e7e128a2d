#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

namespace tfkg::testing {

/// Central difference of f with respect to `x`, which is restored afterwards.
inline double central_difference(const std::function<double()>& f, double& x, double step = 1e-5) {
  const double saved = x;
  x = saved + step;
  const double up = f();
  x = saved - step;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * step);
}

/// |a - b| / max(|a|, |b|, floor)
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace tfkg::testing
