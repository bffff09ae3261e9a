#pragma once

#include <algorithm>
#include <cmath>

namespace dmln::testing {

// Cost comparison that treats +inf == +inf as equal (Approx would compute
// inf - inf).
inline bool cost_eq(double a, double b, double tol = 1e-9) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace dmln::testing
