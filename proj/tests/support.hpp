#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bridgelab/grid.hpp"

namespace testing_support {

template <class T>
double max_abs_diff(const bridgelab::Field<T>& a, const bridgelab::Field<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <class T>
double max_abs_diff_masked(const bridgelab::Field<T>& a, const bridgelab::Field<T>& b, const std::vector<bool>& mask) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (mask[i]) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Spread of a - b over the masked points (difference up to an additive constant).
inline double spread_of_difference(const bridgelab::RealField& a, const bridgelab::RealField& b,
                                   const std::vector<bool>& mask) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (mask[i]) {
      lo = std::min(lo, a[i] - b[i]);
      hi = std::max(hi, a[i] - b[i]);
    }
  return hi - lo;
}

}  // namespace testing_support
