#pragma once

#include <boost/math/special_functions/bessel.hpp>

namespace secbeam {

/// Bessel function of the first kind J_n(x) for integer order n >= 0.
/// Negative arguments follow J_n(-x) = (-1)^n J_n(x).
inline double bessel_j(int order, double x) {
  if (x < 0.0) {
    const double v = boost::math::cyl_bessel_j(order, -x);
    return (order % 2 == 0) ? v : -v;
  }
  return boost::math::cyl_bessel_j(order, x);
}

}  // namespace secbeam
