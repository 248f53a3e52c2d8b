#pragma once

#include <cmath>
#include <numbers>

namespace secbeam {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / pi; }

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double angle) noexcept {
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

/// Number of samples of a periodic [0, 2pi) grid with the given step.
/// The step must divide 2pi to within one sample.
inline int periodic_sample_count(double step) {
  return static_cast<int>(std::lround(two_pi / step));
}

/// Inclusive sample count of [lo, hi] at the given step (floor((hi-lo)/step)+1),
/// tolerant to round-off at the upper end.
inline int inclusive_sample_count(double lo, double hi, double step) {
  return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

}  // namespace secbeam

namespace secbeam {

/// x^p for a fixed exponent, with fast paths for the exponents 2/beta takes at
/// integer beta.
class fixed_power {
public:
  explicit fixed_power(double p) : p_(p) {
    if (p == 1.0) kind_ = 1;
    else if (p == 0.5) kind_ = 2;
    else if (std::abs(p - 2.0 / 3.0) < 1e-15) kind_ = 3;
    else if (std::abs(p - 1.0 / 3.0) < 1e-15) kind_ = 4;
  }

  double operator()(double x) const {
    switch (kind_) {
      case 1: return x;
      case 2: return std::sqrt(x);
      case 3: { const double c = std::cbrt(x); return c * c; }
      case 4: return std::cbrt(x);
      default: return std::pow(x, p_);
    }
  }

  double exponent() const { return p_; }

private:
  double p_;
  int kind_ = 0;
};

}  // namespace secbeam
