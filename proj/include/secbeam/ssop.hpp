#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "array_core.hpp"
#include "channel.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "special.hpp"
#include "units.hpp"

namespace secbeam {

/// Sampling of the theta circle and of the truncated Gaussian (x, y) plane.
struct IntegrationGrid {
  double theta_step = deg_to_rad(0.25);
  double q_limit = 3.0;
  double q_step = 0.05;

  static IntegrationGrid from(const SystemParams& p) {
    IntegrationGrid g;
    g.q_limit = p.q_limit;
    return g;
  }

  void validate() const {
    if (!(theta_step > 0.0) || !(q_step > 0.0) || !(q_limit > 0.0)) throw config_error("integration steps must be positive");
    if (theta_count() < 3) throw config_error("theta step too coarse");
    if (q_step > q_limit) throw config_error("q_step larger than q_limit");
    const double mass = std::erf(q_limit) * std::erf(q_limit);
    if (mass < 1.0 - 1e-4) throw config_error("q_limit truncates more than 1e-4 of the Gaussian mass");
  }

  int theta_count() const { return periodic_sample_count(theta_step); }
  int q_count() const { return static_cast<int>(std::floor(2.0 * q_limit / q_step + 1e-9)) + 1; }
};

enum class area_method { quadrature, ula_series, uca_series, mean_uca_series, given };

inline std::string to_string(area_method m) {
  switch (m) {
    case area_method::quadrature: return "quadrature";
    case area_method::ula_series: return "ula_series";
    case area_method::uca_series: return "uca_series";
    case area_method::mean_uca_series: return "mean_uca_series";
    case area_method::given: return "given";
  }
  return "given";
}

/// Angle integral of |G|^2.
struct PatternArea {
  double value = 0.0;
  area_method method = area_method::given;
  int l_max = 0;  ///< series truncation actually used (UCA)
};

/// 1 - exp(-(lambda_e/2) sum (c0 |G|^2)^(2/beta) dtheta) for |G| on a periodic grid.
inline double ssop_deterministic_from_gains(const std::vector<double>& gains, const SystemParams& p) {
  const double dtheta = two_pi / static_cast<double>(gains.size());
  const fixed_power pw(2.0 / p.beta);
  const double c0 = p.c0();
  double s = 0.0;
  for (double g : gains) s += pw(c0 * g * g);
  return 1.0 - std::exp(-0.5 * p.eve_density * s * dtheta);
}

/// Fading-averaged SSOP for |G| on a periodic grid.
inline double ssop_from_gains(const std::vector<double>& gains, const SystemParams& p, const IntegrationGrid& grid) {
  const RicianK k = p.rician_k;
  if (k.is_infinite()) return ssop_deterministic_from_gains(gains, p);
  const double dtheta = two_pi / static_cast<double>(gains.size());
  const double expo = 2.0 / p.beta;
  const fixed_power pw(expo);
  const double a = k.los_weight(), b = k.scatter_weight(), c = k.cross_weight();
  const double scale = 0.5 * p.eve_density * std::pow(p.c0(), expo);
  const int nq = grid.q_count();
  const double dq = grid.q_step;
  const double q0 = -grid.q_limit;
  const bool symmetric = std::abs(q0 + (nq - 1) * dq - grid.q_limit) < 1e-9;
  const bool rayleigh = k.value() == 0.0;
  const bool linear = expo == 1.0;

  double m1 = 0.0, m2 = 0.0;
  if (linear) {
    for (double g : gains) {
      m1 += g;
      m2 += g * g;
    }
    m1 *= dtheta;
    m2 *= dtheta;
  }

  const auto rows = parallel_map(static_cast<std::size_t>(nq), [&](std::size_t mi) {
    const double x = q0 + static_cast<double>(mi) * dq;
    double row = 0.0;
    for (int l = 0; l < nq; ++l) {
      const int mirror = nq - 1 - l;
      if (symmetric && l > mirror) break;
      const double w = (symmetric && l < mirror) ? 2.0 : 1.0;
      const double y = q0 + l * dq;
      const double r2 = x * x + y * y;
      double s2 = 0.0;
      if (rayleigh) {
        s2 = two_pi * pw(r2);
      } else if (linear) {
        s2 = a * m2 + b * r2 * two_pi + c * x * m1;
      } else {
        const double br2 = b * r2, cx = c * x;
        for (double g : gains) {
          const double v = g * (a * g + cx) + br2;
          if (v > 0.0) s2 += pw(v);
        }
        s2 *= dtheta;
      }
      row += w * std::exp(-scale * s2 - r2);
    }
    return row;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return 1.0 - total * dq * dq / pi;
}

/// SSOP averaged over Rician fading.
inline double ssop_exact(const ArrayGeometry& g, double bob_angle, const SystemParams& p, const IntegrationGrid& grid) {
  p.validate();
  grid.validate();
  validate(g);
  return ssop_from_gains(gain_magnitudes(g, bob_angle, grid.theta_count()), p, grid);
}

/// SSOP of the deterministic (K = infinity) channel.
inline double ssop_deterministic(const ArrayGeometry& g, double bob_angle, const SystemParams& p, double theta_step) {
  p.validate();
  validate(g);
  if (!p.rician_k.is_infinite()) throw config_error("deterministic SSOP needs K = inf");
  const int n = periodic_sample_count(theta_step);
  if (n < 3) throw config_error("theta step too coarse");
  return ssop_deterministic_from_gains(gain_magnitudes(g, bob_angle, n), p);
}

/// SSOP of the Rayleigh (K = 0) channel; independent of the array.
inline double ssop_rayleigh(const SystemParams& p, const IntegrationGrid& grid) {
  p.validate();
  grid.validate();
  if (p.rician_k.is_infinite() || p.rician_k.value() != 0.0) throw config_error("Rayleigh SSOP needs K = 0");
  return ssop_from_gains(std::vector<double>(static_cast<std::size_t>(grid.theta_count()), 0.0), p, grid);
}

/// Rectangle-rule integral of |G|^2 over the periodic theta grid.
inline PatternArea pattern_area_quadrature(const ArrayGeometry& g, double bob_angle, double theta_step) {
  validate(g);
  const int n = periodic_sample_count(theta_step);
  if (n < 3) throw config_error("theta step too coarse");
  double s = 0.0;
  for (double v : gain_magnitudes(g, bob_angle, n)) s += v * v;
  return {s * two_pi / n, area_method::quadrature, 0};
}

/// Bessel series of the ULA pattern area.
inline PatternArea pattern_area_ula_series(int n, double spacing, double bob_angle) {
  if (n < 2) throw config_error("ULA needs at least 2 elements");
  const double kd = wavenumber * spacing;
  double s = two_pi;
  for (int m = 1; m < n; ++m)
    s += 2.0 * two_pi * static_cast<double>(n - m) / n * bessel_j(0, kd * m) * std::cos(kd * m * std::sin(bob_angle));
  return {s, area_method::ula_series, 0};
}

/// Bessel series of the UCA pattern area.  l_max <= 0 picks the truncation
/// automatically.
inline PatternArea pattern_area_uca_series(int n, double radius, double bob_angle, int l_max = 0) {
  if (n < 2) throw config_error("UCA needs at least 2 elements");
  const double kr = wavenumber * radius;
  const bool even = n % 2 == 0;
  const int order_step = even ? n : 2 * n;
  int lmax = l_max;
  if (lmax <= 0) {
    lmax = 1;
    while (lmax < 50) {
      const int order = lmax * order_step;
      if (order > 2.0 * kr && std::abs(bessel_j(order, 2.0 * kr)) < 1e-12) break;
      ++lmax;
    }
  }
  double s = two_pi;
  for (int m = 1; m < n; ++m) {
    const double x = kr * 2.0 * std::sin(m * pi / n);
    const double j0 = bessel_j(0, x);
    s += two_pi * j0 * j0;
    double tail = 0.0;
    for (int l = 1; l <= lmax; ++l) {
      const int order = l * order_step;
      double term = bessel_j(order, x) * std::cos(order * bob_angle);
      if (even && (l * m) % 2 == 1) term = -term;
      tail += term;
    }
    s += 2.0 * two_pi * j0 * tail;
  }
  return {s, area_method::uca_series, lmax};
}

/// UCA pattern area averaged uniformly over theta_B.
inline PatternArea mean_pattern_area_uca(int n, double radius) {
  if (n < 2) throw config_error("UCA needs at least 2 elements");
  double s = two_pi;
  for (int m = 1; m < n; ++m) {
    const double j0 = bessel_j(0, 2.0 * wavenumber * radius * std::sin(m * pi / n));
    s += two_pi * j0 * j0;
  }
  return {s, area_method::mean_uca_series, 0};
}

/// Upper bound from moving the fading expectation inside the exponent.
inline double ssop_upper_bound(double pattern_area, const SystemParams& p) {
  if (!(pattern_area > 0.0)) throw domain_error("pattern area must be positive");
  const RicianK k = p.rician_k;
  const double c0 = p.c0();
  const double inner = c0 * k.los_weight() * pattern_area / two_pi + c0 * k.scatter_weight();
  return 1.0 - std::exp(-p.eve_density * pi * std::pow(inner, 2.0 / p.beta));
}

inline double ssop_upper_bound(const PatternArea& a, const SystemParams& p) { return ssop_upper_bound(a.value, p); }

/// Upper bound of the theta_B-averaged SSOP from the mean pattern area.
inline double avg_ssop_upper_bound(const PatternArea& mean_area, const SystemParams& p) {
  return ssop_upper_bound(mean_area.value, p);
}

/// theta_B samples of [lo, hi] (closed) or [lo, hi) (periodic).
inline std::vector<double> thetab_samples(const AngleInterval& iv, double step) {
  if (!(step > 0.0)) throw config_error("theta_B step must be positive");
  std::vector<double> out;
  const int count = iv.closed ? inclusive_sample_count(iv.lo, iv.hi, step)
                              : static_cast<int>(std::ceil((iv.hi - iv.lo) / step - 1e-9));
  for (int i = 0; i < count; ++i) out.push_back(iv.lo + i * step);
  return out;
}

/// Quadrature weights (summing to 1) for samples from thetab_samples.  A closed
/// interval whose last sample lands on hi gets trapezoid weights; otherwise the
/// samples are weighted equally.
inline std::vector<double> thetab_weights(const AngleInterval& iv, std::size_t count, double step) {
  if (count == 0) throw config_error("no theta_B samples");
  std::vector<double> w(count, 1.0);
  const bool ends_on_hi = std::abs(iv.lo + static_cast<double>(count - 1) * step - iv.hi) < 1e-9;
  if (iv.closed && count > 1 && ends_on_hi) w.front() = w.back() = 0.5;
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return w;
}

/// Weighted mean SSOP over the given theta_B samples.
inline double avg_ssop_over(const ArrayGeometry& g, const std::vector<double>& thetas, const std::vector<double>& weights,
                            const SystemParams& p, const IntegrationGrid& grid) {
  p.validate();
  grid.validate();
  validate(g);
  if (thetas.empty()) throw config_error("no theta_B samples");
  if (weights.size() != thetas.size()) throw config_error("one weight per theta_B sample required");
  const auto vals = parallel_map(thetas.size(), [&](std::size_t i) {
    return ssop_from_gains(gain_magnitudes(g, thetas[i], grid.theta_count()), p, grid);
  });
  double s = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) s += weights[i] * vals[i];
  return s;
}

/// Plain mean SSOP over the given theta_B samples.
inline double avg_ssop_over(const ArrayGeometry& g, const std::vector<double>& thetas, const SystemParams& p,
                            const IntegrationGrid& grid) {
  return avg_ssop_over(g, thetas, std::vector<double>(thetas.size(), 1.0 / static_cast<double>(thetas.size())), p, grid);
}

/// SSOP averaged uniformly over the canonical theta_B interval of the geometry.
inline double avg_ssop(const ArrayGeometry& g, const SystemParams& p, const IntegrationGrid& grid,
                       double thetab_step = deg_to_rad(0.5)) {
  if (std::holds_alternative<Measured>(g))
    throw unsupported_operation("a single measured pattern has one DoE angle; average a pattern set instead");
  const AngleInterval iv = canonical_doe_interval(g);
  const auto thetas = thetab_samples(iv, thetab_step);
  return avg_ssop_over(g, thetas, thetab_weights(iv, thetas.size(), thetab_step), p, grid);
}

/// Mean SSOP over a set of measured patterns (one per theta_B).
inline double avg_ssop_measured(const std::vector<PatternTable>& patterns, const SystemParams& p,
                                const IntegrationGrid& grid) {
  p.validate();
  grid.validate();
  if (patterns.empty()) throw config_error("empty pattern set");
  double s = 0.0;
  for (const auto& t : patterns) s += ssop_exact(measured(t), t.doe_angle, p, grid);
  return s / static_cast<double>(patterns.size());
}

/// eta = bound / exact.
inline double tightness_ratio(double bound, double exact) {
  if (!(exact > 0.0)) throw domain_error("tightness ratio undefined for zero SSOP");
  return bound / exact;
}

}  // namespace secbeam
