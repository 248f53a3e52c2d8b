#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "array_core.hpp"
#include "channel.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "units.hpp"

namespace secbeam {

struct PolarPoint {
  double distance = 0.0;
  double angle = 0.0;
};

/// Raised when a PPP sampling disc does not enclose the exposure region.
class escalation_error : public domain_error {
public:
  using domain_error::domain_error;
};

/// Boundary D(theta) = (c0 |h~|^2)^(1/beta).
inline double er_boundary(double /*theta*/, double equiv_power, const SystemParams& p) {
  if (equiv_power < 0.0) throw domain_error("equivalent channel power must be non-negative");
  return std::pow(p.c0() * equiv_power, 1.0 / p.beta);
}

/// Boundary samples and enclosed area of one exposure region.
struct ErRealization {
  std::vector<double> theta;
  std::vector<double> boundary;
  double area = 0.0;
};

/// Exposure region on the periodic grid of step grid_step.  No fading draw
/// means the deterministic (line-of-sight) channel.
inline ErRealization er_realization(const ArrayGeometry& g, double bob_angle, const SystemParams& p,
                                    const std::optional<FadingDraw>& fading, double grid_step) {
  const int n = periodic_sample_count(grid_step);
  if (n < 3) throw config_error("theta step too coarse");
  const double dtheta = two_pi / n;
  const auto gains = gain_magnitudes(g, bob_angle, n);
  const RicianK k = fading ? p.rician_k : RicianK::infinite();
  const FadingDraw draw = fading.value_or(FadingDraw{});
  const double c0 = p.c0();
  const fixed_power area_pow(2.0 / p.beta);
  ErRealization er;
  er.theta.resize(static_cast<std::size_t>(n));
  er.boundary.resize(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double h2 = equiv_channel_power(gains[static_cast<std::size_t>(i)], k, draw);
    er.theta[static_cast<std::size_t>(i)] = i * dtheta;
    er.boundary[static_cast<std::size_t>(i)] = std::pow(c0 * h2, 1.0 / p.beta);
    acc += area_pow(c0 * h2);
  }
  er.area = 0.5 * acc * dtheta;
  return er;
}

inline double er_area(const ArrayGeometry& g, double bob_angle, const SystemParams& p,
                      const std::optional<FadingDraw>& fading, double grid_step) {
  return er_realization(g, bob_angle, p, fading, grid_step).area;
}

/// Homogeneous PPP on the disc of radius max_radius.  required_radius is the
/// largest ER extent; the disc must exceed it.
inline std::vector<PolarPoint> sample_ppp(double density, double max_radius, counter_stream& stream,
                                          double required_radius = 0.0) {
  if (!(max_radius > required_radius)) throw escalation_error("sampling disc does not enclose the exposure region");
  std::poisson_distribution<long> count(density * pi * max_radius * max_radius);
  const long m = count(stream);
  std::vector<PolarPoint> pts;
  pts.reserve(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    const double r = max_radius * std::sqrt(stream.uniform());
    pts.push_back({r, two_pi * stream.uniform()});
  }
  return pts;
}

enum class mc_mode { conditional, simulated };

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline McResult summarize(const std::vector<double>& v, std::uint64_t seed) {
  McResult r;
  r.trials = static_cast<long>(v.size());
  r.seed = seed;
  double sum = 0.0;
  for (double x : v) sum += x;
  r.estimate = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.estimate) * (x - r.estimate);
    r.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return r;
}

}  // namespace detail

/// Monte Carlo SSOP.  Conditional mode averages 1 - exp(-lambda_e A) over fading
/// draws; simulated mode drops PPP eavesdroppers and tests ER membership.
inline McResult mc_ssop(const ArrayGeometry& g, double bob_angle, const SystemParams& p, long trials,
                        std::uint64_t seed, mc_mode mode = mc_mode::conditional,
                        double grid_step = deg_to_rad(0.25)) {
  p.validate();
  validate(g);
  if (trials < 1) throw config_error("need at least one trial");
  const int n = periodic_sample_count(grid_step);
  if (n < 3) throw config_error("theta step too coarse");
  const double dtheta = two_pi / n;
  const auto gains = gain_magnitudes(g, bob_angle, n);
  const double c0 = p.c0();
  const fixed_power area_pow(2.0 / p.beta);
  const RicianK k = p.rician_k;

  auto area_of = [&](const FadingDraw& d) {
    double acc = 0.0;
    for (double gm : gains) acc += area_pow(c0 * equiv_channel_power(gm, k, d));
    return 0.5 * acc * dtheta;
  };

  const std::size_t count = static_cast<std::size_t>(trials);
  constexpr std::size_t chunk = 1024;
  const std::size_t chunks = (count + chunk - 1) / chunk;

  if (mode == mc_mode::conditional) {
    if (k.is_infinite()) {
      const double v = 1.0 - std::exp(-p.eve_density * area_of(FadingDraw{}));
      return McResult{v, 0.0, trials, seed};
    }
    auto parts = parallel_map(chunks, [&](std::size_t c) {
      std::vector<double> out;
      for (std::size_t t = c * chunk; t < std::min(count, (c + 1) * chunk); ++t)
        out.push_back(1.0 - std::exp(-p.eve_density * area_of(sample_fading(seed, t))));
      return out;
    });
    std::vector<double> all;
    all.reserve(count);
    for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
    return detail::summarize(all, seed);
  }

  // Simulated: membership is tested with the exact gain at each point's angle.
  const double inv_beta = 1.0 / p.beta;
  const bool is_measured = std::holds_alternative<Measured>(g);
  auto parts = parallel_map(chunks, [&](std::size_t c) {
    std::vector<double> out;
    for (std::size_t t = c * chunk; t < std::min(count, (c + 1) * chunk); ++t) {
      counter_stream stream(seed, t);
      const FadingDraw d = sample_fading(stream);
      double dmax = 0.0;
      for (double gm : gains) dmax = std::max(dmax, std::pow(c0 * equiv_channel_power(gm, k, d), inv_beta));
      double radius = 1.5 * dmax;
      if (radius <= 0.0) {
        out.push_back(0.0);
        continue;
      }
      std::vector<PolarPoint> pts;
      for (;;) {
        try {
          pts = sample_ppp(p.eve_density, radius, stream, dmax);
          break;
        } catch (const escalation_error&) {
          radius *= 2.0;
        }
      }
      bool exposed = false;
      for (const auto& e : pts) {
        double gm = 0.0;
        if (is_measured) {
          const double pos = e.angle / dtheta;
          const auto i0 = static_cast<std::size_t>(pos) % gains.size();
          const double t = pos - std::floor(pos);
          gm = (1.0 - t) * gains[i0] + t * gains[(i0 + 1) % gains.size()];
        } else {
          gm = std::abs(array_factor(g, e.angle, bob_angle));
        }
        if (e.distance < std::pow(c0 * equiv_channel_power(gm, k, d), inv_beta)) {
          exposed = true;
          break;
        }
      }
      out.push_back(exposed ? 1.0 : 0.0);
    }
    return out;
  });
  std::vector<double> all;
  all.reserve(count);
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return detail::summarize(all, seed);
}

}  // namespace secbeam
