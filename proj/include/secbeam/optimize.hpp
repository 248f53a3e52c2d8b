#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "array_core.hpp"
#include "channel.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "ssop.hpp"
#include "units.hpp"

namespace secbeam {

/// Distance beyond the largest coverage radius.
class out_of_coverage : public domain_error {
public:
  using domain_error::domain_error;
};

struct ZoneThreshold {
  int active_n = 0;
  double d_th = 0.0;  ///< m; for angle-dependent zones the area-equivalent radius
};

/// Annular coverage zones of a parent UCA.  Zone k admits every mode with at
/// least min_active_n[k] elements.
struct CoverageZones {
  int parent_n = 0;
  std::vector<ZoneThreshold> thresholds;  ///< ascending active_n
  double d_max = 0.0;
  std::vector<double> outer_radius;  ///< per zone
  std::vector<int> min_active_n;     ///< per zone
  std::vector<double> zone_areas;
  std::vector<double> zone_probs;

  int zone_count() const { return static_cast<int>(zone_areas.size()); }

  /// 1-based zone of a distance; a boundary distance belongs to the inner zone.
  int zone_of(double distance) const {
    if (distance < 0.0 || !std::isfinite(distance)) throw domain_error("distance must be non-negative");
    if (distance > d_max * (1.0 + 1e-12)) throw out_of_coverage("distance beyond the coverage radius");
    for (int k = 0; k < zone_count(); ++k)
      if (distance <= outer_radius[static_cast<std::size_t>(k)] * (1.0 + 1e-12)) return k + 1;
    return zone_count();
  }

  bool admits(int zone, int active_n) const { return active_n >= min_active_n.at(static_cast<std::size_t>(zone - 1)); }
};

/// Active element counts a parent UCA can realize (divisors >= 2), ascending.
inline std::vector<int> active_counts(int parent_n) {
  std::vector<int> out;
  for (int d = 2; d <= parent_n; ++d)
    if (parent_n % d == 0) out.push_back(d);
  return out;
}

/// Coverage threshold [c1' Pt (K N + 1)/(K + 1)]^(1/beta) with the peak power
/// gain N scaled by gain_factor (f^2 under mutual coupling).
inline double coverage_threshold(const SystemParams& p, double pt, int n_active, double gain_factor = 1.0) {
  const RicianK k = p.rician_k;
  const double g2 = n_active * gain_factor;
  const double mean_gain = k.is_infinite() ? g2 : (k.value() * g2 + 1.0) / (k.value() + 1.0);
  return std::pow(p.c1_coverage() * pt * mean_gain, 1.0 / p.beta);
}

namespace detail {

/// Builds zones from the areas enclosed by each threshold contour and by the
/// d_max contour.  Zones of zero area are dropped.
inline CoverageZones assemble_zones(int parent_n, const std::vector<int>& counts, const std::vector<double>& enclosed,
                                    double enclosed_max, std::vector<ZoneThreshold> thresholds, double d_max) {
  CoverageZones z;
  z.parent_n = parent_n;
  z.thresholds = std::move(thresholds);
  z.d_max = d_max;
  const std::size_t nz = counts.size();
  double inner = 0.0;
  for (std::size_t k = 0; k < nz; ++k) {
    const double outer = (k + 1 < nz) ? std::max(enclosed[k], inner) : std::max(enclosed_max, inner);
    const double area = outer - inner;
    if (area > 1e-12 * enclosed_max) {
      z.zone_areas.push_back(area);
      z.min_active_n.push_back(counts[k]);
      z.outer_radius.push_back(std::sqrt(outer / pi));
    }
    inner = outer;
  }
  if (z.zone_areas.empty()) throw infeasible_error("coverage area is empty");
  z.outer_radius.back() = d_max;
  double total = 0.0;
  for (double a : z.zone_areas) total += a;
  for (double a : z.zone_areas) z.zone_probs.push_back(a / total);
  return z;
}

}  // namespace detail

/// Coverage zones for the ideal (uncoupled) array.
inline CoverageZones coverage_zones(const SystemParams& p, int parent_n) {
  p.validate();
  if (parent_n < 2) throw config_error("parent array needs at least 2 elements");
  const auto counts = active_counts(parent_n);
  std::vector<ZoneThreshold> th;
  std::vector<double> enclosed;
  for (int n : counts) {
    const double d = coverage_threshold(p, p.pt, n);
    th.push_back({n, d});
    enclosed.push_back(pi * d * d);
  }
  const double d_max = coverage_threshold(p, p.pt_max, parent_n);
  return detail::assemble_zones(parent_n, counts, enclosed, pi * d_max * d_max, std::move(th), d_max);
}

/// Uniform radius grid r1, r1 + step, ... <= r2.
inline std::vector<double> radius_grid(double r1, double r2, double step) {
  if (!(r2 > r1) || !(step > 0.0) || !(r1 > 0.0)) throw config_error("empty radius grid");
  std::vector<double> out;
  const int count = inclusive_sample_count(r1, r2, step);
  for (int i = 0; i < count; ++i) out.push_back(r1 + i * step);
  return out;
}

/// Objective curve over a radius grid and its first minimum.
struct RadiusSearch {
  std::vector<double> radii;
  std::vector<double> objective;
  std::size_t index = 0;
  double r_opt = 0.0;
  double objective_min = 0.0;
};

namespace detail {

inline RadiusSearch first_minimum(std::vector<double> radii, std::vector<double> objective) {
  RadiusSearch s;
  s.radii = std::move(radii);
  s.objective = std::move(objective);
  for (std::size_t i = 1; i < s.objective.size(); ++i)
    if (s.objective[s.index] > s.objective[i]) s.index = i;
  s.r_opt = s.radii[s.index];
  s.objective_min = s.objective[s.index];
  return s;
}

/// Reduces a UCA DoE angle into [0, pi/n] using rotational and mirror symmetry.
inline double reduce_uca_doe(int n, double doe) {
  const double period = two_pi / n;
  double a = std::fmod(wrap_two_pi(doe), period);
  if (a < 0.0) a += period;
  if (a > period - 1e-12) a = 0.0;
  if (a > period / 2.0) a = period - a;
  return a;
}

}  // namespace detail

/// Grid argmin of the theta_B-averaged SSOP of the full UCA over radius.
inline RadiusSearch optimize_radius(int parent_n, const SystemParams& p, double r1, double r2, double r_step,
                                    const IntegrationGrid& grid, double thetab_step = deg_to_rad(0.5)) {
  p.validate();
  grid.validate();
  auto radii = radius_grid(r1, r2, r_step);
  auto obj = parallel_map(radii.size(), [&](std::size_t i) { return avg_ssop(Uca{parent_n, radii[i]}, p, grid, thetab_step); });
  return detail::first_minimum(std::move(radii), std::move(obj));
}

/// SSOP of every mode at every theta_B: result[mode][theta].
inline std::vector<std::vector<double>> mode_ssop_matrix(const std::vector<ArrayMode>& modes, double radius,
                                                         const std::vector<double>& thetas, const SystemParams& p,
                                                         const IntegrationGrid& grid) {
  using key_t = std::pair<int, long long>;
  std::map<key_t, std::size_t> slot;
  std::vector<std::pair<int, double>> jobs;
  std::vector<std::vector<std::size_t>> where(modes.size(), std::vector<std::size_t>(thetas.size()));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (std::size_t t = 0; t < thetas.size(); ++t) {
      const int n = modes[m].active_n;
      const double doe = detail::reduce_uca_doe(n, mode_doe_angle(modes[m], thetas[t]));
      const key_t key{n, std::llround(doe * 1e9)};
      auto [it, fresh] = slot.emplace(key, jobs.size());
      if (fresh) jobs.emplace_back(n, doe);
      where[m][t] = it->second;
    }
  }
  const auto vals = parallel_map(jobs.size(), [&](std::size_t j) {
    return ssop_from_gains(gain_magnitudes(Uca{jobs[j].first, radius}, jobs[j].second, grid.theta_count()), p, grid);
  });
  std::vector<std::vector<double>> out(modes.size(), std::vector<double>(thetas.size()));
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (std::size_t t = 0; t < thetas.size(); ++t) out[m][t] = vals[where[m][t]];
  return out;
}

/// SSOP of one array mode toward bob_angle.
inline double mode_ssop(const ArrayMode& mode, double radius, double bob_angle, const SystemParams& p,
                        const IntegrationGrid& grid) {
  p.validate();
  grid.validate();
  return ssop_exact(mode_geometry(mode, radius), mode_doe_angle(mode, bob_angle), p, grid);
}

/// Grid argmin over radius of sum_k q_k * mean_theta min over zone-k modes.
inline RadiusSearch optimize_radius_zoned(int parent_n, const SystemParams& p, double r1, double r2, double r_step,
                                          const IntegrationGrid& grid, double thetab_step = deg_to_rad(0.5)) {
  p.validate();
  grid.validate();
  const auto zones = coverage_zones(p, parent_n);
  const auto modes = enumerate_array_modes(parent_n);
  const AngleInterval iv{0.0, pi / parent_n, true};
  const auto thetas = thetab_samples(iv, thetab_step);
  const auto weights = thetab_weights(iv, thetas.size(), thetab_step);
  auto radii = radius_grid(r1, r2, r_step);
  auto obj = parallel_map(radii.size(), [&](std::size_t i) {
    const auto P = mode_ssop_matrix(modes, radii[i], thetas, p, grid);
    double total = 0.0;
    for (int k = 1; k <= zones.zone_count(); ++k) {
      double mean = 0.0;
      for (std::size_t t = 0; t < thetas.size(); ++t) {
        double best = 2.0;
        for (std::size_t m = 0; m < modes.size(); ++m)
          if (zones.admits(k, modes[m].active_n)) best = std::min(best, P[m][t]);
        mean += weights[t] * best;
      }
      total += zones.zone_probs[static_cast<std::size_t>(k - 1)] * mean;
    }
    return total;
  });
  return detail::first_minimum(std::move(radii), std::move(obj));
}

/// Optimal mode per theta_B interval over [0, pi/2] for one zone.
struct LookupTable {
  int zone_index = 1;
  int parent_n = 0;
  double resolution = deg_to_rad(0.5);
  std::vector<double> breakpoints;      ///< ascending, from 0 to pi/2; intervals = size - 1
  std::vector<int> mode_per_interval;   ///< 1-based mode index
  std::vector<double> sample_angles;    ///< theta_B samples the table was built from
  std::vector<int> sample_modes;        ///< selection at each sample

  std::size_t interval_count() const { return mode_per_interval.size(); }

  /// Mode index for an angle in [0, pi/2]; a shared breakpoint belongs to the lower interval.
  int mode_at(double angle) const {
    if (angle < -1e-12 || angle > pi / 2.0 + 1e-12) throw domain_error("table angle outside [0, pi/2]");
    for (std::size_t i = 0; i < mode_per_interval.size(); ++i)
      if (angle <= breakpoints[i + 1] + 1e-12) return mode_per_interval[i];
    return mode_per_interval.back();
  }
};

namespace detail {

inline LookupTable table_from_selection(int zone, int parent_n, double step, const std::vector<double>& thetas,
                                        const std::vector<int>& sel) {
  LookupTable t;
  t.zone_index = zone;
  t.parent_n = parent_n;
  t.resolution = step;
  t.sample_angles = thetas;
  t.sample_modes = sel;
  t.breakpoints.push_back(0.0);
  for (std::size_t s = 0; s < sel.size(); ++s) {
    if (s == 0 || sel[s] != sel[s - 1]) {
      if (s > 0) t.breakpoints.push_back(0.5 * (thetas[s - 1] + thetas[s]));
      t.mode_per_interval.push_back(sel[s]);
    }
  }
  t.breakpoints.push_back(pi / 2.0);
  return t;
}

}  // namespace detail

/// Per-zone look-up tables of the SSOP-minimizing admissible mode over theta_B in [0, pi/2].
inline std::vector<LookupTable> build_lookup_tables(int parent_n, double radius, const SystemParams& p,
                                                    double thetab_step, const IntegrationGrid& grid) {
  p.validate();
  grid.validate();
  const auto zones = coverage_zones(p, parent_n);
  const auto modes = enumerate_array_modes(parent_n);
  const auto thetas = thetab_samples(AngleInterval{0.0, pi / 2.0, true}, thetab_step);
  const auto P = mode_ssop_matrix(modes, radius, thetas, p, grid);
  std::vector<LookupTable> tables;
  for (int k = 1; k <= zones.zone_count(); ++k) {
    std::vector<int> sel(thetas.size(), 0);
    for (std::size_t t = 0; t < thetas.size(); ++t) {
      int best = -1;
      for (std::size_t m = 0; m < modes.size(); ++m) {
        if (!zones.admits(k, modes[m].active_n)) continue;
        if (best < 0 || P[static_cast<std::size_t>(best)][t] > P[m][t]) best = static_cast<int>(m);
      }
      if (best < 0) throw infeasible_error("no admissible array mode in zone " + std::to_string(k));
      sel[t] = modes[static_cast<std::size_t>(best)].index;
    }
    tables.push_back(detail::table_from_selection(k, parent_n, thetab_step, thetas, sel));
  }
  return tables;
}

namespace detail {

/// Symmetry of the parent polygon that maps bob_angle into [0, pi/2]:
/// phi = (reflect ? -theta : theta) - steps * 2pi/N.
struct PolygonMap {
  bool reflect = false;
  int steps = 0;
  double reduced = 0.0;
};

inline PolygonMap reduce_to_quarter(int parent_n, double bob_angle) {
  const double a = wrap_two_pi(bob_angle);
  const double step = two_pi / parent_n;
  for (int r = 0; r < 2; ++r) {
    const double base = r ? wrap_two_pi(-a) : a;
    for (int m = 0; m < parent_n; ++m) {
      double phi = wrap_two_pi(base - m * step);
      if (phi > two_pi - 1e-12) phi = 0.0;
      if (phi <= pi / 2.0 + 1e-12) return {r == 1, m, std::min(phi, pi / 2.0)};
    }
  }
  return {false, 0, 0.0};
}

/// Mode whose element set is the preimage of `mode` under the polygon map.
inline ArrayMode map_back(const std::vector<ArrayMode>& modes, const ArrayMode& mode, const PolygonMap& t) {
  const int n = mode.parent_n;
  std::vector<int> elems;
  for (int e : mode.active_indices) {
    const int pos = e - 1;  // angular position pos * 2pi/N
    int back = pos + t.steps;
    if (t.reflect) back = -back;
    back = ((back % n) + n) % n;
    elems.push_back(back + 1);
  }
  std::sort(elems.begin(), elems.end());
  for (const auto& m : modes) {
    if (m.active_n != mode.active_n) continue;
    auto sorted = m.active_indices;
    std::sort(sorted.begin(), sorted.end());
    if (sorted == elems) return m;
  }
  throw infeasible_error("symmetry image of the mode is not a uniform sub-array");
}

inline ArrayMode select_in_table(const std::vector<ArrayMode>& modes, const LookupTable& table, double bob_angle) {
  const auto t = reduce_to_quarter(table.parent_n, bob_angle);
  const ArrayMode& m = modes.at(static_cast<std::size_t>(table.mode_at(t.reduced) - 1));
  if (!t.reflect && t.steps == 0) return m;
  return map_back(modes, m, t);
}

}  // namespace detail

/// Mode the AP uses for Bob at (distance, bob_angle).
inline ArrayMode select_mode(const std::vector<LookupTable>& tables, double distance, double bob_angle,
                             const CoverageZones& zones) {
  const int k = zones.zone_of(distance);
  if (tables.size() < static_cast<std::size_t>(k)) throw config_error("missing look-up table for zone " + std::to_string(k));
  const auto modes = enumerate_array_modes(zones.parent_n);
  return detail::select_in_table(modes, tables[static_cast<std::size_t>(k - 1)], bob_angle);
}

/// Relative SSOP improvement of a zone's table over the full array, per theta_B sample.
struct ImprovementCurve {
  std::vector<double> thetas;
  std::vector<double> full_array;  ///< SSOP of M1
  std::vector<double> selected;    ///< SSOP of the table's mode
  /// (p_full - p_sel) / p_full
  std::vector<double> reduction() const {
    std::vector<double> r;
    for (std::size_t i = 0; i < thetas.size(); ++i) r.push_back((full_array[i] - selected[i]) / full_array[i]);
    return r;
  }
  /// (p_full - p_sel) / p_sel
  std::vector<double> excess() const {
    std::vector<double> r;
    for (std::size_t i = 0; i < thetas.size(); ++i) r.push_back((full_array[i] - selected[i]) / selected[i]);
    return r;
  }
};

inline ImprovementCurve lut_improvement(const LookupTable& table, double radius, const SystemParams& p,
                                        const IntegrationGrid& grid) {
  const auto modes = enumerate_array_modes(table.parent_n);
  const auto P = mode_ssop_matrix(modes, radius, table.sample_angles, p, grid);
  ImprovementCurve c;
  c.thetas = table.sample_angles;
  for (std::size_t t = 0; t < c.thetas.size(); ++t) {
    c.full_array.push_back(P[0][t]);
    c.selected.push_back(P[static_cast<std::size_t>(table.sample_modes[t] - 1)][t]);
  }
  return c;
}

/// Distribution of the estimated angle given the true one.
struct ErrorModel {
  enum class kind { none, uniform, gaussian };
  kind type = kind::uniform;
  double sigma = 0.0;  ///< radians, gaussian only

  static ErrorModel none() { return {kind::none, 0.0}; }
  static ErrorModel uniform() { return {kind::uniform, 0.0}; }
  static ErrorModel gaussian(double sigma) { return {kind::gaussian, sigma}; }
};

struct ErrorCost {
  double value = 0.0;
  double std_error = 0.0;
};

/// Expected SSOP increase from choosing the mode with an erroneous angle
/// estimate.  Bob is uniform in area over the coverage disc.  samples == 0
/// integrates on the table's theta_B grid; otherwise Monte Carlo.
inline ErrorCost angle_error_cost(int parent_n, double radius, const SystemParams& p,
                                  const std::vector<LookupTable>& tables, const ErrorModel& model, long samples,
                                  std::uint64_t seed, const IntegrationGrid& grid) {
  p.validate();
  grid.validate();
  if (model.type == ErrorModel::kind::none) return {0.0, 0.0};
  if (model.type == ErrorModel::kind::gaussian && !(model.sigma > 0.0)) throw config_error("gaussian error needs sigma > 0");
  if (tables.empty()) throw config_error("no look-up tables");
  const auto zones = coverage_zones(p, parent_n);
  if (static_cast<int>(tables.size()) < zones.zone_count()) throw config_error("fewer tables than zones");
  const auto modes = enumerate_array_modes(parent_n);
  const double step = tables.front().resolution;
  const int n_theta = periodic_sample_count(step);
  std::vector<double> thetas(static_cast<std::size_t>(n_theta));
  for (int i = 0; i < n_theta; ++i) thetas[static_cast<std::size_t>(i)] = i * two_pi / n_theta;
  const auto P = mode_ssop_matrix(modes, radius, thetas, p, grid);

  // mode chosen in each zone for each estimated angle on the grid
  const int nz = zones.zone_count();
  std::vector<std::vector<std::size_t>> chosen(static_cast<std::size_t>(nz), std::vector<std::size_t>(thetas.size()));
  std::vector<std::vector<double>> best(static_cast<std::size_t>(nz), std::vector<double>(thetas.size()));
  for (int k = 1; k <= nz; ++k) {
    for (std::size_t t = 0; t < thetas.size(); ++t) {
      chosen[static_cast<std::size_t>(k - 1)][t] =
          static_cast<std::size_t>(detail::select_in_table(modes, tables[static_cast<std::size_t>(k - 1)], thetas[t]).index - 1);
      double b = 2.0;
      for (std::size_t m = 0; m < modes.size(); ++m)
        if (zones.admits(k, modes[m].active_n)) b = std::min(b, P[m][t]);
      best[static_cast<std::size_t>(k - 1)][t] = b;
    }
  }
  auto snap = [&](double a) {
    return static_cast<std::size_t>(((std::llround(wrap_two_pi(a) / (two_pi / n_theta)) % n_theta) + n_theta) % n_theta);
  };

  if (samples <= 0) {
    std::vector<double> offsets, weights;
    if (model.type == ErrorModel::kind::uniform) {
      for (int i = 0; i < n_theta; ++i) {
        offsets.push_back(i * two_pi / n_theta);
        weights.push_back(1.0 / n_theta);
      }
    } else {
      const int reach = static_cast<int>(std::ceil(6.0 * model.sigma / (two_pi / n_theta)));
      double wsum = 0.0;
      for (int i = -reach; i <= reach; ++i) {
        const double d = i * two_pi / n_theta;
        offsets.push_back(d);
        weights.push_back(std::exp(-0.5 * d * d / (model.sigma * model.sigma)));
        wsum += weights.back();
      }
      for (auto& w : weights) w /= wsum;
    }
    double total = 0.0;
    for (int k = 1; k <= nz; ++k) {
      const auto& ch = chosen[static_cast<std::size_t>(k - 1)];
      const auto& bs = best[static_cast<std::size_t>(k - 1)];
      double acc = 0.0;
      for (std::size_t t = 0; t < thetas.size(); ++t) {
        double e = 0.0;
        if (model.type == ErrorModel::kind::uniform) {
          // the estimate is independent of the true angle
          for (std::size_t h = 0; h < thetas.size(); ++h) e += weights[h] * P[ch[h]][t];
        } else {
          for (std::size_t o = 0; o < offsets.size(); ++o) e += weights[o] * P[ch[snap(thetas[t] + offsets[o])]][t];
        }
        acc += std::max(0.0, e - bs[t]);
      }
      total += zones.zone_probs[static_cast<std::size_t>(k - 1)] * acc / static_cast<double>(thetas.size());
    }
    return {total, 0.0};
  }

  const std::size_t count = static_cast<std::size_t>(samples);
  const auto vals = parallel_map(count, [&](std::size_t i) {
    counter_stream s(seed, i);
    const double d = zones.d_max * std::sqrt(s.uniform());
    const double theta = two_pi * s.uniform();
    double est = theta;
    if (model.type == ErrorModel::kind::uniform) {
      est = two_pi * s.uniform();
    } else {
      std::normal_distribution<double> nd(0.0, model.sigma);
      est = theta + nd(s);
    }
    const int k = zones.zone_of(d);
    const std::size_t t = snap(theta);
    const std::size_t m = chosen[static_cast<std::size_t>(k - 1)][snap(est)];
    return std::max(0.0, P[m][t] - best[static_cast<std::size_t>(k - 1)][t]);
  });
  double sum = 0.0;
  for (double v : vals) sum += v;
  ErrorCost c;
  c.value = sum / static_cast<double>(count);
  if (count > 1) {
    double ss = 0.0;
    for (double v : vals) ss += (v - c.value) * (v - c.value);
    c.std_error = std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count));
  }
  return c;
}

/// angle_error_cost over a radius grid (tables rebuilt per radius).
inline RadiusSearch error_cost_sweep(int parent_n, const SystemParams& p, double r1, double r2, double r_step,
                                     const ErrorModel& model, double thetab_step, const IntegrationGrid& grid,
                                     long samples = 0, std::uint64_t seed = 1) {
  auto radii = radius_grid(r1, r2, r_step);
  auto obj = parallel_map(radii.size(), [&](std::size_t i) {
    const auto tables = build_lookup_tables(parent_n, radii[i], p, thetab_step, grid);
    return angle_error_cost(parent_n, radii[i], p, tables, model, samples, seed, grid).value;
  });
  return detail::first_minimum(std::move(radii), std::move(obj));
}

enum class tradeoff_scenario { moving_bob, fixed_bob };

/// Sweep description.  fixed_bob sweeps active element counts under
/// Pt N = pt0 n0; moving_bob sweeps Bob's distance with N = n0 fixed under
/// Pt N / d^beta = pt0 n0 / d0^beta.
struct TradeoffSpec {
  tradeoff_scenario scenario = tradeoff_scenario::fixed_bob;
  std::vector<double> values;
  int n0 = 8;
  double pt0 = 1.0;
  double d0 = 1.0;
};

struct TradeoffPoint {
  double sweep_value = 0.0;
  int n_active = 0;
  double pt = 0.0;
  double ssop = 0.0;  ///< theta_B-averaged
  bool feasible = true;
};

inline std::vector<TradeoffPoint> power_element_tradeoff(int parent_n, double radius, const SystemParams& p,
                                                         const TradeoffSpec& spec, const IntegrationGrid& grid,
                                                         double thetab_step = deg_to_rad(0.5)) {
  p.validate();
  grid.validate();
  if (spec.values.empty()) throw config_error("empty trade-off sweep");
  std::vector<TradeoffPoint> pts;
  for (double v : spec.values) {
    TradeoffPoint pt;
    pt.sweep_value = v;
    if (spec.scenario == tradeoff_scenario::fixed_bob) {
      const int n = static_cast<int>(std::lround(v));
      pt.n_active = n;
      pt.feasible = std::abs(v - n) < 1e-9 && n >= 2 && parent_n % n == 0;
      pt.pt = spec.pt0 * spec.n0 / std::max(1, n);
    } else {
      pt.n_active = spec.n0;
      pt.feasible = v > 0.0 && spec.n0 >= 2 && parent_n % spec.n0 == 0;
      pt.pt = spec.pt0 * std::pow(v / spec.d0, p.beta);
    }
    pts.push_back(pt);
  }
  const auto vals = parallel_map(pts.size(), [&](std::size_t i) {
    if (!pts[i].feasible) return 0.0;
    SystemParams q = p;
    q.pt = pts[i].pt;
    q.pt_max = std::max(p.pt_max, q.pt);
    return avg_ssop(Uca{pts[i].n_active, radius}, q, grid, thetab_step);
  });
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].ssop = vals[i];
  return pts;
}

}  // namespace secbeam
