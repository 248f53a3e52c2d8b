#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "array_core.hpp"
#include "channel.hpp"
#include "error.hpp"
#include "optimize.hpp"
#include "pattern_table.hpp"
#include "ssop.hpp"
#include "units.hpp"

namespace secbeam {

namespace detail {

/// Degree value whose conversion back to radians reproduces `rad` exactly.
inline double exact_degrees(double rad) {
  double d = rad_to_deg(rad);
  if (deg_to_rad(d) == rad) return d;
  double up = d, down = d;
  for (int i = 0; i < 64; ++i) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    if (deg_to_rad(up) == rad) return up;
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    if (deg_to_rad(down) == rad) return down;
  }
  return d;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (...) {
    throw parse_error("invalid number '" + s + "'", line);
  }
  if (trim(s.substr(used)) != "") throw parse_error("invalid number '" + s + "'", line);
  return v;
}

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses a pattern CSV: `# key: value` headers, a `theta_deg,gain` header row,
/// then one sample per row.
inline PatternTable parse_pattern_csv(std::istream& in) {
  PatternTable t;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto colon = s.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = detail::trim(s.substr(1, colon - 1));
      const std::string val = detail::trim(s.substr(colon + 1));
      if (key == "doe_deg") {
        t.doe_angle = deg_to_rad(detail::parse_number(val, lineno));
      } else if (key == "normalization") {
        if (val == "raw") t.norm = normalization::raw;
        else if (val == "unit_max") t.norm = normalization::unit_max;
        else if (val == "sqrtn_max") t.norm = normalization::sqrtn_max;
        else throw parse_error("unknown normalization '" + val + "'", lineno);
      } else if (key == "n_elements") {
        const double n = detail::parse_number(val, lineno);
        if (n < 0 || n != std::floor(n)) throw parse_error("n_elements must be a non-negative integer", lineno);
        t.n_elements = static_cast<int>(n);
      } else if (key == "geometry") {
        if (val == "ula") t.geometry = declared_geometry::ula;
        else if (val == "uca") t.geometry = declared_geometry::uca;
        else if (val == "none") t.geometry = declared_geometry::none;
        else throw parse_error("unknown geometry '" + val + "'", lineno);
      }
      continue;
    }
    if (!header_seen) {
      std::string h = s;
      h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\t'; }), h.end());
      if (h != "theta_deg,gain") throw parse_error("expected header 'theta_deg,gain'", lineno);
      header_seen = true;
      continue;
    }
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
      throw parse_error("expected two columns", lineno);
    const double th = deg_to_rad(detail::parse_number(s.substr(0, comma), lineno));
    const double g = detail::parse_number(s.substr(comma + 1), lineno);
    if (!std::isfinite(th) || !std::isfinite(g)) throw parse_error("non-finite value", lineno);
    if (g < 0.0) throw parse_error("negative gain", lineno);
    if (!t.theta.empty()) {
      if (th == t.theta.back()) throw parse_error("duplicate angle", lineno);
      if (th < t.theta.back()) throw parse_error("angles must be ascending", lineno);
    }
    t.theta.push_back(th);
    t.gains.push_back(g);
  }
  if (!header_seen) throw parse_error("missing 'theta_deg,gain' header");
  try {
    t.validate();
  } catch (const config_error& e) {
    throw parse_error(e.what());
  }
  return t;
}

inline PatternTable load_pattern_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw parse_error("cannot open pattern file " + path);
  return parse_pattern_csv(f);
}

inline void write_pattern_csv(std::ostream& out, const PatternTable& t) {
  out << "# doe_deg: " << detail::fmt17(detail::exact_degrees(t.doe_angle)) << '\n';
  out << "# normalization: " << to_string(t.norm) << '\n';
  out << "# n_elements: " << t.n_elements << '\n';
  out << "# geometry: " << to_string(t.geometry) << '\n';
  out << "# extension: " << to_string(t.extension) << '\n';
  out << "theta_deg,gain\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << detail::fmt17(detail::exact_degrees(t.theta[i])) << ',' << detail::fmt17(t.gains[i]) << '\n';
}

inline void save_pattern_csv(const PatternTable& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw domain_error("cannot write pattern file " + path);
  write_pattern_csv(f, t);
  if (!f) throw domain_error("failed writing pattern file " + path);
}

/// Samples |G| of an array on the given theta grid.
inline PatternTable pattern_from_geometry(const ArrayGeometry& g, double doe_angle, const std::vector<double>& theta) {
  validate(g);
  PatternTable t;
  t.doe_angle = doe_angle;
  t.theta = theta;
  t.n_elements = element_count(g);
  if (std::holds_alternative<Ula>(g)) t.geometry = declared_geometry::ula;
  if (std::holds_alternative<Uca>(g)) t.geometry = declared_geometry::uca;
  for (double th : theta) t.gains.push_back(std::abs(array_factor(g, th, doe_angle)));
  t.validate();
  return t;
}

/// Uniform degree grid from lo_deg up to (and including, when it lands) hi_deg.
inline std::vector<double> degree_grid(double lo_deg, double hi_deg, double step_deg) {
  std::vector<double> out;
  const int n = inclusive_sample_count(lo_deg, hi_deg, step_deg);
  for (int i = 0; i < n; ++i) out.push_back(deg_to_rad(lo_deg + i * step_deg));
  return out;
}

/// Pearson correlation of two patterns over their overlap, b resampled onto a's grid.
inline double pearson_correlation(const PatternTable& a, const PatternTable& b) {
  a.validate();
  b.validate();
  const bool b_full = b.is_full_circle();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double th = b.theta.front() + wrap_two_pi(a.theta[i] - b.theta.front());
    if (!b_full && th > b.theta.back() + 1e-12) continue;
    x.push_back(a.gains[i]);
    y.push_back(b.gain_at(th));
  }
  if (x.size() < 2) throw domain_error("patterns do not overlap");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw domain_error("correlation undefined for a constant pattern");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Maps theta_B to [0, pi/2] by mirror symmetry.
inline double fold_quarter(double theta_b) {
  double x = std::abs(std::remainder(theta_b, two_pi));
  if (x > pi / 2.0) x = pi - x;
  return x;
}

/// Peak-gain attenuation f(theta_B), sampled and optionally fitted by a polynomial
/// in radians on [0, pi/2].
struct AttenuationProfile {
  std::vector<double> theta_b;  ///< sample angles (folded to [0, pi/2]), ascending
  std::vector<double> f;
  std::vector<double> poly;  ///< ascending coefficients; empty when unfitted

  double poly_at(double x) const {
    double v = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) v = v * x + poly[i];
    return v;
  }

  /// f at any theta_B; the fit when present, otherwise linear interpolation.
  double operator()(double angle) const {
    const double x = fold_quarter(angle);
    if (!poly.empty()) return poly_at(x);
    if (theta_b.empty()) throw domain_error("empty attenuation profile");
    if (x <= theta_b.front()) return f.front();
    if (x >= theta_b.back()) return f.back();
    const auto it = std::upper_bound(theta_b.begin(), theta_b.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - theta_b.begin());
    const double t = (x - theta_b[j - 1]) / (theta_b[j] - theta_b[j - 1]);
    return f[j - 1] + t * (f[j] - f[j - 1]);
  }

  static AttenuationProfile constant(double value) {
    AttenuationProfile p;
    p.poly = {value};
    return p;
  }
};

/// Least-squares polynomial fit of the given degree.
inline std::vector<double> fit_polynomial(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  if (x.size() != y.size() || static_cast<int>(x.size()) <= degree) throw domain_error("too few samples for the fit");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(x.size()), degree + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      A(static_cast<Eigen::Index>(i), d) = p;
      p *= x[i];
    }
    b(static_cast<Eigen::Index>(i)) = y[i];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return std::vector<double>(c.data(), c.data() + c.size());
}

/// f(theta_B) = peak gain / sqrt(n) for each pattern.  Sets not already in
/// sqrtn_max normalization are normalized jointly first.
inline AttenuationProfile max_gain_attenuation(std::vector<PatternTable> patterns, int n, bool fit = true) {
  if (patterns.empty()) throw domain_error("empty pattern set");
  if (n < 1) throw config_error("element count must be positive");
  const bool normalized = std::all_of(patterns.begin(), patterns.end(),
                                      [](const PatternTable& t) { return t.norm == normalization::sqrtn_max; });
  if (!normalized) patterns = normalize_jointly(std::move(patterns), n);
  std::vector<std::pair<double, double>> s;
  for (const auto& t : patterns) s.emplace_back(fold_quarter(t.doe_angle), t.max_gain() / std::sqrt(static_cast<double>(n)));
  std::sort(s.begin(), s.end());
  AttenuationProfile p;
  for (const auto& [x, v] : s) {
    if (!p.theta_b.empty() && x - p.theta_b.back() < 1e-12) continue;
    if (!(v > 0.0)) throw domain_error("attenuation must be positive");
    p.theta_b.push_back(x);
    p.f.push_back(v);
  }
  if (fit && p.theta_b.size() >= 7) p.poly = fit_polynomial(p.theta_b, p.f, 6);
  return p;
}

/// Published degree-6 fit for an 8-element half-wavelength ULA.
inline AttenuationProfile published_attenuation_ula() {
  AttenuationProfile p;
  p.poly = {1.0, 0.199, -2.054, 4.855, -6.166, 3.783, -0.8639};
  return p;
}

/// Published degree-6 fit for an 8-element UCA.
inline AttenuationProfile published_attenuation_uca() {
  AttenuationProfile p;
  p.poly = {0.9999, 0.0386, -0.5048, 1.587, -2.058, 1.186, -0.2517};
  return p;
}

/// Pattern with its gains scaled by f(doe).
inline PatternTable apply_attenuation(PatternTable t, const AttenuationProfile& f) {
  const double s = f(t.doe_angle);
  if (!(s > 0.0)) throw domain_error("attenuation must be positive");
  for (auto& g : t.gains) g *= s;
  return t;
}

/// SSOP from a tabulated pattern.  With a compensation profile the transmit power
/// is scaled by 1/f^2(doe).
inline double ssop_from_pattern(const PatternTable& pattern, const SystemParams& p, const IntegrationGrid& grid,
                                const AttenuationProfile* compensation = nullptr) {
  p.validate();
  grid.validate();
  const PatternTable full = extend_to_full_circle(pattern);
  const int n = grid.theta_count();
  std::vector<double> gains(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) gains[static_cast<std::size_t>(i)] = full.gain_at(two_pi * i / n);
  SystemParams q = p;
  if (compensation) {
    const double f = (*compensation)(pattern.doe_angle);
    if (!(f > 0.0)) throw domain_error("attenuation must be positive");
    q.pt = p.pt / (f * f);
    q.pt_max = std::max(p.pt_max, q.pt);
  }
  return ssop_from_gains(gains, q, grid);
}

/// Coverage zones with thresholds that follow the attenuated peak gain
/// N f^2(theta_B).  Reported radii are area-equivalent.
inline CoverageZones zone_areas_angle_dependent(const AttenuationProfile& f, const SystemParams& p, int parent_n,
                                                double theta_step = deg_to_rad(0.25)) {
  p.validate();
  if (parent_n < 2) throw config_error("parent array needs at least 2 elements");
  const int n = periodic_sample_count(theta_step);
  if (n < 3) throw config_error("theta step too coarse");
  const double dtheta = two_pi / n;
  std::vector<double> f2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double v = f(i * dtheta);
    if (!(v > 0.0)) throw domain_error("attenuation must be positive everywhere");
    f2[static_cast<std::size_t>(i)] = v * v;
  }
  auto enclosed = [&](double pt, int count) {
    double s = 0.0;
    for (double g : f2) {
      const double d = coverage_threshold(p, pt, count, g);
      s += d * d;
    }
    return 0.5 * s * dtheta;
  };
  const auto counts = active_counts(parent_n);
  std::vector<ZoneThreshold> th;
  std::vector<double> areas;
  for (int c : counts) {
    areas.push_back(enclosed(p.pt, c));
    th.push_back({c, std::sqrt(areas.back() / pi)});
  }
  const double amax = enclosed(p.pt_max, parent_n);
  return detail::assemble_zones(parent_n, counts, areas, amax, std::move(th), std::sqrt(amax / pi));
}

}  // namespace secbeam
