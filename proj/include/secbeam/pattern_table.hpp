#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"
#include "units.hpp"

namespace secbeam {

enum class normalization { raw, unit_max, sqrtn_max };

/// Geometry a measured pattern was taken from; decides how a partial span may be extended.
enum class declared_geometry { none, ula, uca };

/// How the stored span was completed to a full circle.
enum class extension_rule { none, periodic, ula_mirror };

inline std::string to_string(normalization n) {
  switch (n) {
    case normalization::raw: return "raw";
    case normalization::unit_max: return "unit_max";
    case normalization::sqrtn_max: return "sqrtn_max";
  }
  return "raw";
}

inline std::string to_string(declared_geometry g) {
  switch (g) {
    case declared_geometry::none: return "none";
    case declared_geometry::ula: return "ula";
    case declared_geometry::uca: return "uca";
  }
  return "none";
}

inline std::string to_string(extension_rule e) {
  switch (e) {
    case extension_rule::none: return "none";
    case extension_rule::periodic: return "periodic";
    case extension_rule::ula_mirror: return "ula_mirror";
  }
  return "none";
}

/// Tabulated gain magnitudes |G(theta, doe)| for a single DoE angle.
struct PatternTable {
  double doe_angle = 0.0;
  std::vector<double> theta;  ///< strictly ascending, radians
  std::vector<double> gains;  ///< |G| >= 0
  normalization norm = normalization::raw;
  int n_elements = 0;  ///< 0 when unknown
  declared_geometry geometry = declared_geometry::none;
  extension_rule extension = extension_rule::none;

  std::size_t size() const noexcept { return theta.size(); }

  double max_gain() const {
    return gains.empty() ? 0.0 : *std::max_element(gains.begin(), gains.end());
  }

  /// Angular span from first to last sample.
  double span() const { return theta.empty() ? 0.0 : theta.back() - theta.front(); }

  /// True when the samples close up around the circle (the wrap gap is no wider
  /// than the widest interior gap).
  bool is_full_circle() const {
    if (theta.size() < 2) return false;
    double widest = 0.0;
    for (std::size_t i = 1; i < theta.size(); ++i) widest = std::max(widest, theta[i] - theta[i - 1]);
    const double wrap_gap = theta.front() + two_pi - theta.back();
    return wrap_gap > -1e-9 && wrap_gap <= widest * (1.0 + 1e-9) + 1e-12;
  }

  /// Linear interpolation of |G|.  Full-circle tables wrap; otherwise theta must
  /// lie inside the stored span (after shifting by multiples of 2pi).
  double gain_at(double angle) const {
    if (theta.empty()) throw domain_error("empty pattern table");
    const double lo = theta.front();
    double a = lo + wrap_two_pi(angle - lo);
    const bool periodic = is_full_circle();
    if (a > theta.back() + 1e-12) {
      if (!periodic) {
        // allow the equivalent angle one turn down if it lands on the span
        if (std::abs(a - two_pi - lo) < 1e-12) a = lo;
        else throw domain_error("angle outside the stored pattern span");
      } else {
        const double t = (a - theta.back()) / (lo + two_pi - theta.back());
        return gains.back() + t * (gains.front() - gains.back());
      }
    }
    auto it = std::upper_bound(theta.begin(), theta.end(), a);
    if (it == theta.begin()) return gains.front();
    if (it == theta.end()) return gains.back();
    const std::size_t j = static_cast<std::size_t>(it - theta.begin());
    const double t = (a - theta[j - 1]) / (theta[j] - theta[j - 1]);
    return gains[j - 1] + t * (gains[j] - gains[j - 1]);
  }

  void validate() const {
    if (theta.size() != gains.size()) throw config_error("pattern grid and gain lengths differ");
    if (theta.size() < 2) throw config_error("pattern needs at least two samples");
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (!std::isfinite(theta[i]) || !std::isfinite(gains[i])) throw config_error("non-finite pattern sample");
      if (gains[i] < 0.0) throw config_error("negative gain in pattern");
      if (i > 0 && !(theta[i] > theta[i - 1])) throw config_error("pattern grid is not strictly ascending");
    }
    if (theta.back() - theta.front() >= two_pi - 1e-12) throw config_error("pattern span exceeds a full turn");
  }
};

/// Rescales gains. sqrtn_max needs n_elements.
inline PatternTable normalize(PatternTable t, normalization target, int n_elements = 0) {
  if (n_elements > 0) t.n_elements = n_elements;
  const double peak = t.max_gain();
  if (target != normalization::raw && peak <= 0.0) throw domain_error("cannot normalize an all-zero pattern");
  double scale = 1.0;
  if (target == normalization::unit_max) {
    scale = 1.0 / peak;
  } else if (target == normalization::sqrtn_max) {
    if (t.n_elements < 1) throw config_error("sqrtn_max normalization needs the element count");
    scale = std::sqrt(static_cast<double>(t.n_elements)) / peak;
  }
  for (auto& g : t.gains) g *= scale;
  t.norm = target;
  return t;
}

/// Joint normalization of a pattern set so the single largest gain becomes sqrt(n).
inline std::vector<PatternTable> normalize_jointly(std::vector<PatternTable> set, int n_elements) {
  double peak = 0.0;
  for (const auto& t : set) peak = std::max(peak, t.max_gain());
  if (peak <= 0.0) throw domain_error("cannot normalize an all-zero pattern set");
  const double scale = std::sqrt(static_cast<double>(n_elements)) / peak;
  for (auto& t : set) {
    for (auto& g : t.gains) g *= scale;
    t.norm = normalization::sqrtn_max;
    t.n_elements = n_elements;
  }
  return set;
}

/// Completes a partial pattern to a full circle.  A full-circle table is kept as is
/// (periodic).  A ULA table spanning at least half a turn is mirrored through
/// theta -> pi - theta.  Anything narrower than half a turn is insufficient.
inline PatternTable extend_to_full_circle(const PatternTable& in) {
  in.validate();
  if (in.is_full_circle()) {
    PatternTable out = in;
    out.extension = extension_rule::periodic;
    return out;
  }
  if (in.span() < pi - 1e-9) throw domain_error("insufficient pattern data: span below 180 degrees");
  if (in.geometry == declared_geometry::uca)
    throw unsupported_operation("partial UCA patterns cannot be extended from a single DoE angle");
  if (in.geometry != declared_geometry::ula)
    throw domain_error("partial pattern without declared geometry cannot be extended");

  std::vector<std::pair<double, double>> pts;
  pts.reserve(2 * in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    pts.emplace_back(wrap_two_pi(in.theta[i]), in.gains[i]);
    pts.emplace_back(wrap_two_pi(pi - in.theta[i]), in.gains[i]);
  }
  std::sort(pts.begin(), pts.end());
  PatternTable out = in;
  out.theta.clear();
  out.gains.clear();
  for (const auto& [a, g] : pts) {
    if (!out.theta.empty() && a - out.theta.back() < 1e-9) continue;
    out.theta.push_back(a);
    out.gains.push_back(g);
  }
  out.extension = extension_rule::ula_mirror;
  if (!out.is_full_circle()) throw domain_error("insufficient pattern data: mirrored span leaves gaps");
  return out;
}

}  // namespace secbeam
