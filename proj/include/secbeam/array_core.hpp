#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "pattern_table.hpp"
#include "units.hpp"

namespace secbeam {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Wavenumber in units of 1/wavelength.
inline constexpr double wavenumber = two_pi;

struct Ula {
  int n_elements = 2;
  double spacing = 0.5;  ///< wavelengths
};

struct Uca {
  int n_elements = 2;
  double radius = 1.0;  ///< wavelengths
};

struct Custom {
  std::vector<std::array<double, 2>> element_positions;  ///< (x, y) in wavelengths
};

/// A measured or externally simulated pattern, usable only at its own DoE angle.
struct Measured {
  std::shared_ptr<const PatternTable> pattern;
  double doe_angle = 0.0;
};

using ArrayGeometry = std::variant<Ula, Uca, Custom, Measured>;

inline Measured measured(PatternTable table) {
  const double doe = table.doe_angle;
  return Measured{std::make_shared<const PatternTable>(std::move(table)), doe};
}

inline void validate(const ArrayGeometry& g) {
  std::visit(
      [](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Ula>) {
          if (a.n_elements < 2) throw config_error("ULA needs at least 2 elements");
          if (!(a.spacing > 0.0) || !std::isfinite(a.spacing)) throw config_error("ULA spacing must be positive");
        } else if constexpr (std::is_same_v<T, Uca>) {
          if (a.n_elements < 2) throw config_error("UCA needs at least 2 elements");
          if (!(a.radius > 0.0) || !std::isfinite(a.radius)) throw config_error("UCA radius must be positive");
        } else if constexpr (std::is_same_v<T, Custom>) {
          const auto& p = a.element_positions;
          if (p.empty()) throw config_error("custom geometry has no elements");
          for (std::size_t i = 0; i < p.size(); ++i) {
            if (!std::isfinite(p[i][0]) || !std::isfinite(p[i][1])) throw config_error("non-finite element position");
            for (std::size_t j = 0; j < i; ++j)
              if (p[i] == p[j]) throw config_error("duplicate element position");
          }
        } else {
          if (!a.pattern) throw config_error("measured geometry without a pattern");
          a.pattern->validate();
        }
      },
      g);
}

/// Number of (active) elements.  Measured patterns report their declared count, or 1.
inline int element_count(const ArrayGeometry& g) {
  return std::visit(
      [](const auto& a) -> int {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Ula> || std::is_same_v<T, Uca>) return a.n_elements;
        else if constexpr (std::is_same_v<T, Custom>) return static_cast<int>(a.element_positions.size());
        else return (a.pattern && a.pattern->n_elements > 0) ? a.pattern->n_elements : 1;
      },
      g);
}

namespace detail {

/// Phase phi_i(angle) of every element.
inline std::vector<double> element_phases(const ArrayGeometry& g, double angle) {
  return std::visit(
      [angle](const auto& a) -> std::vector<double> {
        using T = std::decay_t<decltype(a)>;
        std::vector<double> phi;
        if constexpr (std::is_same_v<T, Ula>) {
          phi.resize(static_cast<std::size_t>(a.n_elements));
          const double s = std::sin(angle);
          for (int i = 0; i < a.n_elements; ++i) phi[static_cast<std::size_t>(i)] = wavenumber * a.spacing * i * s;
        } else if constexpr (std::is_same_v<T, Uca>) {
          phi.resize(static_cast<std::size_t>(a.n_elements));
          for (int i = 0; i < a.n_elements; ++i) {
            const double psi = two_pi * i / a.n_elements;
            phi[static_cast<std::size_t>(i)] = wavenumber * a.radius * std::cos(angle - psi);
          }
        } else if constexpr (std::is_same_v<T, Custom>) {
          const double c = std::cos(angle), s = std::sin(angle);
          for (const auto& p : a.element_positions) phi.push_back(wavenumber * (p[0] * c + p[1] * s));
        } else {
          throw unsupported_operation("steering vectors are undefined for a measured pattern");
        }
        return phi;
      },
      g);
}

inline const Measured& require_doe(const ArrayGeometry& g, double doe_angle) {
  const auto& m = std::get<Measured>(g);
  if (std::abs(std::remainder(doe_angle - m.doe_angle, two_pi)) > 1e-9)
    throw domain_error("measured pattern queried at a DoE angle other than its own");
  return m;
}

}  // namespace detail

/// s(angle): entry i is exp(-j phi_i(angle)).
inline cvec steering_vector(const ArrayGeometry& g, double angle) {
  const auto phi = detail::element_phases(g, angle);
  cvec s(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) s[i] = std::polar(1.0, -phi[i]);
  return s;
}

/// w = s(doe)/sqrt(N).
inline cvec beam_weights(const ArrayGeometry& g, double doe_angle) {
  cvec w = steering_vector(g, doe_angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.size()));
  for (auto& v : w) v *= scale;
  return w;
}

/// w^H s(theta) evaluated as an explicit sum over elements.
inline cplx array_factor_sum(const ArrayGeometry& g, double theta, double doe_angle) {
  const auto a = detail::element_phases(g, theta);
  const auto b = detail::element_phases(g, doe_angle);
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::polar(1.0, b[i] - a[i]);
  return acc / std::sqrt(static_cast<double>(a.size()));
}

/// Closed-form ULA factor; falls back to the sum near the removable 0/0.
inline cplx ula_array_factor_closed(const Ula& u, double theta, double doe_angle) {
  const double psi = wavenumber * u.spacing * (std::sin(theta) - std::sin(doe_angle));
  const double den = std::sin(psi / 2.0);
  if (std::abs(den) < 1e-9) return array_factor_sum(u, theta, doe_angle);
  const int n = u.n_elements;
  const double mag = std::sin(n * psi / 2.0) / den;
  return std::polar(mag / std::sqrt(static_cast<double>(n)), -(n - 1) * psi / 2.0);
}

/// G(theta, doe) = w^H s(theta).  Measured patterns return the interpolated
/// magnitude with zero phase.
inline cplx array_factor(const ArrayGeometry& g, double theta, double doe_angle) {
  if (const auto* u = std::get_if<Ula>(&g)) return ula_array_factor_closed(*u, theta, doe_angle);
  if (std::holds_alternative<Measured>(g)) {
    const auto& m = detail::require_doe(g, doe_angle);
    return {m.pattern->gain_at(theta), 0.0};
  }
  return array_factor_sum(g, theta, doe_angle);
}

/// |G| on the periodic grid theta_i = i * 2pi / n_theta.
inline std::vector<double> gain_magnitudes(const ArrayGeometry& g, double doe_angle, int n_theta) {
  std::vector<double> out(static_cast<std::size_t>(n_theta));
  if (const auto* m = std::get_if<Measured>(&g)) {
    detail::require_doe(g, doe_angle);
    const PatternTable full = extend_to_full_circle(*m->pattern);
    for (int i = 0; i < n_theta; ++i) out[static_cast<std::size_t>(i)] = full.gain_at(two_pi * i / n_theta);
    return out;
  }
  const auto doe_phase = detail::element_phases(g, doe_angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(doe_phase.size()));
  for (int i = 0; i < n_theta; ++i) {
    const auto phi = detail::element_phases(g, two_pi * i / n_theta);
    cplx acc{0.0, 0.0};
    for (std::size_t e = 0; e < phi.size(); ++e) acc += std::polar(1.0, doe_phase[e] - phi[e]);
    out[static_cast<std::size_t>(i)] = std::abs(acc) * scale;
  }
  return out;
}

/// sqrt(N) for the active element count.
inline double max_gain(int n_active) { return std::sqrt(static_cast<double>(n_active)); }
inline double max_gain(const ArrayGeometry& g) { return max_gain(element_count(g)); }

/// Half-power beamwidth.
inline double hpbw(const ArrayGeometry& g, double bob_angle) {
  if (const auto* u = std::get_if<Ula>(&g)) {
    if (bob_angle < -1e-12 || bob_angle > pi / 2.0 + 1e-12) throw domain_error("ULA beamwidth needs theta_B in [0, pi/2]");
    const double arg = std::sin(bob_angle) - 2.782 / (u->n_elements * wavenumber * u->spacing);
    if (arg < -1.0 || arg > 1.0) throw domain_error("beamwidth undefined: mainbeam too broad for the formula");
    return 2.0 * (bob_angle - std::asin(arg));
  }
  if (const auto* c = std::get_if<Uca>(&g)) {
    if (c->n_elements < 4) throw domain_error("UCA beamwidth formula needs at least 4 elements");
    const double arg = 1.1264 / (2.0 * wavenumber * c->radius);
    if (arg > 1.0) throw domain_error("beamwidth undefined: radius too small for the formula");
    return 4.0 * std::asin(arg);
  }
  throw unsupported_operation("beamwidth formula needs a ULA or UCA");
}

/// theta_B that minimizes the ULA beamwidth (half-wavelength spacing only).
inline double hpbw_turning_point(int n, double spacing) {
  if (std::abs(spacing - 0.5) > 1e-12) throw unsupported_operation("turning point is only known for 0.5 wavelength spacing");
  if (n < 2) throw config_error("need at least 2 elements");
  return std::asin(1.391 / (n * pi));
}

/// Half-open/closed angle interval.
struct AngleInterval {
  double lo = 0.0;
  double hi = two_pi;
  bool closed = true;  ///< false for the full periodic circle [0, 2pi)
};

/// Smallest theta_B interval from which all other patterns follow by symmetry.
inline AngleInterval canonical_doe_interval(const ArrayGeometry& g) {
  if (std::holds_alternative<Ula>(g)) return {0.0, pi / 2.0, true};
  if (const auto* c = std::get_if<Uca>(&g)) return {0.0, pi / c->n_elements, true};
  return {0.0, two_pi, false};
}

/// A uniform sub-array of a parent UCA.
struct ArrayMode {
  int parent_n = 0;
  int active_n = 0;
  int family_index = 1;    ///< 1 for the full array, increasing as active_n shrinks
  int rotation_index = 1;  ///< 1-based
  int index = 1;           ///< 1-based position in enumerate_array_modes order
  std::vector<int> active_indices;  ///< 1-based element indices

  std::string name() const {
    if (family_index == 1) return "M1";
    return "M" + std::to_string(family_index) + std::to_string(rotation_index);
  }

  /// Angular rotation of this sub-array relative to the first mode of its family.
  double rotation() const { return (rotation_index - 1) * two_pi / parent_n; }

  bool operator==(const ArrayMode& o) const {
    return parent_n == o.parent_n && active_n == o.active_n && rotation_index == o.rotation_index;
  }
};

/// All uniform sub-arrays with at least two elements, by descending size then rotation.
inline std::vector<ArrayMode> enumerate_array_modes(int parent_n) {
  if (parent_n < 2) throw config_error("parent array needs at least 2 elements");
  std::vector<ArrayMode> modes;
  int family = 0;
  for (int active = parent_n; active >= 2; --active) {
    if (parent_n % active != 0) continue;
    ++family;
    const int step = parent_n / active;
    for (int j = 1; j <= step; ++j) {
      ArrayMode m;
      m.parent_n = parent_n;
      m.active_n = active;
      m.family_index = family;
      m.rotation_index = j;
      m.index = static_cast<int>(modes.size()) + 1;
      for (int e = 0; e < active; ++e) m.active_indices.push_back(j + e * step);
      modes.push_back(std::move(m));
    }
  }
  return modes;
}

/// DoE angle of the base (unrotated) sub-array that reproduces this mode's
/// beam toward bob_angle.  Wrapped to [0, 2pi).
inline double mode_doe_angle(const ArrayMode& mode, double bob_angle) {
  return wrap_two_pi(bob_angle - mode.rotation());
}

/// The base sub-array of a mode as a stand-alone UCA.
inline Uca mode_geometry(const ArrayMode& mode, double radius) { return Uca{mode.active_n, radius}; }

/// Reads `x,y` element positions in wavelengths, one per line, `#` comments allowed.
inline Custom parse_custom_geometry(std::istream& in) {
  Custom c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0.0, y = 0.0;
    std::string rest;
    if (!(ss >> x >> y) || (ss >> rest)) throw parse_error("expected 'x,y' element position", lineno);
    c.element_positions.push_back({x, y});
  }
  validate(c);
  return c;
}

inline Custom load_custom_geometry(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw parse_error("cannot open geometry file " + path);
  return parse_custom_geometry(f);
}

}  // namespace secbeam
