#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace secbeam {

/// Rician K-factor with an exact representation of K = infinity.
class RicianK {
public:
  constexpr RicianK() = default;
  constexpr explicit RicianK(double k) : k_(k) {}

  static constexpr RicianK infinite() { return RicianK(std::numeric_limits<double>::infinity()); }

  constexpr bool is_infinite() const { return k_ == std::numeric_limits<double>::infinity(); }
  constexpr double value() const { return k_; }

  /// Weights (a, b, c) of K G^2/(K+1) + r^2/(K+1) + 2 sqrt(K) G x/(K+1).
  double los_weight() const { return is_infinite() ? 1.0 : k_ / (k_ + 1.0); }
  double scatter_weight() const { return is_infinite() ? 0.0 : 1.0 / (k_ + 1.0); }
  double cross_weight() const { return is_infinite() ? 0.0 : 2.0 * std::sqrt(k_) / (k_ + 1.0); }

  /// Accepts a number or "inf".
  static RicianK parse(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return infinite();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (...) {
      throw parse_error("invalid Rician K '" + s + "'");
    }
    if (used != s.size()) throw parse_error("invalid Rician K '" + s + "'");
    return RicianK(v);
  }

  std::string str() const { return is_infinite() ? "inf" : std::to_string(k_); }

private:
  double k_ = 0.0;
};

/// Link-budget and environment constants.  Defaults: Pt/sigma^2 = 40 dB,
/// R_B = 3.4594, R_s = 1, lambda_e = 1e-4 per m^2, 2.4 GHz carrier.
struct SystemParams {
  double pt = 1.0;
  double pt_max = 1.0;
  double noise_var = 1e-4;
  double rate_b = 3.4594;
  double rate_s = 1.0;
  double eve_density = 1e-4;
  double wavelength = 0.125;  ///< m
  double beta = 2.0;
  RicianK rician_k = RicianK::infinite();
  double q_limit = 3.0;

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(pt)) throw config_error("pt must be positive");
    if (!positive(pt_max) || pt > pt_max * (1.0 + 1e-12)) throw config_error("pt must not exceed pt_max");
    if (!positive(noise_var)) throw config_error("noise variance must be positive");
    if (!positive(rate_s) || !(rate_b > rate_s) || !std::isfinite(rate_b)) throw config_error("need rate_b > rate_s > 0");
    if (!positive(eve_density)) throw config_error("eavesdropper density must be positive");
    if (!positive(wavelength)) throw config_error("wavelength must be positive");
    if (!(beta >= 2.0) || !std::isfinite(beta)) throw config_error("path-loss exponent must be >= 2");
    if (!(rician_k.value() >= 0.0)) throw config_error("Rician K must be >= 0");
    if (!positive(q_limit)) throw config_error("q_limit must be positive");
  }

  /// Pt / (sigma^2 (2^(R_B - R_s) - 1)).
  double c0() const { return pt / (noise_var * (std::exp2(rate_b - rate_s) - 1.0)); }
  /// c0 without the transmit power.
  double c1() const { return c0() / pt; }
  /// 1 / (sigma^2 (2^R_B - 1)), the constant of the coverage thresholds.
  double c1_coverage() const { return 1.0 / (noise_var * (std::exp2(rate_b) - 1.0)); }
};

/// Unit complex Gaussian draw g = g_re + j g_im, each part N(0, 1/2).
struct FadingDraw {
  double g_re = 0.0;
  double g_im = 0.0;
};

/// |h~|^2 for gain magnitude |G| under Rician K and fading draw.
inline double equiv_channel_power(double gain_mag, RicianK k, const FadingDraw& draw) {
  if (gain_mag < 0.0) throw domain_error("gain magnitude must be non-negative");
  if (k.is_infinite()) return gain_mag * gain_mag;
  const double kk = k.value();
  const double v = (kk * gain_mag * gain_mag + draw.g_re * draw.g_re + draw.g_im * draw.g_im +
                    2.0 * std::sqrt(kk) * gain_mag * draw.g_re) /
                   (kk + 1.0);
  return v > 0.0 ? v : 0.0;
}

/// log2(1 + Pt |h~|^2 / (sigma^2 d^beta)).
inline double capacity(double distance, double equiv_power, const SystemParams& p) {
  return std::log2(1.0 + p.pt / (p.noise_var * std::pow(distance, p.beta)) * equiv_power);
}

/// E[P_r] = Pt/d^beta (K N + 1)/(K + 1).
inline double mean_bob_power(double pt, double distance, RicianK k, int n_active, double beta) {
  const double path = pt / std::pow(distance, beta);
  if (k.is_infinite()) return path * n_active;
  return path * (k.value() * n_active + 1.0) / (k.value() + 1.0);
}

/// Draws one fading sample from a stream.
inline FadingDraw sample_fading(counter_stream& stream) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  FadingDraw d;
  d.g_re = normal(stream);
  d.g_im = normal(stream);
  return d;
}

/// Fading sample of trial `index` under `seed`.
inline FadingDraw sample_fading(std::uint64_t seed, std::uint64_t index) {
  counter_stream s(seed, index);
  return sample_fading(s);
}

}  // namespace secbeam
