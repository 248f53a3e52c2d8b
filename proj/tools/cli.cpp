#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <secbeam/secbeam.hpp>

#include "emit.hpp"

namespace secbeam::cli {
namespace {

struct options {
  // link budget
  double pt = 1.0;
  std::optional<double> pt_db;
  std::optional<double> pt_max;
  std::optional<double> pt_max_db;
  double noise_var = 1e-4;
  std::optional<double> noise_var_db;
  std::optional<double> snr_db;
  double rate_b = 3.4594;
  double rate_s = 1.0;
  double eve_density = 1e-4;
  double wavelength = 0.125;
  double beta = 2.0;
  std::string k = "inf";
  double q_limit = 3.0;
  double q_step = 0.05;
  double theta_step_deg = 0.25;
  double thetab_step_deg = 0.5;
  std::string length_unit = "wavelengths";

  // geometry
  std::string array = "ula";
  int n = 8;
  double spacing = 0.5;
  double radius = 1.0;
  std::string geometry_file;
  std::string pattern_file;
  std::string declare = "";

  // angles and sweeps
  double theta_b_deg = 0.0;
  std::string sweep = "none";
  std::optional<double> sweep_from;
  std::optional<double> sweep_to;
  std::optional<double> sweep_step;
  double r_min = 0.4;
  double r_max = 2.0;
  std::optional<double> r_step;
  std::optional<double> r_step_cm;

  // method switches
  std::string method = "auto";
  int l_max = 0;
  long trials = 100000;
  unsigned long long seed = 1;
  std::string mc = "conditional";
  std::optional<int> zone;
  double distance = 0.0;
  double theta_deg = 0.0;
  std::string error_model = "uniform";
  double sigma_deg = 5.0;
  long samples = 0;
  std::string scenario = "fixed-bob";
  std::vector<double> values;
  int n0 = 8;
  double pt0 = 1.0;
  double d0 = 1.0;
  std::string normalize = "raw";
  std::string file_a;
  std::string file_b;
  std::vector<std::string> pattern_files;
  std::string profile = "";
  double f_constant = 1.0;
  bool fit = true;
  double step_deg = 5.0;

  // output
  std::string out_path;
  std::string format = "csv";
  std::string config;
};

const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "pt",       "pt_db",          "pt_max",          "pt_max_db",   "noise_var", "noise_var_db", "snr_db",
      "rate_b",   "rate_s",         "eve_density",     "wavelength",  "beta",      "k",            "q_limit",
      "q_step",   "theta_step_deg", "thetab_step_deg", "length_unit", "seed",      "format"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw parse_error("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw parse_error("expected key=value in " + path, lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!config_keys().count(key)) throw parse_error("unknown config key '" + key + "' in " + path, lineno);
    if (val.empty()) throw parse_error("empty value for '" + key + "' in " + path, lineno);
    kv.emplace_back(key, val);
  }
  return kv;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SystemParams make_params(const options& o) {
  SystemParams p;
  p.pt = o.pt_db ? db_to_linear(*o.pt_db) : o.pt;
  p.pt_max = o.pt_max_db ? db_to_linear(*o.pt_max_db) : (o.pt_max ? *o.pt_max : p.pt);
  p.noise_var = o.noise_var_db ? db_to_linear(*o.noise_var_db) : o.noise_var;
  if (o.snr_db) p.noise_var = p.pt / db_to_linear(*o.snr_db);
  p.rate_b = o.rate_b;
  p.rate_s = o.rate_s;
  p.eve_density = o.eve_density;
  p.wavelength = o.wavelength;
  p.beta = o.beta;
  p.rician_k = RicianK::parse(o.k);
  p.q_limit = o.q_limit;
  p.validate();
  return p;
}

IntegrationGrid make_grid(const options& o) {
  IntegrationGrid g;
  g.theta_step = deg_to_rad(o.theta_step_deg);
  g.q_limit = o.q_limit;
  g.q_step = o.q_step;
  g.validate();
  return g;
}

/// Converts a user length to wavelengths.
double to_wavelengths(const options& o, double v) {
  if (o.length_unit == "meters") return v / o.wavelength;
  return v;
}

double r_step_wavelengths(const options& o) {
  if (o.r_step_cm) return *o.r_step_cm * 0.01 / o.wavelength;
  if (o.r_step) return to_wavelengths(o, *o.r_step);
  return 0.01 / o.wavelength;
}

ArrayGeometry make_geometry(const options& o, double radius_override = -1.0) {
  ArrayGeometry g;
  if (o.array == "ula") {
    g = Ula{o.n, to_wavelengths(o, o.spacing)};
  } else if (o.array == "uca") {
    g = Uca{o.n, radius_override > 0.0 ? radius_override : to_wavelengths(o, o.radius)};
  } else if (o.array == "custom") {
    if (o.geometry_file.empty()) throw config_error("--array custom needs --geometry-file");
    Custom c = load_custom_geometry(o.geometry_file);
    if (o.length_unit == "meters")
      for (auto& p : c.element_positions) {
        p[0] /= o.wavelength;
        p[1] /= o.wavelength;
      }
    g = c;
  } else {
    if (o.pattern_file.empty()) throw config_error("--array measured needs --pattern-file");
    PatternTable t = load_pattern_csv(o.pattern_file);
    if (o.declare == "ula") t.geometry = declared_geometry::ula;
    if (o.declare == "uca") t.geometry = declared_geometry::uca;
    g = measured(std::move(t));
  }
  validate(g);
  return g;
}

/// theta_B samples (radians) requested on the command line.
std::vector<double> thetab_list(const options& o, const ArrayGeometry& g) {
  if (const auto* m = std::get_if<Measured>(&g)) return {m->doe_angle};
  if (o.sweep != "theta_b") return {deg_to_rad(o.theta_b_deg)};
  const double from = o.sweep_from.value_or(0.0);
  const double to = o.sweep_to.value_or(90.0);
  const double step = o.sweep_step.value_or(o.thetab_step_deg);
  if (!(step > 0.0) || to < from) throw config_error("invalid theta_B sweep");
  std::vector<double> out;
  for (int i = 0, n = inclusive_sample_count(from, to, step); i < n; ++i) out.push_back(deg_to_rad(from + i * step));
  return out;
}

std::vector<double> radius_list(const options& o) {
  const double from = to_wavelengths(o, o.sweep_from.value_or(o.r_min));
  const double to = to_wavelengths(o, o.sweep_to.value_or(o.r_max));
  const double step = o.sweep_step ? to_wavelengths(o, *o.sweep_step) : r_step_wavelengths(o);
  return radius_grid(from, to, step);
}

/// Evaluates fn(geometry, theta_b) over the requested sweep.
result_table sweep_values(const options& o, const std::function<double(const ArrayGeometry&, double)>& fn) {
  result_table t;
  if (o.sweep == "r") {
    if (o.array != "uca") throw config_error("radius sweeps need --array uca");
    t.columns = {"r_wavelengths", "value"};
    const auto radii = radius_list(o);
    const auto vals = parallel_map(radii.size(), [&](std::size_t i) {
      return fn(make_geometry(o, radii[i]), deg_to_rad(o.theta_b_deg));
    });
    for (std::size_t i = 0; i < radii.size(); ++i) t.add({radii[i], vals[i]});
    return t;
  }
  const ArrayGeometry g = make_geometry(o);
  const auto thetas = thetab_list(o, g);
  t.columns = {"theta_b_deg", "value"};
  const auto vals = parallel_map(thetas.size(), [&](std::size_t i) { return fn(g, thetas[i]); });
  for (std::size_t i = 0; i < thetas.size(); ++i) t.add({rad_to_deg(thetas[i]), vals[i]});
  return t;
}

PatternArea area_for(const options& o, const ArrayGeometry& g, double theta_b, double theta_step) {
  const std::string& m = o.method;
  if (m == "quadrature") return pattern_area_quadrature(g, theta_b, theta_step);
  if (m == "mean") {
    const auto* c = std::get_if<Uca>(&g);
    if (!c) throw unsupported_operation("the mean pattern area is defined for a UCA");
    return mean_pattern_area_uca(c->n_elements, c->radius);
  }
  if (const auto* u = std::get_if<Ula>(&g)) return pattern_area_ula_series(u->n_elements, u->spacing, theta_b);
  if (const auto* c = std::get_if<Uca>(&g)) return pattern_area_uca_series(c->n_elements, c->radius, theta_b, o.l_max);
  if (m == "series") throw unsupported_operation("series pattern areas need a ULA or UCA");
  return pattern_area_quadrature(g, theta_b, theta_step);
}

result_table zones_table(const CoverageZones& z) {
  result_table t;
  t.columns = {"zone", "min_active_n", "outer_radius_m", "area_m2", "probability"};
  for (int k = 0; k < z.zone_count(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    t.add({static_cast<long long>(k + 1), static_cast<long long>(z.min_active_n[i]), z.outer_radius[i], z.zone_areas[i],
           z.zone_probs[i]});
  }
  return t;
}

std::string join_indices(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::optional<AttenuationProfile> profile_from(const options& o) {
  if (o.profile == "published-ula") return published_attenuation_ula();
  if (o.profile == "published-uca") return published_attenuation_uca();
  if (o.profile == "constant") return AttenuationProfile::constant(o.f_constant);
  if (o.profile == "patterns") {
    std::vector<PatternTable> set;
    for (const auto& f : o.pattern_files) set.push_back(load_pattern_csv(f));
    return max_gain_attenuation(std::move(set), o.n, o.fit);
  }
  if (o.profile.empty() || o.profile == "none") return std::nullopt;
  throw config_error("unknown attenuation profile '" + o.profile + "'");
}

struct outcome {
  result_table table;
  std::string summary;
  std::optional<PatternTable> pattern;  ///< emitted in pattern format instead of a table
};

using handler = std::function<outcome(const options&)>;

void add_common(CLI::App* s, options& o) {
  s->add_option("--pt", o.pt, "Transmit power (linear)")->capture_default_str();
  s->add_option("--pt-db", o.pt_db, "Transmit power in dB");
  s->add_option("--pt-max", o.pt_max, "Maximum transmit power (linear, default pt)");
  s->add_option("--pt-max-db", o.pt_max_db, "Maximum transmit power in dB");
  s->add_option("--noise-var", o.noise_var, "Noise variance (linear)")->capture_default_str();
  s->add_option("--noise-var-db", o.noise_var_db, "Noise variance in dB");
  s->add_option("--snr-db", o.snr_db, "Pt/sigma^2 in dB; sets the noise variance");
  s->add_option("--rate-b", o.rate_b, "Codeword rate R_B (bit/s/Hz)")->capture_default_str();
  s->add_option("--rate-s", o.rate_s, "Secrecy rate R_s (bit/s/Hz)")->capture_default_str();
  s->add_option("--eve-density", o.eve_density, "Eavesdropper density (1/m^2)")->capture_default_str();
  s->add_option("--wavelength", o.wavelength, "Carrier wavelength (m)")->capture_default_str();
  s->add_option("--beta", o.beta, "Path-loss exponent")->capture_default_str();
  s->add_option("--k", o.k, "Rician K factor, or inf")->capture_default_str();
  s->add_option("--q-limit", o.q_limit, "Gaussian truncation Q")->capture_default_str();
  s->add_option("--q-step", o.q_step, "Gaussian grid step")->capture_default_str();
  s->add_option("--theta-step-deg", o.theta_step_deg, "Pattern quadrature step (deg)")->capture_default_str();
  s->add_option("--thetab-step-deg", o.thetab_step_deg, "Bob angle step (deg)")->capture_default_str();
  s->add_option("--length-unit", o.length_unit, "Unit of lengths: wavelengths or meters")
      ->check(CLI::IsMember({"wavelengths", "meters"}))
      ->capture_default_str();
  s->add_option("--out", o.out_path, "Output file (default stdout)");
  s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  s->add_option("--config", o.config, "key=value file; command-line flags win");
}

void add_geometry(CLI::App* s, options& o) {
  s->add_option("--array", o.array, "ula, uca, custom or measured")
      ->check(CLI::IsMember({"ula", "uca", "custom", "measured"}))
      ->capture_default_str();
  s->add_option("--n", o.n, "Number of elements")->capture_default_str();
  s->add_option("--spacing", o.spacing, "ULA element spacing")->capture_default_str();
  s->add_option("--radius", o.radius, "UCA radius")->capture_default_str();
  s->add_option("--geometry-file", o.geometry_file, "Custom element positions (x,y per line)");
  s->add_option("--pattern-file", o.pattern_file, "Measured pattern CSV");
  s->add_option("--declare", o.declare, "Geometry a measured pattern comes from (ula, uca)");
}

void add_sweep(CLI::App* s, options& o) {
  s->add_option("--theta-b-deg", o.theta_b_deg, "Bob angle (deg)")->capture_default_str();
  s->add_option("--sweep", o.sweep, "none, theta_b or r")->check(CLI::IsMember({"none", "theta_b", "r"}))->capture_default_str();
  s->add_option("--from", o.sweep_from, "Sweep start (deg or length)");
  s->add_option("--to", o.sweep_to, "Sweep end (deg or length)");
  s->add_option("--step", o.sweep_step, "Sweep step (deg or length)");
}

void add_radius_range(CLI::App* s, options& o) {
  s->add_option("--r-min", o.r_min, "Smallest radius")->capture_default_str();
  s->add_option("--r-max", o.r_max, "Largest radius")->capture_default_str();
  s->add_option("--r-step", o.r_step, "Radius step (length unit)");
  s->add_option("--r-step-cm", o.r_step_cm, "Radius step in centimetres (default 1)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

  options o;
  CLI::App app{"Secrecy outage analysis of exposure-region beamforming", "secbeam"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough(false);

  std::map<std::string, handler> handlers;
  auto sub = [&](const std::string& name, const std::string& desc, handler h) {
    CLI::App* s = app.add_subcommand(name, desc);
    add_common(s, o);
    handlers[name] = std::move(h);
    return s;
  };

  // ssop
  {
    auto* s = sub("ssop", "Fading-averaged SSOP", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      outcome r;
      r.table = sweep_values(o, [&](const ArrayGeometry& geo, double tb) { return ssop_exact(geo, tb, p, g); });
      r.summary = "ssop: " + std::to_string(r.table.rows.size()) + " rows, first value " + cell_text(r.table.rows.front()[1]);
      return r;
    });
    add_geometry(s, o);
    add_sweep(s, o);
  }
  // bound
  {
    auto* s = sub("bound", "Upper bound of the SSOP", [](const options& o) {
      const auto p = make_params(o);
      const double step = deg_to_rad(o.theta_step_deg);
      outcome r;
      r.table = sweep_values(o, [&](const ArrayGeometry& geo, double tb) { return ssop_upper_bound(area_for(o, geo, tb, step), p); });
      r.summary = "bound: " + std::to_string(r.table.rows.size()) + " rows, first value " + cell_text(r.table.rows.front()[1]);
      return r;
    });
    add_geometry(s, o);
    add_sweep(s, o);
    s->add_option("--method", o.method, "Pattern area: auto, series, quadrature or mean")
        ->check(CLI::IsMember({"auto", "series", "quadrature", "mean"}));
    s->add_option("--l-max", o.l_max, "UCA series truncation (0 = automatic)");
  }
  // eta
  {
    auto* s = sub("eta", "Tightness ratio bound/exact", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      outcome r;
      r.table = sweep_values(o, [&](const ArrayGeometry& geo, double tb) {
        return tightness_ratio(ssop_upper_bound(area_for(o, geo, tb, g.theta_step), p), ssop_exact(geo, tb, p, g));
      });
      r.summary = "eta: " + std::to_string(r.table.rows.size()) + " rows, first value " + cell_text(r.table.rows.front()[1]);
      return r;
    });
    add_geometry(s, o);
    add_sweep(s, o);
    s->add_option("--method", o.method, "Pattern area: auto, series, quadrature or mean")
        ->check(CLI::IsMember({"auto", "series", "quadrature", "mean"}));
    s->add_option("--l-max", o.l_max, "UCA series truncation (0 = automatic)");
  }
  // pattern-area
  {
    auto* s = sub("pattern-area", "Angle integral of |G|^2", [](const options& o) {
      const double step = deg_to_rad(o.theta_step_deg);
      outcome r;
      r.table = sweep_values(o, [&](const ArrayGeometry& geo, double tb) { return area_for(o, geo, tb, step).value; });
      r.summary = "pattern-area: " + std::to_string(r.table.rows.size()) + " rows, first value " + cell_text(r.table.rows.front()[1]);
      return r;
    });
    add_geometry(s, o);
    add_sweep(s, o);
    s->add_option("--method", o.method, "auto, series, quadrature or mean")
        ->check(CLI::IsMember({"auto", "series", "quadrature", "mean"}));
    s->add_option("--l-max", o.l_max, "UCA series truncation (0 = automatic)");
  }
  // mc-validate
  {
    auto* s = sub("mc-validate", "Monte Carlo SSOP estimate", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      const auto geo = make_geometry(o);
      const double tb = thetab_list(o, geo).front();
      const auto res = mc_ssop(geo, tb, p, o.trials, o.seed, o.mc == "simulated" ? mc_mode::simulated : mc_mode::conditional,
                               g.theta_step);
      const double exact = ssop_exact(geo, tb, p, g);
      outcome r;
      r.table.columns = {"trial_count", "estimate", "std_error", "seed"};
      r.table.add({static_cast<long long>(res.trials), res.estimate, res.std_error, std::to_string(res.seed)});
      r.summary = "mc-validate: estimate " + format_double(res.estimate) + " +- " + format_double(res.std_error) +
                  ", integral " + format_double(exact);
      return r;
    });
    add_geometry(s, o);
    s->add_option("--theta-b-deg", o.theta_b_deg, "Bob angle (deg)")->capture_default_str();
    s->add_option("--trials", o.trials, "Number of trials")->capture_default_str();
    s->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    s->add_option("--mode", o.mc, "conditional or simulated")->check(CLI::IsMember({"conditional", "simulated"}))->capture_default_str();
  }
  // zones
  {
    auto* s = sub("zones", "Coverage zones of a parent UCA", [](const options& o) {
      const auto z = coverage_zones(make_params(o), o.n);
      outcome r;
      r.table = zones_table(z);
      r.summary = "zones: " + std::to_string(z.zone_count()) + " zones, d_max " + format_double(z.d_max) + " m";
      return r;
    });
    s->add_option("--n", o.n, "Parent element count")->capture_default_str();
  }
  // optimize-radius and optimize-radius-zoned
  for (const bool zoned : {false, true}) {
    auto* s = sub(zoned ? "optimize-radius-zoned" : "optimize-radius",
                  zoned ? "Radius minimizing the zone-weighted best-mode SSOP" : "Radius minimizing the angle-averaged SSOP",
                  [zoned](const options& o) {
                    const auto p = make_params(o);
                    const auto g = make_grid(o);
                    const double r1 = to_wavelengths(o, o.r_min), r2 = to_wavelengths(o, o.r_max);
                    const double step = r_step_wavelengths(o);
                    const double tbs = deg_to_rad(o.thetab_step_deg);
                    const auto res = zoned ? optimize_radius_zoned(o.n, p, r1, r2, step, g, tbs)
                                           : optimize_radius(o.n, p, r1, r2, step, g, tbs);
                    outcome r;
                    r.table.columns = {"r_wavelengths", "objective"};
                    for (std::size_t i = 0; i < res.radii.size(); ++i) r.table.add({res.radii[i], res.objective[i]});
                    r.summary = std::string(zoned ? "optimize-radius-zoned" : "optimize-radius") + ": r_opt " +
                                format_double(res.r_opt) + " wavelengths, objective " + format_double(res.objective_min);
                    return r;
                  });
    s->add_option("--n", o.n, "Parent element count")->capture_default_str();
    add_radius_range(s, o);
  }
  // lut
  {
    auto* s = sub("lut", "Per-zone look-up tables of the best array mode", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      const auto tables = build_lookup_tables(o.n, to_wavelengths(o, o.radius), p, deg_to_rad(o.thetab_step_deg), g);
      const auto modes = enumerate_array_modes(o.n);
      outcome r;
      if (o.zone) {
        if (*o.zone < 1 || *o.zone > static_cast<int>(tables.size())) throw config_error("zone index out of range");
        r.table.columns = {"theta_from_deg", "theta_to_deg", "mode"};
      } else {
        r.table.columns = {"zone", "theta_from_deg", "theta_to_deg", "mode"};
      }
      for (const auto& t : tables) {
        if (o.zone && t.zone_index != *o.zone) continue;
        for (std::size_t i = 0; i < t.interval_count(); ++i) {
          const std::string name = modes[static_cast<std::size_t>(t.mode_per_interval[i] - 1)].name();
          const double a = rad_to_deg(t.breakpoints[i]), b = rad_to_deg(t.breakpoints[i + 1]);
          if (o.zone) r.table.add({a, b, name});
          else r.table.add({static_cast<long long>(t.zone_index), a, b, name});
        }
      }
      r.summary = "lut: " + std::to_string(tables.size()) + " tables, " + std::to_string(r.table.rows.size()) + " intervals";
      return r;
    });
    s->add_option("--n", o.n, "Parent element count")->capture_default_str();
    s->add_option("--radius", o.radius, "UCA radius")->required();
    s->add_option("--zone", o.zone, "Zone index (default all)");
  }
  // select
  {
    auto* s = sub("select", "Array mode for Bob's location", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      const auto zones = coverage_zones(p, o.n);
      const auto tables = build_lookup_tables(o.n, to_wavelengths(o, o.radius), p, deg_to_rad(o.thetab_step_deg), g);
      const auto m = select_mode(tables, o.distance, deg_to_rad(o.theta_deg), zones);
      outcome r;
      r.table.columns = {"zone", "mode", "active_indices"};
      r.table.add({static_cast<long long>(zones.zone_of(o.distance)), m.name(), join_indices(m.active_indices)});
      r.summary = "select: " + m.name() + " in zone " + std::to_string(zones.zone_of(o.distance));
      return r;
    });
    s->add_option("--n", o.n, "Parent element count")->capture_default_str();
    s->add_option("--radius", o.radius, "UCA radius")->required();
    s->add_option("--d", o.distance, "Bob's distance (m)")->required();
    s->add_option("--theta-deg", o.theta_deg, "Bob's angle (deg)")->required();
  }
  // error-analysis
  {
    auto* s = sub("error-analysis", "SSOP increase caused by angle estimation errors", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      ErrorModel model = ErrorModel::uniform();
      if (o.error_model == "none") model = ErrorModel::none();
      if (o.error_model == "gaussian") model = ErrorModel::gaussian(deg_to_rad(o.sigma_deg));
      const auto res = error_cost_sweep(o.n, p, to_wavelengths(o, o.r_min), to_wavelengths(o, o.r_max), r_step_wavelengths(o),
                                        model, deg_to_rad(o.thetab_step_deg), g, o.samples, o.seed);
      outcome r;
      r.table.columns = {"r_wavelengths", "err"};
      for (std::size_t i = 0; i < res.radii.size(); ++i) r.table.add({res.radii[i], res.objective[i]});
      r.summary = "error-analysis: minimum " + format_double(res.objective_min) + " at " + format_double(res.r_opt) + " wavelengths";
      return r;
    });
    s->add_option("--n", o.n, "Parent element count")->capture_default_str();
    add_radius_range(s, o);
    s->add_option("--error", o.error_model, "none, uniform or gaussian")
        ->check(CLI::IsMember({"none", "uniform", "gaussian"}))
        ->capture_default_str();
    s->add_option("--sigma-deg", o.sigma_deg, "Gaussian error spread (deg)")->capture_default_str();
    s->add_option("--samples", o.samples, "Monte Carlo samples (0 = quadrature)")->capture_default_str();
    s->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  }
  // tradeoff
  {
    auto* s = sub("tradeoff", "Transmit power versus active elements", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      TradeoffSpec spec;
      spec.scenario = o.scenario == "moving-bob" ? tradeoff_scenario::moving_bob : tradeoff_scenario::fixed_bob;
      spec.values = o.values;
      spec.n0 = o.n0;
      spec.pt0 = o.pt0;
      spec.d0 = o.d0;
      if (spec.values.empty()) {
        if (spec.scenario == tradeoff_scenario::fixed_bob) {
          for (int c : active_counts(o.n)) spec.values.push_back(c);
        } else {
          spec.values = {1.0, 2.0, 4.0, 8.0};
        }
      }
      const auto pts = power_element_tradeoff(o.n, to_wavelengths(o, o.radius), p, spec, g, deg_to_rad(o.thetab_step_deg));
      outcome r;
      r.table.columns = {"sweep_value", "n_active", "pt", "ssop", "feasible"};
      long long feasible = 0;
      for (const auto& t : pts) {
        r.table.add({t.sweep_value, static_cast<long long>(t.n_active), t.pt, t.ssop, static_cast<long long>(t.feasible)});
        feasible += t.feasible;
      }
      r.summary = "tradeoff: " + std::to_string(pts.size()) + " points, " + std::to_string(feasible) + " feasible";
      return r;
    });
    s->add_option("--n", o.n, "Parent element count")->capture_default_str();
    s->add_option("--radius", o.radius, "UCA radius")->required();
    s->add_option("--scenario", o.scenario, "fixed-bob or moving-bob")
        ->check(CLI::IsMember({"fixed-bob", "moving-bob"}))
        ->capture_default_str();
    s->add_option("--values", o.values, "Active counts (fixed-bob) or distances in m (moving-bob)")->delimiter(',');
    s->add_option("--n0", o.n0, "Reference active count")->capture_default_str();
    s->add_option("--pt0", o.pt0, "Reference transmit power")->capture_default_str();
    s->add_option("--d0", o.d0, "Reference distance (m)")->capture_default_str();
  }
  // ingest-pattern
  {
    auto* s = sub("ingest-pattern", "Validate, normalize and extend a pattern CSV", [](const options& o) {
      PatternTable t = load_pattern_csv(o.pattern_file);
      if (o.declare == "ula") t.geometry = declared_geometry::ula;
      if (o.declare == "uca") t.geometry = declared_geometry::uca;
      if (o.n > 0 && t.n_elements == 0) t.n_elements = o.n;
      if (o.normalize == "unit_max") t = normalize(std::move(t), normalization::unit_max);
      if (o.normalize == "sqrtn_max") t = normalize(std::move(t), normalization::sqrtn_max, t.n_elements);
      const std::size_t before = t.size();
      if (!t.is_full_circle() && t.geometry != declared_geometry::none) t = extend_to_full_circle(t);
      outcome r;
      r.summary = "ingest-pattern: " + std::to_string(before) + " samples, " + std::to_string(t.size()) +
                  " after extension (" + to_string(t.extension) + "), peak " + format_double(t.max_gain());
      r.table.columns = {"theta_deg", "gain"};
      for (std::size_t i = 0; i < t.size(); ++i) r.table.add({rad_to_deg(t.theta[i]), t.gains[i]});
      r.pattern = std::move(t);
      return r;
    });
    s->add_option("--pattern-file", o.pattern_file, "Pattern CSV")->required();
    s->add_option("--normalize", o.normalize, "raw, unit_max or sqrtn_max")
        ->check(CLI::IsMember({"raw", "unit_max", "sqrtn_max"}))
        ->capture_default_str();
    s->add_option("--n", o.n, "Element count for sqrtn_max");
    s->add_option("--declare", o.declare, "Geometry the pattern comes from (ula, uca)");
  }
  // correlate
  {
    auto* s = sub("correlate", "Pearson correlation of two patterns", [](const options& o) {
      const double rho = pearson_correlation(load_pattern_csv(o.file_a), load_pattern_csv(o.file_b));
      outcome r;
      r.table.columns = {"rho"};
      r.table.add({rho});
      r.summary = "correlate: rho " + format_double(rho);
      return r;
    });
    s->add_option("--a", o.file_a, "First pattern CSV")->required();
    s->add_option("--b", o.file_b, "Second pattern CSV")->required();
  }
  // attenuation
  {
    auto* s = sub("attenuation", "Peak-gain attenuation f(theta_B)", [](const options& o) {
      outcome r;
      r.table.columns = {"theta_b_deg", "f", "f_fit"};
      AttenuationProfile prof;
      if (o.profile == "published-ula" || o.profile == "published-uca" || o.profile == "constant") {
        prof = *profile_from(o);
        for (int i = 0, n = inclusive_sample_count(0.0, 90.0, o.step_deg); i < n; ++i) {
          const double a = deg_to_rad(i * o.step_deg);
          r.table.add({i * o.step_deg, prof(a), prof(a)});
        }
      } else {
        std::vector<PatternTable> set;
        for (const auto& f : o.pattern_files) set.push_back(load_pattern_csv(f));
        prof = max_gain_attenuation(std::move(set), o.n, o.fit);
        for (std::size_t i = 0; i < prof.theta_b.size(); ++i) {
          const double fit = prof.poly.empty() ? prof.f[i] : prof.poly_at(prof.theta_b[i]);
          r.table.add({rad_to_deg(prof.theta_b[i]), prof.f[i], fit});
        }
      }
      std::string coeffs;
      for (std::size_t i = 0; i < prof.poly.size(); ++i) coeffs += (i ? " " : "") + format_double(prof.poly[i]);
      r.summary = "attenuation: " + std::to_string(r.table.rows.size()) + " samples" +
                  (coeffs.empty() ? std::string() : ", fit coefficients (ascending) " + coeffs);
      return r;
    });
    s->add_option("--pattern-files", o.pattern_files, "Pattern CSVs, one per theta_B");
    s->add_option("--n", o.n, "Element count")->capture_default_str();
    s->add_option("--profile", o.profile, "published-ula, published-uca or constant instead of files");
    s->add_option("--f-constant", o.f_constant, "Value of the constant profile");
    s->add_flag("!--no-fit", o.fit, "Skip the degree-6 fit");
    s->add_option("--step-deg", o.step_deg, "Tabulation step for analytic profiles")->capture_default_str();
  }
  // ssop-measured
  {
    auto* s = sub("ssop-measured", "SSOP from a tabulated pattern", [](const options& o) {
      const auto p = make_params(o);
      const auto g = make_grid(o);
      PatternTable t = load_pattern_csv(o.pattern_file);
      if (o.declare == "ula") t.geometry = declared_geometry::ula;
      if (o.declare == "uca") t.geometry = declared_geometry::uca;
      const auto prof = profile_from(o);
      const double v = ssop_from_pattern(t, p, g, prof ? &*prof : nullptr);
      outcome r;
      r.table.columns = {"theta_b_deg", "value"};
      r.table.add({rad_to_deg(t.doe_angle), v});
      r.summary = "ssop-measured: " + format_double(v) + (prof ? " with power compensation" : "");
      return r;
    });
    s->add_option("--pattern-file", o.pattern_file, "Pattern CSV")->required();
    s->add_option("--declare", o.declare, "Geometry the pattern comes from (ula, uca)");
    s->add_option("--compensation", o.profile, "none, published-ula, published-uca, constant or patterns");
    s->add_option("--f-constant", o.f_constant, "Value of the constant profile");
    s->add_option("--pattern-files", o.pattern_files, "Pattern set for the 'patterns' profile");
    s->add_option("--n", o.n, "Element count for the 'patterns' profile")->capture_default_str();
  }
  // zones-measured
  {
    auto* s = sub("zones-measured", "Coverage zones with attenuated peak gain", [](const options& o) {
      const auto prof = profile_from(o);
      const auto z = prof ? zone_areas_angle_dependent(*prof, make_params(o), o.n, deg_to_rad(o.theta_step_deg))
                          : coverage_zones(make_params(o), o.n);
      outcome r;
      r.table = zones_table(z);
      r.summary = "zones-measured: " + std::to_string(z.zone_count()) + " zones";
      return r;
    });
    s->add_option("--n", o.n, "Parent element count")->capture_default_str();
    s->add_option("--attenuation", o.profile, "published-ula, published-uca, constant or patterns");
    s->add_option("--f-constant", o.f_constant, "Value of the constant profile");
    s->add_option("--pattern-files", o.pattern_files, "Pattern set for the 'patterns' profile");
    s->add_flag("!--no-fit", o.fit, "Skip the degree-6 fit");
  }

  // Config entries go right after the subcommand so that explicit flags, which
  // come later, take precedence.
  try {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      std::vector<std::string> injected;
      for (const auto& [key, val] : read_config(config_path)) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        injected.push_back(flag + "=" + val);
      }
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (handlers.count(args[i])) {
          args.insert(args.begin() + static_cast<std::ptrdiff_t>(i) + 1, injected.begin(), injected.end());
          break;
        }
      }
    }
  } catch (const parse_error& e) {
    err << "error: " << e.what() << '\n';
    return parse_failure;
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return usage;
  }

  std::string chosen;
  for (const auto* s : app.get_subcommands()) chosen = s->get_name();
  try {
    outcome res = handlers.at(chosen)(o);
    const output_format fmt = o.format == "json" ? output_format::json : output_format::csv;
    auto write = [&](std::ostream& os) {
      if (res.pattern && fmt == output_format::csv) write_pattern_csv(os, *res.pattern);
      else emit(os, res.table, fmt);
    };
    if (o.out_path.empty()) {
      write(out);
    } else {
      std::ofstream f(o.out_path);
      if (!f) throw domain_error("cannot open output file " + o.out_path);
      write(f);
      f.flush();
      if (!f) throw domain_error("failed writing " + o.out_path);
    }
    err << res.summary << '\n';
    return ok;
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return domain_failure;
  }
}

}  // namespace secbeam::cli
