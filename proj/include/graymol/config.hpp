#pragma once

#include <json.hpp>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "graymol/eit.hpp"
#include "graymol/params.hpp"
#include "graymol/wfmc.hpp"

namespace graymol {

using Json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int config_schema_version = 1;

enum class RunMode { cool, sweep, validate, eit, tof };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::cool: return "cool";
    case RunMode::sweep: return "sweep";
    case RunMode::validate: return "validate";
    case RunMode::eit: return "eit";
    case RunMode::tof: return "tof";
  }
  throw ConfigError("bad mode");
}

inline RunMode mode_from_string(const std::string& s) {
  for (RunMode m : {RunMode::cool, RunMode::sweep, RunMode::validate,
                    RunMode::eit, RunMode::tof})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown mode '" + s + "'");
}

/// EIT pipeline settings.
struct EITConfig {
  EITParams params{};
  double delta_min_hz = -3e7;
  double delta_max_hz = +3e7;
  int n_points = 1201;
  double f_mod_hz = 1e7;
  double calibration_v = 1.0;        ///< volts per absorption unit
  double target_slope_v_per_hz = 0;  ///< when nonzero, overrides calibration
  std::string input_spectrum;        ///< optional measured spectrum to fit
};

/// TOF pipeline settings.
struct TofConfig {
  std::string frames_manifest;
  double mass_kg = constants::mass_rb87;
};

/// Full run configuration (the versioned JSON schema).
struct RunConfig {
  RunMode mode = RunMode::cool;
  LaserParams lasers{};
  SimGrid grid{};
  double b_z = 0.0;
  double gamma_r_hz = 0.0;
  int n_traj = 100;
  std::uint64_t seed = 1;
  double dt = 0.005;
  double t_final = 1e-3;
  int record_stride = 4000;
  double initial_dp = 12.0;
  PropagatorKind propagator = PropagatorKind::automatic;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::vector<std::pair<std::string, double>> sweep_axes = {
      {"x", 0.9396926207859084}, {"z", 1.0}};
  EITConfig eit{};
  TofConfig tof{};
  std::string output_dir = "out";

  TrajectoryConfig trajectory() const {
    TrajectoryConfig t;
    t.lasers = lasers;
    t.grid = grid;
    t.b_z = b_z;
    t.gamma_r_hz = gamma_r_hz;
    t.dt = dt;
    t.t_final = t_final;
    t.seed = seed;
    t.record_stride = record_stride;
    t.initial_dp = initial_dp;
    t.propagator = propagator;
    return t;
  }
};

namespace detail {

inline void require_keys(const Json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw ConfigError("unknown config key '" + where + key + "'");
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("bad value for config key '" + key + "'");
  }
}

inline BeamPolarization parse_polarization(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "lin_par_lin") return BeamPolarization::lin_par_lin();
    if (s == "lin_perp_lin") return BeamPolarization::lin_perp_lin();
    if (s == "counter_rotating") return BeamPolarization::counter_rotating();
    if (s == "same_sigma_minus") return BeamPolarization::same_sigma(-1);
    if (s == "same_sigma_plus") return BeamPolarization::same_sigma(+1);
    throw ConfigError("unknown polarization '" + s + "'");
  }
  require_keys(j, {"amp_plus", "amp_minus"}, "physics.polarization.");
  BeamPolarization p;
  const auto ap = j.at("amp_plus").get<std::vector<double>>();
  const auto am = j.at("amp_minus").get<std::vector<double>>();
  if (ap.size() != 3 || am.size() != 3)
    throw ConfigError("polarization amplitudes need 3 components");
  std::copy(ap.begin(), ap.end(), p.amp_plus.begin());
  std::copy(am.begin(), am.end(), p.amp_minus.begin());
  return p;
}

inline Json polarization_json(const BeamPolarization& p) {
  if (p == BeamPolarization::lin_par_lin()) return "lin_par_lin";
  if (p == BeamPolarization::lin_perp_lin()) return "lin_perp_lin";
  if (p == BeamPolarization::counter_rotating()) return "counter_rotating";
  if (p == BeamPolarization::same_sigma(-1)) return "same_sigma_minus";
  if (p == BeamPolarization::same_sigma(+1)) return "same_sigma_plus";
  Json j;
  j["amp_plus"] = std::vector<double>(p.amp_plus.begin(), p.amp_plus.end());
  j["amp_minus"] = std::vector<double>(p.amp_minus.begin(), p.amp_minus.end());
  return j;
}

}  // namespace detail

/// Names accepted by sweep.parameter, all living in physics/ensemble scope.
inline const std::set<std::string>& sweepable_parameters() {
  static const std::set<std::string> s = {
      "Delta", "delta", "Omega",      "omega",  "k_eff",  "B_z",
      "Gamma_R", "n_traj", "seed",    "dt",     "t_final", "initial_dp"};
  return s;
}

inline RunConfig parse_config(const Json& root) {
  using detail::get_or;
  using detail::require_keys;
  require_keys(root,
               {"schema_version", "mode", "physics", "ensemble", "sweep",
                "eit", "tof", "output"},
               "");
  if (!root.contains("schema_version"))
    throw ConfigError("missing config key 'schema_version'");
  if (root.at("schema_version").get<int>() != config_schema_version)
    throw ConfigError("unsupported schema_version");
  if (!root.contains("mode")) throw ConfigError("missing config key 'mode'");

  RunConfig cfg;
  cfg.mode = mode_from_string(root.at("mode").get<std::string>());

  if (root.contains("physics")) {
    const Json& ph = root.at("physics");
    require_keys(ph,
                 {"Delta", "delta", "Omega", "omega", "k_eff", "delta_sign",
                  "polarization", "B_z", "Gamma_R", "grid"},
                 "physics.");
    cfg.lasers.Delta = get_or(ph, "Delta", cfg.lasers.Delta);
    cfg.lasers.delta = get_or(ph, "delta", cfg.lasers.delta);
    cfg.lasers.Omega = get_or(ph, "Omega", cfg.lasers.Omega);
    cfg.lasers.omega = get_or(ph, "omega", cfg.lasers.omega);
    cfg.lasers.k_eff = get_or(ph, "k_eff", cfg.lasers.k_eff);
    cfg.lasers.delta_sign = get_or(ph, "delta_sign", cfg.lasers.delta_sign);
    if (ph.contains("polarization"))
      cfg.lasers.pol = detail::parse_polarization(ph.at("polarization"));
    cfg.b_z = get_or(ph, "B_z", cfg.b_z);
    cfg.gamma_r_hz = get_or(ph, "Gamma_R", cfg.gamma_r_hz);
    if (ph.contains("grid")) {
      const Json& g = ph.at("grid");
      require_keys(g, {"p_max", "p_step_inv"}, "physics.grid.");
      cfg.grid.p_max = get_or(g, "p_max", cfg.grid.p_max);
      const int inv = get_or(g, "p_step_inv", 3);
      if (inv < 1) throw ConfigError("physics.grid.p_step_inv must be >= 1");
      cfg.grid.p_step = 1.0 / inv;
    }
  }

  if (root.contains("ensemble")) {
    const Json& en = root.at("ensemble");
    require_keys(en,
                 {"n_traj", "seed", "dt", "t_final", "record_stride",
                  "initial_dp", "propagator"},
                 "ensemble.");
    cfg.n_traj = get_or(en, "n_traj", cfg.n_traj);
    cfg.seed = get_or(en, "seed", cfg.seed);
    cfg.dt = get_or(en, "dt", cfg.dt);
    cfg.t_final = get_or(en, "t_final", cfg.t_final);
    cfg.record_stride = get_or(en, "record_stride", cfg.record_stride);
    cfg.initial_dp = get_or(en, "initial_dp", cfg.initial_dp);
    const std::string prop = get_or<std::string>(en, "propagator", "auto");
    if (prop == "auto")
      cfg.propagator = PropagatorKind::automatic;
    else if (prop == "krylov")
      cfg.propagator = PropagatorKind::krylov;
    else if (prop == "split_step")
      cfg.propagator = PropagatorKind::split_step;
    else
      throw ConfigError("unknown propagator '" + prop + "'");
    if (cfg.n_traj < 1) throw ConfigError("ensemble.n_traj must be >= 1");
  }

  if (root.contains("sweep")) {
    const Json& sw = root.at("sweep");
    require_keys(sw, {"parameter", "values", "axes"}, "sweep.");
    cfg.sweep_parameter = get_or<std::string>(sw, "parameter", "");
    cfg.sweep_values = get_or(sw, "values", std::vector<double>{});
    if (sw.contains("axes")) {
      cfg.sweep_axes.clear();
      for (const auto& [name, val] : sw.at("axes").items())
        cfg.sweep_axes.emplace_back(name, val.get<double>());
    }
    if (cfg.mode == RunMode::sweep) {
      if (!sweepable_parameters().count(cfg.sweep_parameter))
        throw ConfigError("sweep.parameter '" + cfg.sweep_parameter +
                          "' does not name a physics/ensemble field");
      if (cfg.sweep_values.empty())
        throw ConfigError("sweep.values must be non-empty");
      if (cfg.sweep_axes.empty())
        throw ConfigError("sweep.axes must be non-empty");
    }
  } else if (cfg.mode == RunMode::sweep) {
    throw ConfigError("sweep mode needs a 'sweep' section");
  }

  if (root.contains("eit")) {
    const Json& e = root.at("eit");
    require_keys(e,
                 {"Omega", "omega", "Delta", "gamma_deph", "probe_leg",
                  "delta_min", "delta_max", "n_points", "f_mod",
                  "calibration", "target_slope", "input_spectrum"},
                 "eit.");
    cfg.eit.params.Omega = get_or(e, "Omega", cfg.eit.params.Omega);
    cfg.eit.params.omega = get_or(e, "omega", cfg.eit.params.omega);
    cfg.eit.params.Delta = get_or(e, "Delta", cfg.eit.params.Delta);
    cfg.eit.params.gamma_deph =
        get_or(e, "gamma_deph", cfg.eit.params.gamma_deph);
    const std::string leg = get_or<std::string>(e, "probe_leg", "raman");
    if (leg == "raman")
      cfg.eit.params.probe_leg = ProbeLeg::raman;
    else if (leg == "coupling")
      cfg.eit.params.probe_leg = ProbeLeg::coupling;
    else
      throw ConfigError("unknown probe_leg '" + leg + "'");
    cfg.eit.delta_min_hz = get_or(e, "delta_min", cfg.eit.delta_min_hz);
    cfg.eit.delta_max_hz = get_or(e, "delta_max", cfg.eit.delta_max_hz);
    cfg.eit.n_points = get_or(e, "n_points", cfg.eit.n_points);
    cfg.eit.f_mod_hz = get_or(e, "f_mod", cfg.eit.f_mod_hz);
    cfg.eit.calibration_v = get_or(e, "calibration", cfg.eit.calibration_v);
    cfg.eit.target_slope_v_per_hz =
        get_or(e, "target_slope", cfg.eit.target_slope_v_per_hz);
    cfg.eit.input_spectrum =
        get_or<std::string>(e, "input_spectrum", cfg.eit.input_spectrum);
  }

  if (root.contains("tof")) {
    const Json& t = root.at("tof");
    require_keys(t, {"frames_manifest", "mass"}, "tof.");
    cfg.tof.frames_manifest =
        get_or<std::string>(t, "frames_manifest", cfg.tof.frames_manifest);
    cfg.tof.mass_kg = get_or(t, "mass", cfg.tof.mass_kg);
  }

  if (root.contains("output")) {
    const Json& o = root.at("output");
    require_keys(o, {"dir"}, "output.");
    cfg.output_dir = get_or<std::string>(o, "dir", cfg.output_dir);
  }

  // physics-level validation happens where models are built; fail early on
  // the cheap invariants
  cfg.lasers.validate();
  cfg.grid.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json root;
  try {
    root = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(root);
}

inline Json serialize_config(const RunConfig& cfg) {
  Json root;
  root["schema_version"] = config_schema_version;
  root["mode"] = to_string(cfg.mode);
  Json ph;
  ph["Delta"] = cfg.lasers.Delta;
  ph["delta"] = cfg.lasers.delta;
  ph["Omega"] = cfg.lasers.Omega;
  ph["omega"] = cfg.lasers.omega;
  ph["k_eff"] = cfg.lasers.k_eff;
  ph["delta_sign"] = cfg.lasers.delta_sign;
  ph["polarization"] = detail::polarization_json(cfg.lasers.pol);
  ph["B_z"] = cfg.b_z;
  ph["Gamma_R"] = cfg.gamma_r_hz;
  ph["grid"] = {{"p_max", cfg.grid.p_max},
                {"p_step_inv", int(std::lround(1.0 / cfg.grid.p_step))}};
  root["physics"] = ph;
  Json en;
  en["n_traj"] = cfg.n_traj;
  en["seed"] = cfg.seed;
  en["dt"] = cfg.dt;
  en["t_final"] = cfg.t_final;
  en["record_stride"] = cfg.record_stride;
  en["initial_dp"] = cfg.initial_dp;
  en["propagator"] = cfg.propagator == PropagatorKind::automatic ? "auto"
                     : cfg.propagator == PropagatorKind::krylov
                         ? "krylov"
                         : "split_step";
  root["ensemble"] = en;
  if (cfg.mode == RunMode::sweep || !cfg.sweep_parameter.empty()) {
    Json sw;
    sw["parameter"] = cfg.sweep_parameter;
    sw["values"] = cfg.sweep_values;
    Json axes;
    for (const auto& [name, val] : cfg.sweep_axes) axes[name] = val;
    sw["axes"] = axes;
    root["sweep"] = sw;
  }
  if (cfg.mode == RunMode::eit) {
    Json e;
    e["Omega"] = cfg.eit.params.Omega;
    e["omega"] = cfg.eit.params.omega;
    e["Delta"] = cfg.eit.params.Delta;
    e["gamma_deph"] = cfg.eit.params.gamma_deph;
    e["probe_leg"] =
        cfg.eit.params.probe_leg == ProbeLeg::raman ? "raman" : "coupling";
    e["delta_min"] = cfg.eit.delta_min_hz;
    e["delta_max"] = cfg.eit.delta_max_hz;
    e["n_points"] = cfg.eit.n_points;
    e["f_mod"] = cfg.eit.f_mod_hz;
    e["calibration"] = cfg.eit.calibration_v;
    e["target_slope"] = cfg.eit.target_slope_v_per_hz;
    if (!cfg.eit.input_spectrum.empty())
      e["input_spectrum"] = cfg.eit.input_spectrum;
    root["eit"] = e;
  }
  if (cfg.mode == RunMode::tof) {
    Json t;
    t["frames_manifest"] = cfg.tof.frames_manifest;
    t["mass"] = cfg.tof.mass_kg;
    root["tof"] = t;
  }
  root["output"] = {{"dir", cfg.output_dir}};
  return root;
}

/// Applies a swept parameter value to a copy of the configuration.
inline RunConfig with_swept_value(const RunConfig& base,
                                  const std::string& parameter, double value) {
  RunConfig c = base;
  if (parameter == "Delta")
    c.lasers.Delta = value;
  else if (parameter == "delta")
    c.lasers.delta = value;
  else if (parameter == "Omega")
    c.lasers.Omega = value;
  else if (parameter == "omega")
    c.lasers.omega = value;
  else if (parameter == "k_eff")
    c.lasers.k_eff = value;
  else if (parameter == "B_z")
    c.b_z = value;
  else if (parameter == "Gamma_R")
    c.gamma_r_hz = value;
  else if (parameter == "n_traj")
    c.n_traj = int(std::llround(value));
  else if (parameter == "seed")
    c.seed = std::uint64_t(std::llround(value));
  else if (parameter == "dt")
    c.dt = value;
  else if (parameter == "t_final")
    c.t_final = value;
  else if (parameter == "initial_dp")
    c.initial_dp = value;
  else
    throw ConfigError("sweep.parameter '" + parameter +
                      "' does not name a physics/ensemble field");
  return c;
}

}  // namespace graymol
