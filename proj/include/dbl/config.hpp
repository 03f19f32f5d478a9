#pragma once

// Declarative run configuration. Every section is optional except
// equation.type and equation.alpha; unknown keys are rejected at every level.
// to_json writes the fully resolved config, and parsing that echo gives back
// an identical RunConfig.

#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbl/dispersion.hpp"
#include "dbl/energies.hpp"
#include "dbl/errors.hpp"
#include "dbl/solver.hpp"
#include "dbl/spectral.hpp"

namespace dbl {

using json = nlohmann::json;

struct EquationConfig {
  std::string type;
  double alpha = 0.0;
  double tau = 1.0;
  double xi0 = 1.0;
};

struct GridConfig {
  int n = 256;
  double length = 2.0 * kPi;
};

struct TimeConfig {
  std::string scheme = "ifrk4";
  double dt = 1e-3;
  double t_final = 1.0;
  int record_every = 100;
  bool dealias = true;
  bool nonlinear = true;
};

struct InitialConfig {
  std::string kind = "cosine";
  double amplitude = 0.1;
  json params = json::object();
  unsigned long long seed = 1;
};

struct DiagnosticsConfig {
  double s = 0.0;
  double sigma = 0.0;
  double n0 = 64.0;
  double b = 0.5;
  int every = 1;
};

struct SymbolCheckConfig {
  double xi_min = 2.0;
  double xi_max = 100.0;
  int beta_max = 3;
  int samples = 400;
};

struct ResonanceConfig {
  long long n_samples = 100000;
  double scale_min = 1.0;
  double scale_max = 1000.0;
  double separation = 32.0;
  unsigned long long seed = 1;
};

struct MultiplierConfig {
  double N = 64.0;
  int seeds = 20;
  double window = 1e3;
  int beta_max = 3;
};

struct ExperimentConfig {
  std::string name = "difference";
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  double t_prime = 0.5;
  double lambda = 2.0;
  std::vector<double> scales{4, 8, 16, 32, 64, 128};
  int ensemble = 4;
  int time_samples = 256;
  int oversample = 8;
  std::vector<double> deltas{4e-4, 2e-4, 1e-4};
};

struct ConvergenceConfig {
  std::vector<double> dts{4e-3, 2e-3, 1e-3};
  int reference_refinement = 8;
  double slope_min = 3.7;
  double slope_max = 4.3;
};

struct RunConfig {
  EquationConfig equation;
  GridConfig grid;
  TimeConfig time;
  InitialConfig initial;
  DiagnosticsConfig diagnostics;
  std::string output_dir;
  SymbolCheckConfig symbol_check;
  ResonanceConfig resonance;
  MultiplierConfig multiplier;
  ExperimentConfig experiment;
  ConvergenceConfig convergence;
};

namespace config_detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + where + "." + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type for '" + where + "." + key + "'");
  }
}

inline void require_positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + " must be positive");
}

}  // namespace config_detail

inline DispersionSymbol make_symbol(const EquationConfig& e) {
  const auto kind = symbol_kind_from_string(e.type);
  DispersionSymbol sym = DispersionSymbol::pure_power(e.alpha > 0.0 && e.alpha <= 1.0 ? e.alpha : 1.0);
  switch (kind) {
    case SymbolKind::pure_power: sym = DispersionSymbol::pure_power(e.alpha); break;
    case SymbolKind::whitham:
      if (e.alpha != 0.5) throw ConfigError("whitham requires equation.alpha = 0.5");
      sym = DispersionSymbol::whitham(e.tau);
      break;
    case SymbolKind::ilw:
      if (e.alpha != 1.0) throw ConfigError("ilw requires equation.alpha = 1");
      sym = DispersionSymbol::ilw();
      break;
  }
  return sym.with_xi0(e.xi0);
}

inline SolverConfig make_solver_config(const TimeConfig& t) {
  SolverConfig c;
  c.scheme = scheme_from_string(t.scheme);
  c.dt = t.dt;
  c.t_final = t.t_final;
  c.record_every = t.record_every;
  c.dealias = t.dealias;
  c.nonlinear = t.nonlinear;
  c.validate();
  return c;
}

inline std::string default_output_root() {
  const char* env = std::getenv("DBL_OUTPUT_DIR");
  return (env && *env) ? std::string(env) : std::string("dbl_output");
}

// Parses and validates; `subcommand` names the default output subdirectory.
inline RunConfig parse_config(const json& j, const std::string& subcommand) {
  using namespace config_detail;
  reject_unknown(j, "config",
                 {"equation", "grid", "time", "initial", "diagnostics", "output", "symbol_check", "resonance",
                  "multiplier", "experiment", "convergence"});
  RunConfig c;

  if (!j.contains("equation")) throw ConfigError("missing required section 'equation'");
  const auto& e = j.at("equation");
  reject_unknown(e, "equation", {"type", "alpha", "tau", "xi0"});
  if (!e.contains("type")) throw ConfigError("missing required key 'equation.type'");
  if (!e.contains("alpha")) throw ConfigError("missing required key 'equation.alpha'");
  read(e, "type", c.equation.type, "equation");
  read(e, "alpha", c.equation.alpha, "equation");
  read(e, "tau", c.equation.tau, "equation");
  read(e, "xi0", c.equation.xi0, "equation");
  const auto sym = make_symbol(c.equation);

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, "grid", {"n", "length"});
    read(g, "n", c.grid.n, "grid");
    read(g, "length", c.grid.length, "grid");
  }
  SpectralGrid(c.grid.n, c.grid.length);

  if (j.contains("time")) {
    const auto& t = j.at("time");
    reject_unknown(t, "time", {"scheme", "dt", "t_final", "record_every", "dealias", "nonlinear"});
    read(t, "scheme", c.time.scheme, "time");
    read(t, "dt", c.time.dt, "time");
    read(t, "t_final", c.time.t_final, "time");
    read(t, "record_every", c.time.record_every, "time");
    read(t, "dealias", c.time.dealias, "time");
    read(t, "nonlinear", c.time.nonlinear, "time");
  }
  make_solver_config(c.time);

  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    reject_unknown(i, "initial", {"kind", "amplitude", "params", "seed"});
    read(i, "kind", c.initial.kind, "initial");
    read(i, "amplitude", c.initial.amplitude, "initial");
    read(i, "seed", c.initial.seed, "initial");
    if (i.contains("params")) {
      if (!i.at("params").is_object()) throw ConfigError("initial.params must be an object");
      c.initial.params = i.at("params");
    }
  }
  if (!std::isfinite(c.initial.amplitude)) throw ConfigError("initial.amplitude must be finite");

  c.diagnostics.s = std::max(0.3, lwp_threshold(sym.alpha()) + 0.05);
  bool sigma_given = false;
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    reject_unknown(d, "diagnostics", {"s", "sigma", "n0", "b", "every"});
    read(d, "s", c.diagnostics.s, "diagnostics");
    sigma_given = d.contains("sigma");
    read(d, "sigma", c.diagnostics.sigma, "diagnostics");
    read(d, "n0", c.diagnostics.n0, "diagnostics");
    read(d, "b", c.diagnostics.b, "diagnostics");
    read(d, "every", c.diagnostics.every, "diagnostics");
  }
  if (!sigma_given) {
    const auto w = sigma_window(c.diagnostics.s, sym.alpha());
    c.diagnostics.sigma = 0.5 * (w.lo + std::max(w.lo, w.hi));
  }
  require_positive(c.diagnostics.n0, "diagnostics.n0");
  if (c.diagnostics.every < 1) throw ConfigError("diagnostics.every must be >= 1");

  c.output_dir = default_output_root() + "/" + subcommand;
  if (j.contains("output")) {
    const auto& o = j.at("output");
    reject_unknown(o, "output", {"dir"});
    read(o, "dir", c.output_dir, "output");
  }

  if (j.contains("symbol_check")) {
    const auto& s = j.at("symbol_check");
    reject_unknown(s, "symbol_check", {"xi_min", "xi_max", "beta_max", "samples"});
    read(s, "xi_min", c.symbol_check.xi_min, "symbol_check");
    read(s, "xi_max", c.symbol_check.xi_max, "symbol_check");
    read(s, "beta_max", c.symbol_check.beta_max, "symbol_check");
    read(s, "samples", c.symbol_check.samples, "symbol_check");
  }
  if (j.contains("resonance")) {
    const auto& r = j.at("resonance");
    reject_unknown(r, "resonance", {"n_samples", "scale_min", "scale_max", "separation", "seed"});
    read(r, "n_samples", c.resonance.n_samples, "resonance");
    read(r, "scale_min", c.resonance.scale_min, "resonance");
    read(r, "scale_max", c.resonance.scale_max, "resonance");
    read(r, "separation", c.resonance.separation, "resonance");
    read(r, "seed", c.resonance.seed, "resonance");
  }
  if (j.contains("multiplier")) {
    const auto& m = j.at("multiplier");
    reject_unknown(m, "multiplier", {"N", "seeds", "window", "beta_max"});
    read(m, "N", c.multiplier.N, "multiplier");
    read(m, "seeds", c.multiplier.seeds, "multiplier");
    read(m, "window", c.multiplier.window, "multiplier");
    read(m, "beta_max", c.multiplier.beta_max, "multiplier");
  }
  if (j.contains("experiment")) {
    const auto& x = j.at("experiment");
    reject_unknown(x, "experiment",
                   {"name", "epsilons", "t_prime", "lambda", "scales", "ensemble", "time_samples", "oversample",
                    "deltas"});
    read(x, "name", c.experiment.name, "experiment");
    read(x, "epsilons", c.experiment.epsilons, "experiment");
    read(x, "t_prime", c.experiment.t_prime, "experiment");
    read(x, "lambda", c.experiment.lambda, "experiment");
    read(x, "scales", c.experiment.scales, "experiment");
    read(x, "ensemble", c.experiment.ensemble, "experiment");
    read(x, "time_samples", c.experiment.time_samples, "experiment");
    read(x, "oversample", c.experiment.oversample, "experiment");
    read(x, "deltas", c.experiment.deltas, "experiment");
  }
  if (j.contains("convergence")) {
    const auto& v = j.at("convergence");
    reject_unknown(v, "convergence", {"dts", "reference_refinement", "slope_min", "slope_max"});
    read(v, "dts", c.convergence.dts, "convergence");
    read(v, "reference_refinement", c.convergence.reference_refinement, "convergence");
    read(v, "slope_min", c.convergence.slope_min, "convergence");
    read(v, "slope_max", c.convergence.slope_max, "convergence");
  }
  return c;
}

inline json to_json(const RunConfig& c) {
  json j;
  j["equation"] = {{"type", c.equation.type}, {"alpha", c.equation.alpha}, {"tau", c.equation.tau},
                   {"xi0", c.equation.xi0}};
  j["grid"] = {{"n", c.grid.n}, {"length", c.grid.length}};
  j["time"] = {{"scheme", c.time.scheme},         {"dt", c.time.dt},           {"t_final", c.time.t_final},
               {"record_every", c.time.record_every}, {"dealias", c.time.dealias}, {"nonlinear", c.time.nonlinear}};
  j["initial"] = {{"kind", c.initial.kind}, {"amplitude", c.initial.amplitude}, {"params", c.initial.params},
                  {"seed", c.initial.seed}};
  j["diagnostics"] = {{"s", c.diagnostics.s}, {"sigma", c.diagnostics.sigma}, {"n0", c.diagnostics.n0},
                      {"b", c.diagnostics.b}, {"every", c.diagnostics.every}};
  j["output"] = {{"dir", c.output_dir}};
  j["symbol_check"] = {{"xi_min", c.symbol_check.xi_min}, {"xi_max", c.symbol_check.xi_max},
                       {"beta_max", c.symbol_check.beta_max}, {"samples", c.symbol_check.samples}};
  j["resonance"] = {{"n_samples", c.resonance.n_samples}, {"scale_min", c.resonance.scale_min},
                    {"scale_max", c.resonance.scale_max},  {"separation", c.resonance.separation},
                    {"seed", c.resonance.seed}};
  j["multiplier"] = {{"N", c.multiplier.N}, {"seeds", c.multiplier.seeds}, {"window", c.multiplier.window},
                     {"beta_max", c.multiplier.beta_max}};
  j["experiment"] = {{"name", c.experiment.name},
                     {"epsilons", c.experiment.epsilons},
                     {"t_prime", c.experiment.t_prime},
                     {"lambda", c.experiment.lambda},
                     {"scales", c.experiment.scales},
                     {"ensemble", c.experiment.ensemble},
                     {"time_samples", c.experiment.time_samples},
                     {"oversample", c.experiment.oversample},
                     {"deltas", c.experiment.deltas}};
  j["convergence"] = {{"dts", c.convergence.dts},
                      {"reference_refinement", c.convergence.reference_refinement},
                      {"slope_min", c.convergence.slope_min},
                      {"slope_max", c.convergence.slope_max}};
  return j;
}

}  // namespace dbl
