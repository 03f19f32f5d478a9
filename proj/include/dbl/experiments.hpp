#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbl/config.hpp"
#include "dbl/energies.hpp"
#include "dbl/io.hpp"
#include "dbl/littlewood_paley.hpp"
#include "dbl/solver.hpp"
#include "dbl/spacetime.hpp"
#include "dbl/spectral.hpp"

namespace dbl {

// ---------------------------------------------------------------- initial data

namespace detail {
template <class T>
T param(const json& p, const char* key, T def) {
  if (!p.contains(key)) return def;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("wrong type for initial.params.") + key);
  }
}

inline void only_params(const json& p, const std::string& kind, std::initializer_list<const char*> keys) {
  config_detail::reject_unknown(p, "initial.params(" + kind + ")", keys);
}
}  // namespace detail

// cosine:    amplitude cos(mode x')                 params {mode = 1}
// modes:     amplitude sum a_j cos(k_j x' + phase_j)  params {modes = [[k, a, phase], ...]}
// gaussian:  amplitude exp(-(x - c)^2 / (2 w^2)), truncated to the dealiased band
//            params {center = L/2, width = L/16, mean_free = false}
// random_hs: random_field with ||u||_{H^s} = amplitude  params {s = 0, kmax = min(32, n/3), decay = 1}
// snapshot:  field CSV written by simulate                params {path}
// where x' = 2 pi x / L.
inline Field make_initial(const InitialConfig& ic, const SpectralGrid& g) {
  const json& p = ic.params;
  const auto check_k = [&](long long k) {
    if (k < 1 || k > g.kmax()) throw ConfigError("initial mode " + std::to_string(k) + " outside 1.." +
                                                 std::to_string(g.kmax()));
  };
  if (ic.kind == "cosine") {
    detail::only_params(p, ic.kind, {"mode"});
    const int m = detail::param(p, "mode", 1);
    check_k(m);
    Field f(g);
    f.set(m, cplx(0.5 * ic.amplitude, 0.0));
    return f;
  }
  if (ic.kind == "modes") {
    detail::only_params(p, ic.kind, {"modes"});
    if (!p.contains("modes") || !p.at("modes").is_array())
      throw ConfigError("initial.params.modes must be a list of [k, amplitude, phase]");
    Field f(g);
    for (const auto& m : p.at("modes")) {
      if (!m.is_array() || m.size() < 2 || m.size() > 3) throw ConfigError("initial.params.modes entry malformed");
      const int k = m.at(0).get<int>();
      check_k(k);
      const double a = m.at(1).get<double>();
      const double ph = m.size() == 3 ? m.at(2).get<double>() : 0.0;
      f.set(k, f.coeff(k) + 0.5 * ic.amplitude * a * std::polar(1.0, ph));
    }
    return f;
  }
  if (ic.kind == "gaussian") {
    detail::only_params(p, ic.kind, {"center", "width", "mean_free"});
    const double c = detail::param(p, "center", g.length() / 2.0);
    const double w = detail::param(p, "width", g.length() / 16.0);
    const bool mean_free = detail::param(p, "mean_free", false);
    if (!(w > 0.0)) throw ConfigError("initial.params.width must be positive");
    Field f = from_function(g, [&](double x) {
      const double d = x - c;
      return ic.amplitude * std::exp(-d * d / (2.0 * w * w));
    });
    f = truncate(f, g.dealias_cutoff());
    if (mean_free) f.set(0, 0.0);
    return f;
  }
  if (ic.kind == "random_hs") {
    detail::only_params(p, ic.kind, {"s", "kmax", "decay"});
    const double s = detail::param(p, "s", 0.0);
    const int km = detail::param(p, "kmax", std::min(32, g.dealias_cutoff()));
    const double decay = detail::param(p, "decay", 1.0);
    return random_field(g, ic.seed, km, decay, s, ic.amplitude);
  }
  if (ic.kind == "snapshot") {
    detail::only_params(p, ic.kind, {"path"});
    if (!p.contains("path")) throw ConfigError("initial.params.path is required for kind 'snapshot'");
    Field f = io::read_field_csv(p.at("path").get<std::string>());
    if (!(f.grid() == g)) throw ConfigError("snapshot grid does not match the configured grid");
    return f;
  }
  throw ConfigError("unknown initial.kind '" + ic.kind + "' (cosine, modes, gaussian, random_hs, snapshot)");
}

// ---------------------------------------------------------------- experiment plumbing

struct ExperimentSpec {
  std::string name;
  DispersionSymbol sym = DispersionSymbol::pure_power(1.0);
  SpectralGrid grid;
  InitialConfig initial;
  SolverConfig solver;
  DiagnosticsConfig diag;

  static ExperimentSpec from_config(const RunConfig& c) {
    ExperimentSpec e;
    e.name = c.experiment.name;
    e.sym = make_symbol(c.equation);
    e.grid = SpectralGrid(c.grid.n, c.grid.length);
    e.initial = c.initial;
    e.solver = make_solver_config(c.time);
    e.diag = c.diagnostics;
    return e;
  }

  Field u0() const { return make_initial(initial, grid); }
};

// Plot-ready output of an experiment: one CSV table plus a JSON summary whose
// "checks" object maps property names to pass/fail.
struct ExperimentResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json summary = json::object();

  void check(const std::string& property, bool ok) { summary["checks"][property] = ok; }

  bool passed() const {
    if (!summary.contains("checks")) return true;
    for (auto it = summary["checks"].begin(); it != summary["checks"].end(); ++it)
      if (!it.value().get<bool>()) return false;
    return true;
  }

  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    if (!summary.contains("checks")) return out;
    for (auto it = summary["checks"].begin(); it != summary["checks"].end(); ++it)
      if (!it.value().get<bool>()) out.push_back(it.key());
    return out;
  }
};

// ---------------------------------------------------------------- difference / Lipschitz

// ||w||_{Hbar^sigma} = (sum_N <1/N>^2 <N>^{2 sigma} ||P_N w||^2)^{1/2} over the homogeneous ladder.
inline double hbar_norm(const Field& w, double sigma) {
  const auto ladder = lp::DyadicLadder::for_grid(w.grid(), true);
  double acc = 0.0;
  for (double N : ladder.scales())
    acc += bracket_inv_sq(N) * std::pow(jbracket(N), 2.0 * sigma) * mass(lp::project(w, N));
  return std::sqrt(acc);
}

// Fixed perturbation profile, unit Hbar^sigma norm.
inline Field perturbation_profile(const SpectralGrid& g, double sigma, unsigned long long seed) {
  Field p = random_field(g, seed ^ 0x9e3779b97f4a7c15ULL, std::min(16, g.dealias_cutoff()), 1.0);
  p *= 1.0 / hbar_norm(p, sigma);
  return p;
}

struct ResidualSample {
  double h = 0.0;
  double residual = 0.0;  // ||D_t w + L w - (z w)_x||_{L^2} / ||D_t w||_{L^2}
};

// Central difference of w at t_star from one forward and one backward step of
// size h taken from (u, v)(t_star); both runs advanced to t_star with step h.
inline ResidualSample difference_residual(const Field& u0, const Field& v0, const DispersionSymbol& sym,
                                          const SolverConfig& base, double t_star, double h) {
  const auto& g = u0.grid();
  SolverConfig c = base;
  c.dt = h;
  c.t_final = t_star;
  const Field u = evolve(u0, sym, c);
  const Field v = evolve(v0, sym, c);
  const Integrator fwd(g, sym, base.scheme, h, base.dealias, base.nonlinear);
  const Integrator bwd(g, sym, base.scheme, -h, base.dealias, base.nonlinear);
  Field dw = (fwd.step(u) - fwd.step(v)) - (bwd.step(u) - bwd.step(v));
  dw *= 1.0 / (2.0 * h);

  const Field w = u - v;
  const Field z = u + v;
  Field rhs = apply_multiplier(w, [&](double xi) { return cplx(0.0, -sym.omega(xi)); });
  if (base.nonlinear) {
    Field zw = base.dealias ? dealiased_product(z, w) : grid_product(z, w);
    rhs += derivative(zw);
  }
  const double denom = l2_norm(dw);
  return {h, denom > 0.0 ? l2_norm(dw - rhs) / denom : 0.0};
}

// u from u0, v from u0 + eps p. Table rows: eps, t, ratio, hbar_w.
inline ExperimentResult difference_experiment(const ExperimentSpec& spec, const std::vector<double>& epsilons,
                                              double t_prime) {
  const auto& sym = spec.sym;
  const double s = spec.diag.s, sigma = spec.diag.sigma;
  require_sigma(sigma, s, sym.alpha());
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1])) throw ConfigError("experiment.epsilons must be decreasing");
  for (double e : epsilons)
    if (!(e >= 0.0)) throw ConfigError("experiment.epsilons must be nonnegative");
  SolverConfig cfg = spec.solver;
  cfg.t_final = t_prime;
  cfg.validate();

  const Field u0 = spec.u0();
  const Field p = perturbation_profile(spec.grid, sigma, spec.initial.seed);

  ExperimentResult out;
  out.columns = {"epsilon", "t", "ratio", "hbar_w"};
  out.summary["experiment"] = "difference";
  out.summary["sigma"] = sigma;
  out.summary["s"] = s;
  out.summary["t_prime"] = t_prime;

  const auto ur = run(u0, sym, cfg);
  json per_eps = json::array();
  std::vector<double> max_ratios;
  bool truncated = ur.blew_up;
  for (double eps : epsilons) {
    json row = {{"epsilon", eps}};
    if (eps == 0.0) {
      for (double t : ur.record.times()) out.rows.push_back({eps, t, 1.0, 0.0});
      row["max_ratio"] = 1.0;
      per_eps.push_back(row);
      continue;
    }
    Field v0 = p;
    v0 *= eps;
    v0 += u0;
    const auto vr = run(v0, sym, cfg);
    truncated = truncated || vr.blew_up;
    const std::size_t m = std::min(ur.record.size(), vr.record.size());
    const double w0 = hbar_norm(ur.record[0] - vr.record[0], sigma);
    double mx = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double wn = hbar_norm(ur.record[j] - vr.record[j], sigma);
      const double r = wn / w0;
      mx = std::max(mx, r);
      out.rows.push_back({eps, ur.record.times()[j], r, wn});
    }
    max_ratios.push_back(mx);
    row["max_ratio"] = mx;
    row["final_ratio"] = m ? hbar_norm(ur.record[m - 1] - vr.record[m - 1], sigma) / w0 : 0.0;
    per_eps.push_back(row);
  }
  out.summary["per_epsilon"] = per_eps;
  out.summary["truncated"] = truncated;

  // residual order at t* = T'/2 with the largest nonzero epsilon
  double eps_r = 0.0;
  for (double e : epsilons) eps_r = std::max(eps_r, e);
  if (eps_r > 0.0) {
    Field v0 = p;
    v0 *= eps_r;
    v0 += u0;
    const double t_star = 0.5 * t_prime;
    const auto a = difference_residual(u0, v0, sym, cfg, t_star, cfg.dt);
    const auto b = difference_residual(u0, v0, sym, cfg, t_star, cfg.dt / 2.0);
    const double order = std::log2(a.residual / b.residual);
    out.summary["residual"] = {{"epsilon", eps_r},       {"t_star", t_star},          {"dt", a.h},
                               {"residual_dt", a.residual}, {"residual_dt_half", b.residual}, {"order", order}};
    out.check("residual_order_2", order >= 1.7 && order <= 2.3);
  }
  if (!max_ratios.empty()) {
    const auto [lo, hi] = std::minmax_element(max_ratios.begin(), max_ratios.end());
    out.summary["ratio_spread"] = *hi / *lo - 1.0;
    out.check("ratio_bounded_by_10", *hi <= 10.0);
    out.check("ratio_stable_50pct", *hi / *lo - 1.0 < 0.5);
  }
  out.check("no_blow_up", !truncated);
  return out;
}

// ---------------------------------------------------------------- modified energy drift

// Signed corrector sum_{N in scales} <N>^{2s} E1_N(u).
inline double weighted_corrector(const Field& u, const DispersionSymbol& sym, double s,
                                 const std::vector<double>& scales) {
  double acc = 0.0;
  for (double N : scales) acc += std::pow(jbracket(N), 2.0 * s) * e1_term(u, sym, N, s).value;
  return acc;
}

// d/dt of the same quantity along u_t = -L u + (u^2)_x, by trilinearity.
inline double weighted_corrector_rate(const Field& u, const DispersionSymbol& sym, double s,
                                      const std::vector<double>& scales, bool dealias = true,
                                      bool nonlinear = true) {
  Field ut = apply_multiplier(u, [&](double xi) { return cplx(0.0, -sym.omega(xi)); });
  if (nonlinear) ut += derivative(dealias ? dealiased_square(u) : grid_product(u, u));
  double acc = 0.0;
  for (double N : scales) {
    const auto S = chi1_over_omega2(sym, N, s);
    const auto w1 = [](double x1, double) { return x1; };
    const Field a = lp::project_band(u, lp::Band::ll, N), at = lp::project_band(ut, lp::Band::ll, N);
    const Field b = lp::project_band(u, lp::Band::sim, N), bt = lp::project_band(ut, lp::Band::sim, N);
    const double d = corrector_sum(S, w1, at, b, b).value + corrector_sum(S, w1, a, bt, b).value +
                     corrector_sum(S, w1, a, b, bt).value;
    acc += std::pow(jbracket(N), 2.0 * s) * d;
  }
  return acc;
}

struct ChainRuleCheck {
  double t = 0.0;
  double analytic = 0.0;
  std::vector<double> deltas, fd, errors, rates;
  bool pass = false;
};

// Central differences of the weighted corrector over scales N >= 2, from single
// steps of size +-delta; errors should shrink like delta^2.
inline ChainRuleCheck chain_rule_check(const Field& u, const DispersionSymbol& sym, double s,
                                       const std::vector<double>& deltas, Scheme scheme = Scheme::ifrk4,
                                       bool dealias = true, bool nonlinear = true) {
  if (deltas.size() < 2) throw ConfigError("chain-rule check needs at least two deltas");
  std::vector<double> scales;
  for (double N : lp::DyadicLadder::for_grid(u.grid(), false).scales())
    if (N >= 2.0) scales.push_back(N);
  ChainRuleCheck c;
  c.analytic = weighted_corrector_rate(u, sym, s, scales, dealias, nonlinear);
  for (double d : deltas) {
    const Integrator fwd(u.grid(), sym, scheme, d, dealias, nonlinear);
    const Integrator bwd(u.grid(), sym, scheme, -d, dealias, nonlinear);
    const double fd = (weighted_corrector(fwd.step(u), sym, s, scales) -
                       weighted_corrector(bwd.step(u), sym, s, scales)) /
                      (2.0 * d);
    c.deltas.push_back(d);
    c.fd.push_back(fd);
    c.errors.push_back(std::abs(fd - c.analytic));
  }
  c.pass = c.analytic != 0.0;
  for (std::size_t i = 1; i < c.errors.size(); ++i) {
    const double r = std::log(c.errors[i - 1] / c.errors[i]) / std::log(c.deltas[i - 1] / c.deltas[i]);
    c.rates.push_back(r);
    c.pass = c.pass && r >= 1.7 && r <= 2.3;
  }
  return c;
}

// Table rows: t, modified, plain, modified_drift, plain_drift.
inline ExperimentResult modified_energy_drift(const ExperimentSpec& spec, const std::vector<double>& deltas) {
  const auto& sym = spec.sym;
  const double s = spec.diag.s;
  if (!(s > lwp_threshold(sym.alpha())))
    throw ConfigError("modified_energy_drift needs s > 3/2 - 5 alpha/4");
  Diagnostics d{true, s, spec.diag.n0, spec.diag.every};
  const Field u0 = spec.u0();
  const auto res = run(u0, sym, spec.solver, d);

  ExperimentResult out;
  out.columns = {"t", "modified_energy", "plain_energy", "modified_drift", "plain_drift"};
  out.summary["experiment"] = "drift";
  const auto& r0 = res.reports.front();
  double max_mod = 0.0, max_plain = 0.0;
  for (const auto& r : res.reports) {
    const double dm = std::abs(r.modified - r0.modified);
    const double dp = std::abs(r.plain_sum - r0.plain_sum);
    max_mod = std::max(max_mod, dm);
    max_plain = std::max(max_plain, dp);
    out.rows.push_back({r.t, r.modified, r.plain_sum, dm, dp});
  }
  out.summary["max_modified_drift"] = max_mod;
  out.summary["max_plain_drift"] = max_plain;
  out.summary["blew_up"] = res.blew_up;

  const std::size_t mid = res.record.size() / 2;
  const auto cr = chain_rule_check(res.record[mid], sym, s, deltas, spec.solver.scheme, spec.solver.dealias,
                                   spec.solver.nonlinear);
  out.summary["chain_rule"] = {{"t", res.record.times()[mid]}, {"analytic", cr.analytic}, {"deltas", cr.deltas},
                               {"fd", cr.fd},                  {"errors", cr.errors},     {"rates", cr.rates}};
  out.check("chain_rule_rate_2", cr.pass);
  out.check("no_blow_up", !res.blew_up);
  return out;
}

// ---------------------------------------------------------------- X^{s,b} and Strichartz proxies

// (L dt / M) sum_{k, m} <xi_k>^{2s} <tau_m - omega(xi_k)>^{2b} |X_{k,m}|^2, counting
// -k through the factor 2 for k > 0. With s = b = 0 this is Parseval for the
// windowed record, dt sum_j ||w_j u(t_j)||^2.
inline double xsb_norm(const TrajectoryRecord& r, const DispersionSymbol& sym, double s, double b,
                       bool window = true) {
  if (r.size() < 2) throw ConfigError("xsb_norm: need at least two snapshots");
  const auto S = spacetime_transform(r, window);
  const auto& g = r.grid();
  double acc = 0.0;
  for (int k = 0; k <= g.kmax(); ++k) {
    const double ws = (k == 0 ? 1.0 : 2.0) * std::pow(jbracket(g.frequency(k)), 2.0 * s);
    for (std::size_t m = 0; m < S.samples(); ++m) {
      const double wb = b == 0.0 ? 1.0 : std::pow(jbracket(S.modulation(sym, k, m)), 2.0 * b);
      acc += ws * wb * std::norm(S.at(k, m));
    }
  }
  return std::sqrt(g.length() * S.dt() / static_cast<double>(S.samples()) * acc);
}

// ||P_N D^{(alpha-1)/4} U(t) u0||_{L^4_t([0,1]) L^inf_x} / ||P_N u0||_{L^2}; the
// sup in x is taken on an `oversample`-times finer grid, the time integral by the
// trapezoid rule on time_samples + 1 points. Returns NaN for an empty band.
inline double strichartz_ratio(const DispersionSymbol& sym, const Field& u0, double N, int time_samples = 256,
                               int oversample = 8) {
  if (time_samples < 2 || oversample < 1) throw ConfigError("strichartz_ratio: bad sampling parameters");
  const auto& g = u0.grid();
  const Field pu = lp::project(u0, N);
  const double den = l2_norm(pu);
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double a = sym.alpha();
  const SpectralGrid fine(g.n() * oversample, g.length());
  double acc = 0.0;
  for (int j = 0; j <= time_samples; ++j) {
    const double t = static_cast<double>(j) / time_samples;
    Field f(fine);
    for (int k = 1; k <= g.kmax(); ++k) {
      const double xi = g.frequency(k);
      f.set(k, pu.coeff(k) * std::pow(std::abs(xi), (a - 1.0) / 4.0) * std::polar(1.0, -sym.omega(xi) * t));
    }
    double sup = 0.0;
    for (double x : f.samples()) sup = std::max(sup, std::abs(x));
    const double wq = (j == 0 || j == time_samples) ? 0.5 : 1.0;
    acc += wq * std::pow(sup, 4.0) / time_samples;
  }
  return std::pow(acc, 0.25) / den;
}

// ---------------------------------------------------------------- convergence

struct ConvergenceReport {
  std::vector<double> dts, errors, slopes;
  double reference_dt = 0.0;
  double linear_phase_error = 0.0;
};

// Self-convergence against a run with dt_min / refinement; L^2 errors at t_final.
inline ConvergenceReport convergence_study(const Field& u0, const DispersionSymbol& sym, const SolverConfig& base,
                                           std::vector<double> dts, int refinement) {
  if (dts.size() < 2) throw ConfigError("convergence.dts needs at least two entries");
  if (refinement < 2) throw ConfigError("convergence.reference_refinement must be >= 2");
  std::sort(dts.begin(), dts.end(), std::greater<>());
  ConvergenceReport r;
  r.dts = dts;
  SolverConfig c = base;
  c.dt = dts.back() / refinement;
  r.reference_dt = c.dt;
  const Field ref = evolve(u0, sym, c);
  for (double dt : dts) {
    c.dt = dt;
    r.errors.push_back(l2_norm(evolve(u0, sym, c) - ref));
  }
  for (std::size_t i = 1; i < dts.size(); ++i)
    r.slopes.push_back(std::log(r.errors[i - 1] / r.errors[i]) / std::log(dts[i - 1] / dts[i]));

  // linear part only, against c_k exp(-i omega t)
  c = base;
  c.nonlinear = false;
  const Field lin = evolve(u0, sym, c);
  const double t = c.steps() * c.dt;
  const Field exact = apply_multiplier(u0, [&](double xi) { return std::polar(1.0, -sym.omega(xi) * t); });
  const double scale = std::max(u0.max_abs_coeff(), 1e-300);
  for (int k = 0; k < u0.grid().half_size(); ++k)
    r.linear_phase_error = std::max(r.linear_phase_error, std::abs(lin.coeff(k) - exact.coeff(k)) / scale);
  return r;
}

}  // namespace dbl
