#pragma once

// Subcommands. Each takes a resolved RunConfig and returns an ExperimentResult;
// dispatch() adds config loading, output writing and the exit-code contract
// (0 ok, 1 configuration error, 2 failed check).

#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbl/config.hpp"
#include "dbl/dispersion.hpp"
#include "dbl/energies.hpp"
#include "dbl/experiments.hpp"
#include "dbl/io.hpp"
#include "dbl/multipliers.hpp"
#include "dbl/resonance.hpp"
#include "dbl/solver.hpp"

namespace dbl::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- simulate

inline ExperimentResult cmd_simulate(const RunConfig& c) {
  const auto spec = ExperimentSpec::from_config(c);
  const Field u0 = spec.u0();
  const fs::path dir(c.output_dir);
  io::ensure_dir(dir / "snapshots");

  std::ofstream jsonl = io::open_out(dir / "energies.jsonl");
  Diagnostics d{true, c.diagnostics.s, c.diagnostics.n0, c.diagnostics.every};
  const auto res = run(u0, spec.sym, spec.solver, d, [&](std::size_t i, double t, const Field& u, const EnergyReport* r) {
    char name[32];
    std::snprintf(name, sizeof name, "u_%05zu.csv", i);
    io::write_field_csv(dir / "snapshots" / name, u, t);
    if (r) jsonl << io::to_json(*r).dump() << '\n';
  });

  ExperimentResult out;
  out.columns = {"t", "mass", "hamiltonian", "hs_norm", "modified_energy", "corrector_share", "guard_skips"};
  for (const auto& r : res.reports)
    out.rows.push_back({r.t, r.mass, r.hamiltonian, r.hs_norm, r.modified, r.corrector_share,
                        static_cast<double>(r.guard_skips)});
  const auto& a = res.reports.front();
  const auto& b = res.reports.back();
  const auto rel = [](double x, double y) { return y != 0.0 ? std::abs(x - y) / std::abs(y) : std::abs(x); };
  out.summary["mass_rel_drift"] = rel(b.mass, a.mass);
  out.summary["hamiltonian_rel_drift"] = rel(b.hamiltonian, a.hamiltonian);
  out.summary["blew_up"] = res.blew_up;
  out.summary["last_valid_time"] = res.last_valid_time;
  out.summary["snapshots"] = res.record.size();
  out.check("no_blow_up", !res.blew_up);
  if (!spec.solver.nonlinear) {
    // the free flow is unitary on each block; the corrector part is only reported
    double total = 0.0, plain = 0.0, modified = 0.0;
    for (const auto& t : a.per_n) total += t.plain;
    const double scale = total > 0.0 ? total : 1.0;
    for (const auto& r : res.reports)
      for (std::size_t k = 0; k < r.per_n.size() && k < a.per_n.size(); ++k) {
        plain = std::max(plain, std::abs(r.per_n[k].plain - a.per_n[k].plain) / scale);
        modified = std::max(modified, std::abs(r.per_n[k].value - a.per_n[k].value) / scale);
      }
    out.summary["linear_block_energy_variation"] = plain;
    out.summary["linear_modified_energy_variation"] = modified;
    out.check("linear_block_energy_constant", plain <= 1e-10);
  }
  return out;
}

// ---------------------------------------------------------------- check-symbol

inline ExperimentResult cmd_check_symbol(const RunConfig& c) {
  const auto sym = make_symbol(c.equation);
  const auto& sc = c.symbol_check;
  const auto rep = check_hypothesis1(sym, sc.xi_min, sc.xi_max, sc.beta_max, sc.samples);
  ExperimentResult out;
  out.columns = {"xi"};
  for (const auto& b : rep.betas) out.columns.push_back("ratio_beta" + std::to_string(b.beta));
  for (std::size_t i = 0; i < rep.xi.size(); ++i) {
    std::vector<double> row{rep.xi[i]};
    for (const auto& b : rep.betas) row.push_back(b.ratio[i]);
    out.rows.push_back(row);
  }
  json betas = json::array();
  bool h1 = true;
  for (const auto& b : rep.betas) {
    betas.push_back({{"beta", b.beta}, {"min", b.min}, {"max", b.max}, {"pass", b.pass}});
    if (b.beta <= 2) h1 = h1 && b.pass;
  }
  out.summary["symbol"] = to_string(sym.kind());
  out.summary["alpha"] = sym.alpha();
  out.summary["window"] = {rep.window_lo, rep.window_hi};
  out.summary["betas"] = betas;
  out.summary["hyp2"] = {{"sup", rep.hyp2.sup}, {"argsup", rep.hyp2.argsup}, {"pass", rep.hyp2.pass}};
  out.check("hypothesis1", h1);
  out.check("hyp2", rep.hyp2.pass);
  if (sym.kind() == SymbolKind::ilw) {
    const double r = std::abs(sym.omega(50.0)) / 2500.0;
    out.summary["ilw_high_frequency_ratio_50"] = r;
    out.check("ilw_high_frequency", r >= 0.99 && r <= 1.01);
  }
  return out;
}

// ---------------------------------------------------------------- check-resonance

// Largest relative residual of the Omega3 decomposition over n random triples.
inline double omega3_decomposition_max(const DispersionSymbol& sym, long long n, double lo, double hi,
                                       unsigned long long seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (long long i = 0; i < n; ++i) {
    double x[3];
    for (double& v : x) v = detail::log_uniform(rng, lo, hi) * detail::random_sign(rng);
    worst = std::max(worst, omega3_decomposition_residual(sym, x[0], x[1], x[2]));
  }
  return worst;
}

inline ExperimentResult cmd_check_resonance(const RunConfig& c) {
  const auto sym = make_symbol(c.equation);
  const auto& r = c.resonance;
  ExperimentResult out;
  out.columns = {"test", "n_samples", "rejected", "ratio_min", "ratio_max", "spread"};
  json tests = json::array();
  auto add = [&](int id, const std::string& name, const ComparabilityReport& rep) {
    out.rows.push_back({static_cast<double>(id), static_cast<double>(rep.n_samples), static_cast<double>(rep.rejected),
                        rep.ratio_min, rep.ratio_max, rep.spread()});
    tests.push_back({{"test", name},
                     {"id", id},
                     {"n_samples", rep.n_samples},
                     {"rejected", rep.rejected},
                     {"ratio_min", rep.ratio_min},
                     {"ratio_max", rep.ratio_max},
                     {"spread", rep.spread()}});
  };
  const auto r2 = verify_res2(sym, r.n_samples, r.scale_min, r.scale_max, r.seed);
  add(0, "res2", r2);
  out.check("res2_spread_le_50", r2.spread() <= 50.0);
  if (sym.kind() == SymbolKind::pure_power && sym.alpha() == 1.0) {
    const auto ss = verify_res2(sym, r.n_samples, r.scale_min, r.scale_max, r.seed + 1, true);
    add(1, "res2_same_sign", ss);
    out.check("res2_same_sign_closed_form", ss.ratio_min >= 1.0 - 1e-12 && ss.ratio_max <= 2.0 + 1e-12);
  }
  const auto r3 = verify_res3(sym, r.n_samples, r.scale_min, r.scale_max, r.separation, r.seed + 2);
  add(2, "res3", r3);
  out.check("res3_spread_le_50", r3.spread() <= 50.0);
  const double dec = omega3_decomposition_max(sym, r.n_samples, r.scale_min, r.scale_max, r.seed + 3);
  out.summary["omega3_decomposition_max_residual"] = dec;
  out.check("omega3_decomposition", dec <= 1e-12);
  out.summary["tests"] = tests;
  out.summary["test_ids"] = {{"0", "res2"}, {"1", "res2_same_sign"}, {"2", "res3"}};
  return out;
}

// ---------------------------------------------------------------- check-multiplier

// exp(i (a xi1 / M1 + b xi2 / M2)) / (1 + c (xi1 / M2)^2): smooth, passes the
// Marcinkiewicz bound on boxes of scale (M1, M2) for a, b, c in [0, 1].
inline MultiplierSymbol smooth_test_symbol(double a, double b, double c, double M1, double M2) {
  return MultiplierSymbol(
      2,
      [=](std::span<const double> x) {
        const double q = x[0] / M2;
        return std::polar(1.0, a * x[0] / M1 + b * x[1] / M2) / (1.0 + c * q * q);
      },
      "smooth");
}

inline std::vector<Box> signed_boxes(double N1, double N2) {
  std::vector<Box> out;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) out.push_back(dyadic_box({N1, N2}, {s1, s2}));
  return out;
}

inline json to_json(const MarcinkiewiczReport& r) {
  json e = json::array();
  for (const auto& x : r.entries) e.push_back({{"beta", x.beta}, {"max_normalized", x.max_normalized}});
  return {{"pass", r.pass}, {"window", r.window}, {"worst", r.worst()}, {"entries", e}};
}

inline ExperimentResult cmd_check_multiplier(const RunConfig& c) {
  const auto sym = make_symbol(c.equation);
  const auto& m = c.multiplier;
  lp::require_dyadic(m.N, "multiplier.N");
  if (m.N < 64.0) throw ConfigError("multiplier.N must be >= 64 so that the low band holds a dyadic box");
  const SpectralGrid g(c.grid.n, c.grid.length);
  ExperimentResult out;
  out.columns = {"seed", "commutator_residual"};

  // commutator identity on random fields
  double worst = 0.0;
  for (int i = 0; i < m.seeds; ++i) {
    const unsigned long long seed = c.initial.seed + static_cast<unsigned long long>(i);
    const Field u = random_field(g, seed, std::min(g.kmax(), static_cast<int>(3 * m.N)), 0.5);
    const double r = commutator_residual(u, m.N);
    worst = std::max(worst, r);
    out.rows.push_back({static_cast<double>(seed), r});
  }
  out.summary["commutator_max_residual"] = worst;
  out.check("commutator_identity", worst < 1e-8);

  const double N1 = 2.0;
  const auto tp = check_marcinkiewicz(symbol_tensor_phi(N1, m.N), signed_boxes(N1, m.N), m.beta_max, 32, m.window);
  out.summary["tensor_phi"] = to_json(tp);
  out.check("tensor_phi", tp.pass);

  // product closure on random pairs that pass individually
  std::mt19937_64 rng(c.initial.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  json pairs = json::array();
  bool closure = true;
  const auto boxes = signed_boxes(N1, m.N);
  for (int i = 0; i < 5; ++i) {
    const auto A = smooth_test_symbol(U(rng), U(rng), U(rng), N1, m.N);
    const auto B = smooth_test_symbol(U(rng), U(rng), U(rng), N1, m.N);
    const auto ra = check_marcinkiewicz(A, boxes, m.beta_max, 32, m.window);
    const auto rb = check_marcinkiewicz(B, boxes, m.beta_max, 32, m.window);
    const auto rp = check_marcinkiewicz(A * B, boxes, m.beta_max, 32, m.window);
    closure = closure && ra.pass && rb.pass && rp.pass;
    pairs.push_back({{"a_worst", ra.worst()}, {"b_worst", rb.worst()}, {"product_worst", rp.worst()}});
  }
  out.summary["product_closure"] = pairs;
  out.check("product_closure", closure);

  // N1 N^alpha chi1/Omega2 on (N1 << N, ~N) boxes; N1 ranges over dyadic scales up to N/32
  json norm = json::array();
  bool norm_pass = true;
  for (double n1 = 1.0; n1 <= m.N / 32.0; n1 *= 2.0) {
    const auto chi = symbol_chi1_over_omega2_normalized(sym, m.N, c.diagnostics.s, n1);
    const auto r = check_marcinkiewicz(chi, signed_boxes(n1, m.N), m.beta_max, 32, m.window);
    norm_pass = norm_pass && r.pass;
    auto j = to_json(r);
    j["N1"] = n1;
    norm.push_back(j);
  }
  out.summary["chi1_over_omega2_normalized"] = norm;
  out.check("chi1_over_omega2_normalized", norm_pass);
  return out;
}

// ---------------------------------------------------------------- check-energy

inline ExperimentResult cmd_check_energy(const RunConfig& c) {
  const auto spec = ExperimentSpec::from_config(c);
  const auto& d = c.diagnostics;
  const Field u = spec.u0();
  // w from the same recipe with the next seed, so both live on the same scales
  InitialConfig wc = c.initial;
  wc.seed += 1;
  const Field w = make_initial(wc, spec.grid);

  auto rep = modified_energy(u, spec.sym, d.s, d.n0);
  const auto coer = coercivity_check(u, spec.sym, d.s, d.n0);
  const auto dcoer = difference_coercivity_check(u, w, spec.sym, d.s, d.sigma, d.n0);

  ExperimentResult out;
  out.columns = {"N", "plain", "corrector", "value"};
  for (const auto& t : rep.per_n) out.rows.push_back({t.N, t.plain, t.corrector, t.value});
  out.summary["energy"] = io::to_json(rep);
  out.summary["coercivity"] = io::to_json(coer);
  out.summary["difference_coercivity"] = io::to_json(dcoer);
  out.check("coercivity", coer.passed);
  out.check("difference_coercivity", dcoer.passed);
  return out;
}

// ---------------------------------------------------------------- experiment

inline ExperimentResult xsb_experiment(const RunConfig& c) {
  const auto spec = ExperimentSpec::from_config(c);
  const auto res = run(spec.u0(), spec.sym, spec.solver);
  if (res.blew_up) throw BlowUpError("xsb run blew up", res.last_valid_time);
  const auto& rec = res.record;
  const double s = c.diagnostics.s, b = c.diagnostics.b;
  ExperimentResult out;
  out.columns = {"s", "b", "norm"};
  for (double ss : {0.0, s})
    for (double bb : {0.0, b}) out.rows.push_back({ss, bb, xsb_norm(rec, spec.sym, ss, bb)});

  // s = b = 0 against the windowed space-time L^2 norm
  const auto w = raised_cosine_window(rec.size());
  const double dt = rec.uniform_step();
  double direct = 0.0;
  for (std::size_t j = 0; j < rec.size(); ++j) direct += dt * w[j] * w[j] * mass(rec[j]);
  direct = std::sqrt(direct);
  const double x00 = out.rows[0][2];
  const double rel = std::abs(x00 - direct) / std::max(direct, 1e-300);
  out.summary["label"] = "torus proxy, no inequality asserted";
  out.summary["l2_spacetime"] = direct;
  out.summary["parseval_rel_error"] = rel;
  out.check("xsb_b0_matches_l2", rel <= 1e-10);
  return out;
}

inline ExperimentResult strichartz_experiment(const RunConfig& c) {
  const auto spec = ExperimentSpec::from_config(c);
  const auto& x = c.experiment;
  ExperimentResult out;
  out.columns = {"N", "member", "ratio"};
  for (int e = 0; e < x.ensemble; ++e) {
    const Field u0 = random_field(spec.grid, c.initial.seed + static_cast<unsigned long long>(e), spec.grid.kmax(), 0.0);
    for (double N : x.scales) {
      lp::require_dyadic(N, "experiment.scales");
      const double r = strichartz_ratio(spec.sym, u0, N, x.time_samples, x.oversample);
      if (std::isnan(r)) continue;
      out.rows.push_back({N, static_cast<double>(e), r});
    }
  }
  out.summary["label"] = "torus proxy, no inequality asserted";
  return out;
}

inline ExperimentResult scaling_experiment(const RunConfig& c) {
  const auto spec = ExperimentSpec::from_config(c);
  const auto rep = scaling_check(spec.sym, c.experiment.lambda, spec.u0(), spec.solver);
  ExperimentResult out;
  out.columns = {"lambda", "max_rel_discrepancy", "critical_norm_u", "critical_norm_v", "critical_norm_rel_diff"};
  out.rows.push_back({rep.lambda, rep.max_rel_discrepancy, rep.critical_norm_u, rep.critical_norm_v,
                      rep.critical_norm_rel_diff});
  out.summary["compared_times"] = rep.compared_times;
  out.check("rescaled_solutions_agree", rep.max_rel_discrepancy < 1e-6);
  out.check("critical_norm_invariant", rep.critical_norm_rel_diff < 1e-10);
  return out;
}

inline ExperimentResult cmd_experiment(const RunConfig& c) {
  const auto& name = c.experiment.name;
  if (name == "difference")
    return difference_experiment(ExperimentSpec::from_config(c), c.experiment.epsilons, c.experiment.t_prime);
  if (name == "drift") return modified_energy_drift(ExperimentSpec::from_config(c), c.experiment.deltas);
  if (name == "xsb") return xsb_experiment(c);
  if (name == "strichartz") return strichartz_experiment(c);
  if (name == "scaling") return scaling_experiment(c);
  throw ConfigError("unknown experiment.name '" + name + "' (difference, drift, xsb, strichartz, scaling)");
}

// ---------------------------------------------------------------- convergence

inline ExperimentResult cmd_convergence(const RunConfig& c) {
  const auto spec = ExperimentSpec::from_config(c);
  const auto& v = c.convergence;
  const auto rep = convergence_study(spec.u0(), spec.sym, spec.solver, v.dts, v.reference_refinement);
  ExperimentResult out;
  out.columns = {"dt", "error"};
  for (std::size_t i = 0; i < rep.dts.size(); ++i) out.rows.push_back({rep.dts[i], rep.errors[i]});
  out.summary["reference_dt"] = rep.reference_dt;
  out.summary["slopes"] = rep.slopes;
  out.summary["linear_phase_error"] = rep.linear_phase_error;
  bool ok = true;
  for (double s : rep.slopes) ok = ok && s >= v.slope_min && s <= v.slope_max;
  out.check("temporal_order", ok);
  out.check("linear_phase_exact", rep.linear_phase_error <= 1e-12);
  return out;
}

// ---------------------------------------------------------------- dispatch

inline void write_outputs(const RunConfig& c, const ExperimentResult& r) {
  const fs::path dir(c.output_dir);
  io::ensure_dir(dir);
  io::write_json(dir / "spec.json", to_json(c));
  io::CsvWriter csv(dir / "results.csv", r.columns);
  for (const auto& row : r.rows) csv.row(row);
  json s = r.summary;
  s["passed"] = r.passed();
  io::write_json(dir / "summary.json", s);
}

using Command = ExperimentResult (*)(const RunConfig&);

struct CommandEntry {
  std::string name;
  std::string help;
  Command fn;
};

inline const std::vector<CommandEntry>& commands() {
  static const std::vector<CommandEntry> table = {
      {"simulate", "evolve initial data and record energies", cmd_simulate},
      {"check-symbol", "test the symbol derivative and range bounds", cmd_check_symbol},
      {"check-resonance", "sample two- and three-wave resonance ratios", cmd_check_resonance},
      {"check-multiplier", "commutator identity and Marcinkiewicz bounds", cmd_check_multiplier},
      {"check-energy", "modified energy coercivity and corrector rates", cmd_check_energy},
      {"experiment", "difference, drift, xsb, strichartz or scaling", cmd_experiment},
      {"convergence", "temporal order of the integrator", cmd_convergence},
  };
  return table;
}

inline RunConfig load_config(const std::string& path, const std::string& subcommand) {
  return parse_config(io::read_json_file(path), subcommand);
}

inline int dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"dispersive Burgers-type toolkit"};
  app.require_subcommand(1);
  std::string config_path, output_dir;
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands()) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("--config", config_path, "JSON config")->required();
    sc->add_option("--output", output_dir, "output directory (overrides output.dir)");
    subs.emplace_back(sc, fn);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 1;
  }

  for (const auto& [sc, fn] : subs) {
    if (!sc->parsed()) continue;
    const std::string name = sc->get_name();
    try {
      RunConfig cfg = load_config(config_path, name);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      const auto result = fn(cfg);
      write_outputs(cfg, result);
      if (!result.passed()) {
        for (const auto& f : result.failed()) err << "check failed: " << f << '\n';
        return 2;
      }
      out << name << ": ok (" << cfg.output_dir << ")\n";
      return 0;
    } catch (const BlowUpError& e) {
      err << "check failed: no_blow_up (" << e.what() << ")\n";
      return 2;
    } catch (const ConfigError& e) {
      err << "configuration error: " << e.what() << '\n';
      return 1;
    } catch (const DomainError& e) {
      err << "configuration error: " << e.what() << '\n';
      return 1;
    } catch (const json::exception& e) {
      err << "configuration error: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}

}  // namespace dbl::cli
