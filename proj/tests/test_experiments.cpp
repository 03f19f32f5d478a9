#include <gtest/gtest.h>

#include <filesystem>

#include "dbl/config.hpp"
#include "dbl/experiments.hpp"

using namespace dbl;
using json = nlohmann::json;

namespace {

json minimal(const std::string& type = "pure_power", double alpha = 1.0) {
  return {{"equation", {{"type", type}, {"alpha", alpha}}}};
}

ExperimentSpec spec_from(const json& j) { return ExperimentSpec::from_config(parse_config(j, "test")); }

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse_config(minimal(), "simulate");
  EXPECT_EQ(c.grid.n, 256);
  EXPECT_NEAR(c.grid.length, 2 * kPi, 1e-15);
  EXPECT_EQ(c.time.scheme, "ifrk4");
  EXPECT_DOUBLE_EQ(c.diagnostics.s, 0.3);
  EXPECT_NEAR(c.diagnostics.sigma, -0.225, 1e-15);
  EXPECT_EQ(std::filesystem::path(c.output_dir).filename(), "simulate");
  // alpha = 1/2 raises the default s above the threshold 7/8
  EXPECT_NEAR(parse_config(minimal("pure_power", 0.5), "x").diagnostics.s, 0.925, 1e-15);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config(json{{"equation", {{"type", "pure_power"}}}}, "x"), ConfigError);
  EXPECT_THROW(parse_config(json::object(), "x"), ConfigError);
  auto j = minimal();
  j["grid"] = {{"n", 256}, {"lenght", 1.0}};
  EXPECT_THROW(parse_config(j, "x"), ConfigError);
  j = minimal();
  j["grid"] = {{"n", "many"}};
  EXPECT_THROW(parse_config(j, "x"), ConfigError);
  EXPECT_THROW(parse_config(minimal("whitham", 1.0), "x"), ConfigError);
  EXPECT_THROW(parse_config(minimal("ilw", 0.5), "x"), ConfigError);
  j = minimal();
  j["time"] = {{"dt", 0.3}};
  EXPECT_THROW(parse_config(j, "x"), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  auto j = minimal("ilw", 1.0);
  j["initial"] = {{"kind", "modes"}, {"amplitude", 0.2}, {"params", {{"modes", {{1, 1.0, 0.5}, {3, 0.5}}}}}};
  j["time"] = {{"dt", 2e-3}, {"t_final", 0.5}};
  const auto c = parse_config(j, "x");
  const json echo = to_json(c);
  EXPECT_EQ(to_json(parse_config(echo, "x")), echo);
}

TEST(Initial, Kinds) {
  const SpectralGrid g(64);
  InitialConfig ic;
  ic.amplitude = 0.2;
  EXPECT_EQ(make_initial(ic, g).coeff(1), cplx(0.1));
  ic.kind = "modes";
  ic.params = {{"modes", {{2, 1.0, kPi / 2}}}};
  EXPECT_NEAR(std::abs(make_initial(ic, g).coeff(2) - cplx(0.0, 0.1)), 0.0, 1e-16);
  ic.kind = "gaussian";
  ic.params = {{"mean_free", true}};
  const Field gauss = make_initial(ic, g);
  EXPECT_EQ(gauss.coeff(0), cplx{});
  EXPECT_EQ(gauss.coeff(g.dealias_cutoff() + 1), cplx{});
  ic.kind = "random_hs";
  ic.params = {{"s", 0.5}, {"kmax", 10}};
  EXPECT_NEAR(sobolev_norm(make_initial(ic, g), 0.5), 0.2, 1e-15);
  ic.params = {{"wavelength", 3}};
  EXPECT_THROW(make_initial(ic, g), ConfigError);
  ic.kind = "cosine";
  ic.params = {{"mode", 40}};
  EXPECT_THROW(make_initial(ic, g), ConfigError);
  ic.kind = "triangle";
  EXPECT_THROW(make_initial(ic, g), ConfigError);
}

TEST(Difference, ZeroEpsilonGivesUnitRatio) {
  auto j = minimal();
  j["grid"] = {{"n", 64}};
  j["time"] = {{"dt", 1e-3}, {"t_final", 0.5}, {"record_every", 50}};
  const auto res = difference_experiment(spec_from(j), {0.0}, 0.2);
  ASSERT_FALSE(res.rows.empty());
  for (const auto& r : res.rows) EXPECT_EQ(r[2], 1.0);
}

TEST(Difference, HbarNormOfSingleMode) {
  const SpectralGrid g(64);
  Field w(g);
  w.set(8, 0.5);
  // only phi_8 sees xi = 8
  const double want = std::sqrt(bracket_inv_sq(8) * std::pow(jbracket(8), -0.4) * kPi);
  EXPECT_NEAR(hbar_norm(w, -0.2), want, 1e-14);
  EXPECT_NEAR(hbar_norm(perturbation_profile(g, -0.2, 3), -0.2), 1.0, 1e-14);
}

TEST(Xsb, ZeroRecordAndParseval) {
  const SpectralGrid g(32);
  const auto sym = DispersionSymbol::pure_power(1.0);
  TrajectoryRecord zero(g);
  for (int j = 0; j < 16; ++j) zero.append(0.1 * j, Field(g));
  EXPECT_EQ(xsb_norm(zero, sym, 0.5, 0.5), 0.0);

  TrajectoryRecord r(g);
  for (int j = 0; j < 64; ++j) r.append(0.05 * j, random_field(g, 50 + j, 10, 0.0));
  const auto w = raised_cosine_window(64);
  double direct = 0.0;
  for (int j = 0; j < 64; ++j) direct += 0.05 * w[j] * w[j] * mass(r[j]);
  EXPECT_NEAR(xsb_norm(r, sym, 0.0, 0.0), std::sqrt(direct), 1e-13 * std::sqrt(direct));
  EXPECT_GT(xsb_norm(r, sym, 0.5, 0.5), xsb_norm(r, sym, 0.0, 0.0));
}

TEST(Strichartz, SingleModeRatio) {
  const SpectralGrid g(64);
  for (double alpha : {0.5, 1.0}) {
    const auto sym = DispersionSymbol::pure_power(alpha);
    Field u0(g);
    u0.set(8, 0.5);
    const double want = std::pow(8.0, (alpha - 1.0) / 4.0) / std::sqrt(kPi);
    EXPECT_NEAR(strichartz_ratio(sym, u0, 8.0), want, 2e-3 * want) << alpha;
    EXPECT_TRUE(std::isnan(strichartz_ratio(sym, u0, 32.0)));
  }
}

TEST(Drift, SingleModeHasNoCorrector) {
  const SpectralGrid g(256);
  Field u(g);
  u.set(40, 0.05);
  const auto sym = DispersionSymbol::pure_power(1.0);
  EXPECT_EQ(weighted_corrector(u, sym, 0.3, {32, 64}), 0.0);
  EXPECT_EQ(weighted_corrector_rate(u, sym, 0.3, {32, 64}), 0.0);
}

TEST(Drift, ChainRuleIsSecondOrder) {
  const SpectralGrid g(256);
  const Field u = random_field(g, 3, 84, 1.0, 0.3, 0.3);
  const auto cr = chain_rule_check(u, DispersionSymbol::pure_power(1.0), 0.3, {4e-4, 2e-4, 1e-4});
  EXPECT_TRUE(cr.pass);
  for (double r : cr.rates) EXPECT_NEAR(r, 2.0, 0.1);
}

TEST(Convergence, LinearPhaseExactAndFourthOrder) {
  const SpectralGrid g(64);
  Field u0(g);
  u0.set(1, 0.5);
  SolverConfig base;
  base.dt = 1e-3;
  base.t_final = 0.5;
  const auto rep = convergence_study(u0, DispersionSymbol::pure_power(1.0), base, {4e-3, 2e-3, 1e-3}, 8);
  EXPECT_LT(rep.linear_phase_error, 1e-12);
  for (double s : rep.slopes) {
    EXPECT_GT(s, 3.7);
    EXPECT_LT(s, 4.3);
  }
}
