#include <gtest/gtest.h>

#include "dbl/solver.hpp"

using namespace dbl;

namespace {

Field small_data(const SpectralGrid& g) {
  Field f(g);
  f.set(1, 0.05);
  f.set(2, cplx(0.0, 0.025));
  f.set(3, 0.01);
  return f;
}

SolverConfig config(double dt, double t_final, Scheme scheme = Scheme::ifrk4) {
  SolverConfig c;
  c.scheme = scheme;
  c.dt = dt;
  c.t_final = t_final;
  c.record_every = 10;
  return c;
}

}  // namespace

TEST(SolverConfig, Validation) {
  EXPECT_THROW(config(0.0, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(1e-3, -1.0).validate(), ConfigError);
  EXPECT_THROW(config(0.3, 1.0).validate(), ConfigError);
  EXPECT_THROW(scheme_from_string("rk45"), ConfigError);
}

TEST(Solver, ConservesMassAndHamiltonian) {
  const SpectralGrid g(64);
  for (auto sym : {DispersionSymbol::pure_power(1.0), DispersionSymbol::whitham(1.0), DispersionSymbol::ilw()}) {
    const Field u0 = small_data(g);
    const Field u = evolve(u0, sym, config(1e-3, 1.0));
    EXPECT_NEAR(mass(u), mass(u0), 1e-12 * mass(u0)) << to_string(sym.kind());
    EXPECT_NEAR(hamiltonian(u, sym), hamiltonian(u0, sym), 1e-10 * std::abs(hamiltonian(u0, sym)))
        << to_string(sym.kind());
  }
}

TEST(Solver, MeanIsPreserved) {
  const SpectralGrid g(64);
  Field u0 = small_data(g);
  u0.set(0, 0.2);
  const Field u = evolve(u0, DispersionSymbol::pure_power(0.5), config(1e-3, 0.5));
  EXPECT_NEAR(u.coeff(0).real(), 0.2, 1e-15);
}

TEST(Solver, LinearModeHasExactPhase) {
  const SpectralGrid g(64);
  const auto sym = DispersionSymbol::pure_power(0.5);
  Field u0(g);
  u0.set(3, 0.5);
  auto c = config(0.01, 1.0);
  c.nonlinear = false;
  for (auto scheme : {Scheme::ifrk4, Scheme::etdrk4}) {
    c.scheme = scheme;
    const Field u = evolve(u0, sym, c);
    EXPECT_NEAR(std::abs(u.coeff(3) - 0.5 * std::polar(1.0, -sym.omega(3.0))), 0.0, 1e-14);
  }
}

TEST(Solver, Reversible) {
  const SpectralGrid g(64);
  const auto sym = DispersionSymbol::ilw();
  const Field u0 = small_data(g);
  const Integrator fwd(g, sym, Scheme::ifrk4, 1e-2), bwd(g, sym, Scheme::ifrk4, -1e-2);
  Field u = u0;
  for (int i = 0; i < 50; ++i) u = fwd.step(u);
  for (int i = 0; i < 50; ++i) u = bwd.step(u);
  EXPECT_LT(l2_norm(u - u0), 1e-9 * l2_norm(u0));
}

TEST(Solver, FourthOrder) {
  const SpectralGrid g(64);
  const auto sym = DispersionSymbol::pure_power(1.0);
  Field u0(g);
  u0.set(1, 0.5);
  for (auto scheme : {Scheme::ifrk4, Scheme::etdrk4}) {
    const Field ref = evolve(u0, sym, config(1e-3 / 8, 0.5, scheme));
    const double e1 = l2_norm(evolve(u0, sym, config(4e-3, 0.5, scheme)) - ref);
    const double e2 = l2_norm(evolve(u0, sym, config(2e-3, 0.5, scheme)) - ref);
    const double slope = std::log2(e1 / e2);
    EXPECT_GT(slope, 3.7) << to_string(scheme);
    EXPECT_LT(slope, 4.3) << to_string(scheme);
  }
}

TEST(Solver, SchemesAgree) {
  const SpectralGrid g(64);
  const auto sym = DispersionSymbol::whitham(1.0);
  const Field u0 = small_data(g);
  const Field a = evolve(u0, sym, config(1e-3, 0.5, Scheme::ifrk4));
  const Field b = evolve(u0, sym, config(1e-3, 0.5, Scheme::etdrk4));
  EXPECT_LT(l2_norm(a - b), 1e-10);
}

TEST(Solver, RunRecordsAtStride) {
  const SpectralGrid g(32);
  const auto res = run(small_data(g), DispersionSymbol::pure_power(1.0), config(1e-2, 1.0));
  EXPECT_EQ(res.record.size(), 11u);
  EXPECT_NEAR(res.record.times().back(), 1.0, 1e-12);
  EXPECT_FALSE(res.blew_up);
}

TEST(Solver, DetectsBlowUp) {
  // dt far above the stability limit of the explicit nonlinear stages
  const SpectralGrid g(64);
  Field u0(g);
  for (int k = 1; k <= 20; ++k) u0.set(k, 5.0);
  const auto res = run(u0, DispersionSymbol::pure_power(1.0), config(0.5, 100.0));
  EXPECT_TRUE(res.blew_up);
  EXPECT_THROW(evolve(u0, DispersionSymbol::pure_power(1.0), config(0.5, 100.0)), BlowUpError);
}

TEST(Scaling, LambdaOneIsTrivial) {
  const SpectralGrid g(64);
  const auto rep = scaling_check(DispersionSymbol::pure_power(0.5), 1.0, small_data(g), config(1e-3, 0.1));
  EXPECT_EQ(rep.max_rel_discrepancy, 0.0);
  EXPECT_EQ(rep.critical_norm_rel_diff, 0.0);
}

TEST(Scaling, LambdaTwoMatches) {
  const SpectralGrid g(64);
  const auto rep = scaling_check(DispersionSymbol::pure_power(1.0), 2.0, small_data(g), config(1e-3, 0.1));
  EXPECT_LT(rep.max_rel_discrepancy, 1e-6);
  EXPECT_LT(rep.critical_norm_rel_diff, 1e-10);
  EXPECT_THROW(scaling_check(DispersionSymbol::ilw(), 2.0, small_data(g), config(1e-3, 0.1)), ConfigError);
}
