#include <gtest/gtest.h>

#include "dbl/resonance.hpp"

using namespace dbl;

TEST(Omega2, BurgersLikeExamples) {
  const auto s = DispersionSymbol::pure_power(1.0);
  EXPECT_DOUBLE_EQ(omega2(s, 1, 1), -2.0);
  EXPECT_DOUBLE_EQ(omega2(s, 1, 2), -4.0);
  EXPECT_DOUBLE_EQ(omega2(s, 1, 3), -6.0);
  // same signs: Omega2 = -2 xi1 xi2 exactly
  EXPECT_DOUBLE_EQ(omega2(s, 3, 5), -30.0);
}

TEST(Omega2, Symmetric) {
  for (auto s : {DispersionSymbol::pure_power(0.5), DispersionSymbol::whitham(1.0), DispersionSymbol::ilw()})
    for (double a : {-7.0, 0.3, 2.0})
      for (double b : {-1.5, 4.0, 30.0}) EXPECT_NEAR(omega2(s, a, b), omega2(s, b, a), 1e-12 * std::abs(b * b));
}

TEST(Omega3, Decomposition) {
  for (auto s : {DispersionSymbol::pure_power(0.5), DispersionSymbol::whitham(1.0), DispersionSymbol::ilw()})
    EXPECT_LT(omega3_decomposition_residual(s, 0.7, -13.0, 41.0), 1e-14);
  EXPECT_EQ(omega3_decomposition_residual(DispersionSymbol::pure_power(1.0), 0, 0, 0), 0.0);
}

TEST(Omega3, ExampleRatio) {
  const auto s = resonance_sample3(DispersionSymbol::pure_power(1.0), 0.01, 1.0, 8.0);
  EXPECT_NEAR(s.ratio, 1.795782463928967, 1e-14);
  EXPECT_DOUBLE_EQ(s.mag[2], 1.0);
}

TEST(Res2, SameSignMatchesClosedForm) {
  const auto sym = DispersionSymbol::pure_power(1.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double a = detail::log_uniform(rng, 1, 1000), b = detail::log_uniform(rng, 1, 1000);
    EXPECT_NEAR(resonance_sample2(sym, a, b).ratio, 2.0 * std::max(a, b) / (a + b), 1e-12);
  }
  const auto rep = verify_res2(sym, 20000, 1, 1000, 1, true);
  EXPECT_GE(rep.ratio_min, 1.0 - 1e-12);
  EXPECT_LE(rep.ratio_max, 2.0 + 1e-12);
}

// Spreads at the default sampling (1e5 draws, seed 1, scales 1..1000).
TEST(Res2, FrozenSpreads) {
  EXPECT_NEAR(verify_res2(DispersionSymbol::pure_power(0.5), 100000, 1, 1000).spread(), 2.505, 5e-3);
  EXPECT_NEAR(verify_res2(DispersionSymbol::pure_power(1.0), 100000, 1, 1000).spread(), 1.998, 5e-3);
}

TEST(Res2, WhithamAboveXi0) {
  const auto rep = verify_res2(DispersionSymbol::whitham(1.0).with_xi0(2.0), 20000, 2, 100);
  EXPECT_LE(rep.spread(), 50.0);
  EXPECT_GT(rep.rejected, 0);
}

TEST(Res3, FrozenSpreads) {
  EXPECT_NEAR(verify_res3(DispersionSymbol::pure_power(0.5), 100000, 1, 1000).spread(), 2.60, 2e-2);
  EXPECT_NEAR(verify_res3(DispersionSymbol::pure_power(1.0), 100000, 1, 1000).spread(), 2.117, 2e-2);
}

TEST(Res3, RejectsWeakSeparation) {
  const auto s = DispersionSymbol::pure_power(1.0);
  EXPECT_THROW(verify_res3(s, 10, 1, 1000, 16.0), ConfigError);
  EXPECT_THROW(verify_res3(s, 10, 1, 20), ConfigError);
}

TEST(Res3, Deterministic) {
  const auto s = DispersionSymbol::ilw();
  const auto a = verify_res3(s, 5000, 1, 1000, 32, 9), b = verify_res3(s, 5000, 1, 1000, 32, 9);
  EXPECT_EQ(a.ratio_min, b.ratio_min);
  EXPECT_EQ(a.ratio_max, b.ratio_max);
}
