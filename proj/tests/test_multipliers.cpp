#include <gtest/gtest.h>

#include "dbl/multipliers.hpp"

using namespace dbl;

namespace {

Field mode(const SpectralGrid& g, int k, cplx c = 0.5) {
  Field f(g);
  f.set(k, c);
  return f;
}

double max_diff(const Field& a, const Field& b) {
  double e = 0.0;
  for (int k = 0; k <= a.grid().kmax(); ++k) e = std::max(e, std::abs(a.coeff(k) - b.coeff(k)));
  return e;
}

MultiplierSymbol symbol_xi1() {
  return MultiplierSymbol(2, [](std::span<const double> x) { return cplx(0.0, x[0]); }, "i xi1");
}

}  // namespace

TEST(Pi2, OneIsTheProduct) {
  const SpectralGrid g(64);
  const Field c = mode(g, 1);
  const Field p = apply_pi2(symbol_one(2), c, c);
  EXPECT_NEAR(std::abs(p.coeff(0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.coeff(2) - 0.25), 0.0, 1e-15);
  const Field a = random_field(g, 1, 10, 0.0), b = random_field(g, 2, 10, 0.0);
  EXPECT_LT(max_diff(apply_pi2(symbol_one(2), a, b), dealiased_product(a, b)), 1e-14);
}

TEST(Pi2, DerivativeOnFirstSlot) {
  const SpectralGrid g(64);
  const Field c1 = mode(g, 1), c8 = mode(g, 8);
  // (d_x cos x) cos 8x
  const Field want = dealiased_product(derivative(c1), c8);
  EXPECT_LT(max_diff(apply_pi2(symbol_xi1(), c1, c8), want), 1e-15);
}

TEST(Pi2, TensorPhiIsProductOfProjections) {
  const SpectralGrid g(256);
  const Field a = random_field(g, 3, 40, 0.0), b = random_field(g, 4, 40, 0.0);
  const Field want = dealiased_product(lp::project(a, 4.0), lp::project(b, 16.0));
  EXPECT_LT(max_diff(apply_pi2(symbol_tensor_phi(4, 16), a, b), want), 1e-12);
}

TEST(Pi2, ArityAndGridChecks) {
  const SpectralGrid g(64);
  EXPECT_THROW(apply_pi2(symbol_one(3), Field(g), Field(g)), ConfigError);
  EXPECT_THROW(apply_pi2(symbol_one(2), Field(g), Field(SpectralGrid(32))), ConfigError);
  EXPECT_THROW(MultiplierSymbol(4, [](std::span<const double>) { return cplx(1.0); }), ConfigError);
}

TEST(Pi3, OneIsTripleProduct) {
  const SpectralGrid g(128);
  const Field a = random_field(g, 5, 12, 0.0), b = random_field(g, 6, 12, 0.0), c = random_field(g, 7, 12, 0.0);
  const Field want = dealiased_product(dealiased_product(a, b), c);
  EXPECT_LT(max_diff(apply_pi3(symbol_one(3), a, b, c), want), 1e-14);
}

TEST(Pi2, PermutationSwapsArguments) {
  const SpectralGrid g(64);
  const Field a = random_field(g, 8, 15, 0.0), b = random_field(g, 9, 15, 0.0);
  const MultiplierSymbol chi(2, [](std::span<const double> x) { return cplx(x[0] * x[0], x[1]); });
  const MultiplierSymbol swapped(2, [](std::span<const double> x) { return cplx(x[1] * x[1], x[0]); });
  EXPECT_LT(max_diff(apply_pi2(chi, a, b), apply_pi2(swapped, b, a)), 1e-12);
}

TEST(Pi2, Duality) {
  // int Pi_chi(a, b) c = int Pi_chi'(a, c) b with chi'(x1, x3) = chi(x1, -x1 - x3)
  const SpectralGrid g(64);
  const Field a = random_field(g, 10, 10, 0.0), b = random_field(g, 11, 10, 0.0), c = random_field(g, 12, 10, 0.0);
  const MultiplierSymbol chi(2, [](std::span<const double> x) { return cplx(lp::eta(x[0] / 8) * std::cos(x[1])); });
  const MultiplierSymbol dual(
      2, [](std::span<const double> x) { return cplx(lp::eta(x[0] / 8) * std::cos(-x[0] - x[1])); });
  EXPECT_NEAR(pairing(apply_pi2(chi, a, b), c), pairing(apply_pi2(dual, a, c), b), 1e-13);
}

TEST(GtFunctional, LinearInTForStaticRecords) {
  const SpectralGrid g(32);
  const Field a = random_field(g, 1, 5, 0.0), b = random_field(g, 2, 5, 0.0), c = random_field(g, 3, 5, 0.0);
  TrajectoryRecord ra(g), rb(g), rc(g);
  for (int j = 0; j < 5; ++j) {
    ra.append(0.25 * j, a);
    rb.append(0.25 * j, b);
    rc.append(0.25 * j, c);
  }
  const double I = pairing(dealiased_product(a, b), c);
  const std::vector<const TrajectoryRecord*> u{&ra, &rb, &rc};
  EXPECT_NEAR(gt_functional(symbol_one(2), u, 1.0), I, 1e-14);
  EXPECT_NEAR(gt_functional(symbol_one(2), u, 0.6), 0.6 * I, 1e-14);
  EXPECT_EQ(gt_functional(symbol_one(2), u, 0.0), 0.0);
  EXPECT_THROW(gt_functional(symbol_one(2), u, 2.0), ConfigError);
}

TEST(Marcinkiewicz, TensorPhiPasses) {
  std::vector<Box> boxes;
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) boxes.push_back(dyadic_box({2, 64}, {s1, s2}));
  const auto rep = check_marcinkiewicz(symbol_tensor_phi(2, 64), boxes);
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.worst(), 1e3);
}

TEST(Marcinkiewicz, UnnormalizedXiFails) {
  const auto rep = check_marcinkiewicz(symbol_xi1(), {dyadic_box({1024, 1024})});
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.worst(), 1e3);
}

TEST(Marcinkiewicz, FiniteDifferenceMatchesAnalytic) {
  const MultiplierSymbol chi(2, [](std::span<const double> x) { return cplx(std::sin(x[0]) * x[1] * x[1]); });
  const std::array<double, 2> x{0.7, 1.3};
  const std::array<int, 2> b{1, 2};
  EXPECT_NEAR(chi.partial(x, b).real(), std::cos(0.7) * 2.0, 1e-7);
  const std::array<int, 2> b3{3, 0};
  EXPECT_NEAR(chi.partial(x, b3).real(), -std::cos(0.7) * 1.69, 1e-5);
}

TEST(Corrector, Chi1PlateauValue) {
  for (double s : {0.0, 0.3, 0.8})
    EXPECT_NEAR(std::abs(chi1_value(0.0, 16.0, 16.0, s) - std::pow(jbracket(16.0) / 16.0, 2 * s)), 0.0, 1e-15);
  EXPECT_EQ(chi1_value(0.0, 100.0, 16.0, 0.3), cplx{});
}

TEST(Corrector, CommutatorIdentity) {
  const SpectralGrid g(256);
  for (unsigned seed = 1; seed <= 3; ++seed) {
    const Field u = random_field(g, seed, 84, 0.5);
    for (double N : {32.0, 64.0}) EXPECT_LT(commutator_residual(u, N), 1e-13) << N;
  }
}

TEST(Corrector, OverOmega2Cancels) {
  const auto sym = DispersionSymbol::pure_power(0.5);
  const auto q = chi1_over_omega2(sym, 64, 0.3);
  for (double x1 : {-3.0, 1.0, 4.0})
    for (double x2 : {20.0, 64.0, -100.0}) {
      const auto v = q.eval(x1, x2);
      ASSERT_FALSE(v.guarded);
      EXPECT_NEAR(std::abs(v.value * omega2(sym, x1, x2) - chi1_value(x1, x2, 64, 0.3)), 0.0, 1e-13);
    }
  EXPECT_TRUE(q.eval(0.0, 64.0).guarded);
}

TEST(Corrector, OutsideBandThrows) {
  const auto q = chi1_over_omega2(DispersionSymbol::pure_power(1.0), 64, 0.3);
  EXPECT_THROW(q.eval(5.0, 64.0), DomainError);
  EXPECT_THROW(q.eval(1.0, 300.0), DomainError);
  EXPECT_NO_THROW(q.eval(4.0, 256.0));
}
