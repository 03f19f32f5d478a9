#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "dbl/dispersion.hpp"

namespace dbl {

inline double omega2(const DispersionSymbol& sym, double x1, double x2) {
  return sym.omega(x1 + x2) - sym.omega(x1) - sym.omega(x2);
}

inline double omega3(const DispersionSymbol& sym, double x1, double x2, double x3) {
  return sym.omega(x1 + x2 + x3) - sym.omega(x1) - sym.omega(x2) - sym.omega(x3);
}

// |Omega3 - Omega2(xi2 + xi3, xi1) - Omega2(xi2, xi3)|, relative to the sum of |omega|
// at the five frequencies involved.
inline double omega3_decomposition_residual(const DispersionSymbol& sym, double x1, double x2, double x3) {
  const double lhs = omega3(sym, x1, x2, x3);
  const double rhs = omega2(sym, x2 + x3, x1) + omega2(sym, x2, x3);
  double scale = 0.0;
  for (double x : {x1 + x2 + x3, x2 + x3, x1, x2, x3}) scale += std::abs(sym.omega(x));
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
}

// Magnitudes of the interacting frequencies (closing one included), sorted
// descending: mag[0] = |xi_max|, mag.back() = |xi_min|.
template <std::size_t K>
struct ResonanceSample {
  std::array<double, K> xi{};
  double closing = 0.0;
  std::array<double, K + 1> mag{};
  double omega = 0.0;
  double comparator = 0.0;
  double ratio = 0.0;
};

inline ResonanceSample<2> resonance_sample2(const DispersionSymbol& sym, double x1, double x2) {
  ResonanceSample<2> s;
  s.xi = {x1, x2};
  s.closing = -(x1 + x2);
  s.mag = {std::abs(x1), std::abs(x2), std::abs(x1 + x2)};
  std::sort(s.mag.begin(), s.mag.end(), std::greater<>());
  s.omega = omega2(sym, x1, x2);
  s.comparator = s.mag[2] * std::pow(s.mag[0], sym.alpha());
  s.ratio = std::abs(s.omega) / s.comparator;
  return s;
}

// Comparator |xi_thd| |xi_max|^alpha; mag[2] is the third largest of four.
inline ResonanceSample<3> resonance_sample3(const DispersionSymbol& sym, double x1, double x2, double x3) {
  ResonanceSample<3> s;
  s.xi = {x1, x2, x3};
  s.closing = -(x1 + x2 + x3);
  s.mag = {std::abs(x1), std::abs(x2), std::abs(x3), std::abs(x1 + x2 + x3)};
  std::sort(s.mag.begin(), s.mag.end(), std::greater<>());
  s.omega = omega3(sym, x1, x2, x3);
  s.comparator = s.mag[2] * std::pow(s.mag[0], sym.alpha());
  s.ratio = std::abs(s.omega) / s.comparator;
  return s;
}

struct ComparabilityReport {
  double alpha = 0.0;
  long long n_samples = 0;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  long long rejected = 0;
  unsigned long long seed = 0;

  double spread() const { return ratio_max / ratio_min; }
  void add(double r) {
    ratio_min = std::min(ratio_min, r);
    ratio_max = std::max(ratio_max, r);
    ++n_samples;
  }
};

namespace detail {
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}
inline double random_sign(std::mt19937_64& rng) {
  std::bernoulli_distribution b(0.5);
  return b(rng) ? 1.0 : -1.0;
}
}  // namespace detail

// Log-uniform magnitudes in [lo, hi] with random signs; samples where
// |xi1|, |xi2| or |xi1 + xi2| fall below xi0 are redrawn and counted.
inline ComparabilityReport verify_res2(const DispersionSymbol& sym, long long n_samples, double lo, double hi,
                                       unsigned long long seed = 1, bool same_sign = false) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("verify_res2: need 0 < lo < hi");
  if (n_samples < 1) throw ConfigError("verify_res2: n_samples must be positive");
  const double xi0 = sym.xi0();
  if (hi < xi0) throw ConfigError("verify_res2: scale range lies below xi0");
  std::mt19937_64 rng(seed);
  ComparabilityReport rep;
  rep.alpha = sym.alpha();
  rep.seed = seed;
  const long long max_attempts = 1000 * n_samples;
  long long attempts = 0;
  while (rep.n_samples < n_samples) {
    if (++attempts > max_attempts) throw ConfigError("verify_res2: admissible set is (nearly) empty");
    double x1 = detail::log_uniform(rng, lo, hi) * detail::random_sign(rng);
    double x2 = detail::log_uniform(rng, lo, hi) * detail::random_sign(rng);
    if (same_sign) x2 = std::copysign(x2, x1);
    if (std::abs(x1) < xi0 || std::abs(x2) < xi0 || std::abs(x1 + x2) < xi0) {
      ++rep.rejected;
      continue;
    }
    rep.add(resonance_sample2(sym, x1, x2).ratio);
  }
  return rep;
}

// xi1 is drawn from [lo, hi/separation], xi2 and xi3 from [lo, hi]; a sample is
// kept when |xi_min| <= |xi_thd| / separation and xi_min != 0.
inline ComparabilityReport verify_res3(const DispersionSymbol& sym, long long n_samples, double lo, double hi,
                                       double separation = 32.0, unsigned long long seed = 1) {
  if (separation < 32.0) throw ConfigError("verify_res3: separation must be >= 32");
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("verify_res3: need 0 < lo < hi");
  if (hi / lo < separation)
    throw ConfigError("verify_res3: range [lo, hi] too narrow for the requested separation");
  if (n_samples < 1) throw ConfigError("verify_res3: n_samples must be positive");
  std::mt19937_64 rng(seed);
  ComparabilityReport rep;
  rep.alpha = sym.alpha();
  rep.seed = seed;
  const long long max_attempts = 1000 * n_samples;
  long long attempts = 0;
  while (rep.n_samples < n_samples) {
    if (++attempts > max_attempts) throw ConfigError("verify_res3: admissible set is (nearly) empty");
    const double x1 = detail::log_uniform(rng, lo, hi / separation) * detail::random_sign(rng);
    const double x2 = detail::log_uniform(rng, lo, hi) * detail::random_sign(rng);
    const double x3 = detail::log_uniform(rng, lo, hi) * detail::random_sign(rng);
    const auto s = resonance_sample3(sym, x1, x2, x3);
    if (!(s.mag[3] > 0.0) || s.mag[3] > s.mag[2] / separation) {
      ++rep.rejected;
      continue;
    }
    rep.add(s.ratio);
  }
  return rep;
}

}  // namespace dbl
