#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "dbl/errors.hpp"
#include "dbl/spectral.hpp"

namespace dbl::lp {

inline double bump_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// eta = 1 on [-1,1], 0 outside (-2,2), C-infinity in between.
inline double eta(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double p = bump_g(2.0 - a);
  const double q = bump_g(a - 1.0);
  return p / (p + q);
}

inline double eta_prime(double x) {
  const double a = std::abs(x);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double u = 2.0 - a, v = a - 1.0;
  const double p = bump_g(u), q = bump_g(v);
  const double dp = p / (u * u), dq = q / (v * v);
  const double s = p + q;
  const double d = -(dp * q + p * dq) / (s * s);
  return x > 0 ? d : -d;
}

inline double phi(double x) { return eta(x) - eta(2.0 * x); }
inline double phi_prime(double x) { return eta_prime(x) - 2.0 * eta_prime(2.0 * x); }
inline double phi_N(double xi, double N) { return phi(xi / N); }

// Equal to phi_{N/2} + phi_N + phi_{2N}; 1 on +-[1/2, 2], 0 outside +-(1/4, 4).
inline double tilde_phi(double x) { return eta(x / 2.0) - eta(4.0 * x); }
inline double tilde_phi_N(double xi, double N) { return tilde_phi(xi / N); }

// Modulation cutoff in sigma = tau - omega(xi). psi_1 = eta so that the
// ladder L = 1, 2, 4, ... sums to one.
inline double psi_L(double sigma, double L) { return L == 1.0 ? eta(sigma) : phi(sigma / L); }

inline bool is_dyadic(double N) {
  if (!(N > 0.0) || !std::isfinite(N)) return false;
  int e;
  return std::frexp(N, &e) == 0.5;
}

inline void require_dyadic(double N, const char* what) {
  if (!is_dyadic(N)) throw ConfigError(std::string(what) + " must be a power of two");
}

enum class Band { le, ge, sim, lesssim, gtrsim, ll };

inline Band band_from_string(const std::string& s) {
  if (s == "le") return Band::le;
  if (s == "ge") return Band::ge;
  if (s == "sim") return Band::sim;
  if (s == "lesssim") return Band::lesssim;
  if (s == "gtrsim") return Band::gtrsim;
  if (s == "ll") return Band::ll;
  throw ConfigError("unknown band '" + s + "'");
}

// Cutoff sums for the band projectors. le keeps the mean, ge does not.
inline double band_weight(Band b, double xi, double N) {
  const double x = xi / N;
  switch (b) {
    case Band::le: return eta(x);
    case Band::ge: return 1.0 - eta(2.0 * x);
    case Band::sim: return tilde_phi(x);
    case Band::lesssim: return eta(2.0 * x) + eta(x) + eta(x / 2.0);
    case Band::gtrsim: return 3.0 - eta(4.0 * x) - eta(2.0 * x) - eta(x);
    case Band::ll: return eta(32.0 * x);
  }
  return 0.0;
}

// Dyadic scales 2^k_lo .. 2^k_hi. In nonhomogeneous mode k_lo = 0 and the
// bottom piece is P_1 = eta(xi), which also carries the mean.
class DyadicLadder {
 public:
  DyadicLadder(int k_lo, int k_hi, bool homogeneous)
      : k_lo_(k_lo), k_hi_(k_hi), homogeneous_(homogeneous) {
    if (k_hi < k_lo) throw ConfigError("empty dyadic ladder");
    if (!homogeneous && k_lo != 0) throw ConfigError("nonhomogeneous ladder starts at N = 1");
  }

  // Covers every nonzero grid frequency: lowest scale is the largest power of
  // two not above the fundamental, highest the smallest one not below the top.
  static DyadicLadder for_grid(const SpectralGrid& g, bool homogeneous) {
    const double lo = g.frequency(1);
    const double hi = g.frequency(g.kmax());
    const int k_hi = std::max(0, static_cast<int>(std::ceil(std::log2(hi) - 1e-12)));
    if (!homogeneous) return DyadicLadder(0, std::max(k_hi, 1), false);
    const int k_lo = static_cast<int>(std::floor(std::log2(lo) + 1e-12));
    return DyadicLadder(k_lo, std::max(k_hi, k_lo), true);
  }

  bool homogeneous() const { return homogeneous_; }
  int k_lo() const { return k_lo_; }
  int k_hi() const { return k_hi_; }

  std::vector<double> scales() const {
    std::vector<double> s;
    for (int k = k_lo_; k <= k_hi_; ++k) s.push_back(std::ldexp(1.0, k));
    return s;
  }

  double weight(double xi, double N) const {
    if (!homogeneous_ && N == 1.0) return eta(xi);
    return phi_N(xi, N);
  }

 private:
  int k_lo_, k_hi_;
  bool homogeneous_;
};

inline Field project(const Field& f, double N) {
  require_dyadic(N, "N");
  return apply_multiplier(f, [N](double xi) { return phi_N(xi, N); });
}

inline Field project(const Field& f, const DyadicLadder& ladder, double N) {
  require_dyadic(N, "N");
  return apply_multiplier(f, [&](double xi) { return ladder.weight(xi, N); });
}

inline Field project_band(const Field& f, Band b, double N) {
  require_dyadic(N, "N");
  return apply_multiplier(f, [b, N](double xi) { return band_weight(b, xi, N); });
}

// CSV rows: xi, eta(xi), phi_N(xi) for each requested N.
inline void write_cutoff_table(std::ostream& os, const std::vector<double>& xis,
                               const std::vector<double>& Ns) {
  os << "xi,eta";
  for (double N : Ns) os << ",phi_" << N;
  os << "\n";
  os.precision(17);
  for (double xi : xis) {
    os << xi << "," << eta(xi);
    for (double N : Ns) os << "," << phi_N(xi, N);
    os << "\n";
  }
}

}  // namespace dbl::lp
