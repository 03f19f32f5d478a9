#pragma once

// Conserved functionals and the Fourier-defined modified energies.
//
//   E_N   = 1/2 ||P_N u||^2 + c E1_N(u)                           (N > N0)
//   E1_N  = L sum (chi1/Omega2)(xi1,xi2) xi1 u_ll(k1) u_sim(k2) u_sim(k3)
//   E~_N  = 1/2 ||P_N w||^2 + c~1 E~1_N(z,w) + c~2 E~2_N(z,w)     (N > N0)
//
// with k1 + k2 + k3 = 0, k1 != 0. With the flow c_t = -i omega c the linear
// part of dE1_N/dt is +L sum chi1 (i xi1) abc, which is the low-high flux
// itself, so cancelling it takes c = -1 (and c~1 = +1, c~2 = -1).

#include <cmath>
#include <string>
#include <vector>

#include "dbl/dispersion.hpp"
#include "dbl/littlewood_paley.hpp"
#include "dbl/multipliers.hpp"
#include "dbl/spectral.hpp"

namespace dbl {

inline constexpr double kCorrectorSign = -1.0;
inline constexpr double kDifferenceSign1 = 1.0;
inline constexpr double kDifferenceSign2 = -1.0;

inline double mass(const Field& f) { return weighted_square_sum(f, [](double) { return 1.0; }); }

// 1/2 int |Lambda u|^2 + kappa/3 int u^3, kappa = hamiltonian_cubic_sign(sym).
inline double hamiltonian(const Field& f, const DispersionSymbol& sym) {
  auto lam = lambda_half_multiplier(sym);
  const double quad = 0.5 * weighted_square_sum(f, [&](double xi) {
    const double l = lam(xi);
    return l * l;
  });
  const double cubic = pairing(dealiased_square(f), f) / 3.0;
  return quad + hamiltonian_cubic_sign(sym) * cubic;
}

struct CorrectorSum {
  double value = 0.0;
  double imag = 0.0;  // should vanish up to rounding
  long long guard_skips = 0;
  long long terms = 0;
};

// L * sum_{k1 != 0, k2} S(xi1, xi2) weight(xi1, xi2) a_k1 b_k2 c_{-k1-k2}.
template <class Weight>
CorrectorSum corrector_sum(const GuardedOverOmega2& S, Weight&& weight, const Field& low, const Field& mid,
                           const Field& last) {
  const auto& g = low.grid();
  const int km = g.kmax();
  std::vector<detail::Mode> A, B;
  for (const auto& m : detail::nonzero_modes(low, km))
    if (m.k != 0) A.push_back(m);
  B = detail::nonzero_modes(mid, km);
  CorrectorSum out;
  cplx acc{};
  for (const auto& a : A)
    for (const auto& b : B) {
      const int k3 = -(a.k + b.k);
      if (std::abs(k3) > km) continue;
      const cplx c3 = last.coeff(k3);
      if (c3 == cplx{}) continue;
      const auto v = S.eval(a.xi, b.xi);
      if (v.guarded) {
        ++out.guard_skips;
        continue;
      }
      ++out.terms;
      acc += v.value * weight(a.xi, b.xi) * a.c * b.c * c3;
    }
  out.value = g.length() * acc.real();
  out.imag = g.length() * acc.imag();
  return out;
}

// E1_N(u).
inline CorrectorSum e1_term(const Field& u, const DispersionSymbol& sym, double N, double s) {
  const Field low = lp::project_band(u, lp::Band::ll, N);
  const Field mid = lp::project_band(u, lp::Band::sim, N);
  if (low.is_zero() || mid.is_zero()) return {};
  return corrector_sum(chi1_over_omega2(sym, N, s), [](double x1, double) { return x1; }, low, mid, mid);
}

inline double bracket_inv_sq(double N) { return 1.0 + 1.0 / (N * N); }

// E~1_N(z, w): chi~1 = -1/2 <1/N>^2 chi1 at regularity sigma.
inline CorrectorSum e1_tilde_term(const Field& z, const Field& w, const DispersionSymbol& sym, double N,
                                  double sigma) {
  const Field low = lp::project_band(z, lp::Band::ll, N);
  const Field mid = lp::project_band(w, lp::Band::sim, N);
  if (low.is_zero() || mid.is_zero()) return {};
  const double f = -0.5 * bracket_inv_sq(N);
  GuardedOverOmega2 S(sym, N, [N, sigma, f](double a, double b) { return f * chi1_value(a, b, N, sigma); });
  return corrector_sum(S, [](double x1, double) { return x1; }, low, mid, mid);
}

// E~2_N(z, w): chi~2 = <1/N>^2 (<N>/N)^{2 sigma} phi_N(xi1+xi2)^2, weight xi1 + xi2.
inline CorrectorSum e2_tilde_term(const Field& z, const Field& w, const DispersionSymbol& sym, double N,
                                  double sigma) {
  const Field low = lp::project_band(w, lp::Band::ll, N);
  const Field mid = lp::project_band(z, lp::Band::sim, N);
  const Field last = lp::project_band(w, lp::Band::sim, N);
  if (low.is_zero() || mid.is_zero() || last.is_zero()) return {};
  const double f = bracket_inv_sq(N) * std::pow(jbracket(N) / N, 2.0 * sigma);
  GuardedOverOmega2 S(sym, N, [N, f](double a, double b) {
    const double p = lp::phi_N(a + b, N);
    return cplx(f * p * p);
  });
  return corrector_sum(S, [](double x1, double x2) { return x1 + x2; }, low, mid, last);
}

struct ScaleTerm {
  double N = 0.0;
  double plain = 0.0;      // 1/2 ||P_N u||^2
  double corrector = 0.0;  // signed corrector contribution added to plain
  double value = 0.0;      // E_N
  double weight = 0.0;     // <N>^{2s}, or <1/N>^2 <N>^{2 sigma}
  double weighted = 0.0;   // weight * |E_N|
};

struct EnergyReport {
  double t = 0.0;
  double s = 0.0;
  double n0 = 0.0;
  double mass = 0.0;
  double hamiltonian = 0.0;
  double hs_norm = 0.0;
  double modified = 0.0;
  double plain_sum = 0.0;  // 1/2 sum <N>^{2s} ||P_N u||^2
  double corrector_share = 0.0;
  long long guard_skips = 0;
  std::vector<ScaleTerm> per_n;
};

struct DifferenceEnergyReport {
  double t = 0.0;
  double s = 0.0;
  double sigma = 0.0;
  double n0 = 0.0;
  double weighted_norm = 0.0;  // sum <1/N>^2 <N>^{2 sigma} ||P_N w||^2
  double modified = 0.0;
  double corrector1_share = 0.0;
  double corrector2_share = 0.0;
  long long guard_skips = 0;
  std::vector<ScaleTerm> per_n;
};

inline void require_n0(double N0) {
  if (!(N0 >= 2.0) || !std::isfinite(N0)) throw ConfigError("N0 must be a finite number >= 2");
}

namespace detail {

inline EnergyReport modified_energy_signed(const Field& f, const DispersionSymbol& sym, double s, double N0,
                                           double c) {
  require_n0(N0);
  EnergyReport r;
  r.s = s;
  r.n0 = N0;
  r.mass = mass(f);
  r.hamiltonian = hamiltonian(f, sym);
  r.hs_norm = sobolev_norm(f, s);
  const auto ladder = lp::DyadicLadder::for_grid(f.grid(), false);
  for (double N : ladder.scales()) {
    ScaleTerm t;
    t.N = N;
    t.weight = std::pow(jbracket(N), 2.0 * s);
    t.plain = 0.5 * mass(lp::project(f, ladder, N));
    if (N > N0) {
      const auto e1 = e1_term(f, sym, N, s);
      t.corrector = c * e1.value;
      r.corrector_share += t.weight * std::abs(e1.value);
      r.guard_skips += e1.guard_skips;
    }
    t.value = t.plain + t.corrector;
    t.weighted = t.weight * std::abs(t.value);
    r.modified += t.weighted;
    r.plain_sum += t.weight * t.plain;
    r.per_n.push_back(t);
  }
  return r;
}

}  // namespace detail

inline EnergyReport modified_energy(const Field& f, const DispersionSymbol& sym, double s, double N0) {
  return detail::modified_energy_signed(f, sym, s, N0, kCorrectorSign);
}

struct CoercivityStep {
  double n0 = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct CoercivityResult {
  bool passed = false;
  double n0_initial = 0.0;
  double n0_passing = 0.0;  // 0 when no pass
  int doublings = 0;
  bool vacuous = false;  // passing N0 lies above every active scale
  std::vector<CoercivityStep> trail;

  double margin() const { return trail.empty() ? 0.0 : trail.back().rhs - trail.back().lhs; }
};

// |E^s - 1/2 sum <N>^{2s}||P_N u||^2| <= 1/8 sum_{N > N0} <N>^{2s} ||P_N u||^2,
// retried with N0 doubled up to max_doublings times.
inline CoercivityResult coercivity_check(const Field& f, const DispersionSymbol& sym, double s, double N0,
                                         int max_doublings = 10) {
  if (!(s > lwp_threshold(sym.alpha())))
    throw ConfigError("coercivity needs s > 3/2 - 5 alpha/4 = " + std::to_string(lwp_threshold(sym.alpha())));
  CoercivityResult res;
  res.n0_initial = N0;
  double n0 = N0;
  for (int d = 0; d <= max_doublings; ++d, n0 *= 2.0) {
    const auto rep = modified_energy(f, sym, s, n0);
    CoercivityStep st;
    st.n0 = n0;
    st.lhs = std::abs(rep.modified - rep.plain_sum);
    for (const auto& t : rep.per_n)
      if (t.N > n0) st.rhs += 0.125 * t.weight * 2.0 * t.plain;
    st.pass = st.lhs <= st.rhs;
    res.trail.push_back(st);
    if (st.pass) {
      res.passed = true;
      res.n0_passing = n0;
      res.doublings = d;
      res.vacuous = st.rhs == 0.0;
      break;
    }
  }
  return res;
}

struct SigmaWindow {
  double lo = 0.0;
  double hi = 0.0;
};

// Open interval (-1/2 + alpha/4, min(0, s - 2 + 3 alpha/2)); edges are
// accepted within 1e-9 so that configurations sitting exactly on the upper
// edge (s = 0.3, alpha = 1 gives hi = -0.2) remain admissible.
inline SigmaWindow sigma_window(double s, double alpha) {
  return {-0.5 + 0.25 * alpha, std::min(0.0, s - 2.0 + 1.5 * alpha)};
}

inline void require_sigma(double sigma, double s, double alpha) {
  const auto w = sigma_window(s, alpha);
  if (!(sigma > w.lo - 1e-9 && sigma < w.hi + 1e-9) || !(w.lo < w.hi + 1e-9)) {
    std::ostringstream os;
    os << "sigma = " << sigma << " outside the admissible window (" << w.lo << ", " << w.hi << ") for s = " << s
       << ", alpha = " << alpha;
    throw ConfigError(os.str());
  }
}

namespace detail {

inline DifferenceEnergyReport difference_energy_signed(const Field& z, const Field& w, const DispersionSymbol& sym,
                                                       double s, double sigma, double N0, double c1, double c2) {
  require_sigma(sigma, s, sym.alpha());
  if (!(N0 > 0.0) || !std::isfinite(N0)) throw ConfigError("N0 must be positive");
  if (!(z.grid() == w.grid())) throw ConfigError("z and w live on different grids");
  DifferenceEnergyReport r;
  r.s = s;
  r.sigma = sigma;
  r.n0 = N0;
  const auto ladder = lp::DyadicLadder::for_grid(w.grid(), true);
  for (double N : ladder.scales()) {
    ScaleTerm t;
    t.N = N;
    t.weight = bracket_inv_sq(N) * std::pow(jbracket(N), 2.0 * sigma);
    t.plain = 0.5 * mass(lp::project(w, N));
    if (N > N0) {
      const auto a = e1_tilde_term(z, w, sym, N, sigma);
      const auto b = e2_tilde_term(z, w, sym, N, sigma);
      t.corrector = c1 * a.value + c2 * b.value;
      r.corrector1_share += t.weight * std::abs(a.value);
      r.corrector2_share += t.weight * std::abs(b.value);
      r.guard_skips += a.guard_skips + b.guard_skips;
    }
    t.value = t.plain + t.corrector;
    t.weighted = t.weight * std::abs(t.value);
    r.modified += t.weighted;
    r.weighted_norm += t.weight * 2.0 * t.plain;
    r.per_n.push_back(t);
  }
  return r;
}

}  // namespace detail

inline DifferenceEnergyReport difference_energy(const Field& z, const Field& w, const DispersionSymbol& sym,
                                                double s, double sigma, double N0) {
  return detail::difference_energy_signed(z, w, sym, s, sigma, N0, kDifferenceSign1, kDifferenceSign2);
}

inline CoercivityResult difference_coercivity_check(const Field& z, const Field& w, const DispersionSymbol& sym,
                                                    double s, double sigma, double N0, int max_doublings = 10) {
  if (!(s > lwp_threshold(sym.alpha())))
    throw ConfigError("coercivity needs s > 3/2 - 5 alpha/4 = " + std::to_string(lwp_threshold(sym.alpha())));
  CoercivityResult res;
  res.n0_initial = N0;
  double n0 = N0;
  for (int d = 0; d <= max_doublings; ++d, n0 *= 2.0) {
    const auto rep = difference_energy(z, w, sym, s, sigma, n0);
    CoercivityStep st;
    st.n0 = n0;
    st.lhs = std::abs(rep.modified - 0.5 * rep.weighted_norm);
    for (const auto& t : rep.per_n)
      if (t.N > n0) st.rhs += 0.125 * t.weight * 2.0 * t.plain;
    st.pass = st.lhs <= st.rhs;
    res.trail.push_back(st);
    if (st.pass) {
      res.passed = true;
      res.n0_passing = n0;
      res.doublings = d;
      res.vacuous = st.rhs == 0.0;
      break;
    }
  }
  return res;
}

}  // namespace dbl
