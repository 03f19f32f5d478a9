#pragma once

// Dispersion symbols omega(xi); the linear operator is the multiplier i*omega,
// so the equation reads  u_t + L u = (u^2)_x  with  (L u)^_k = i omega(xi_k) c_k.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dbl/errors.hpp"

namespace dbl {

enum class SymbolKind { pure_power, whitham, ilw };

inline std::string to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::pure_power: return "pure_power";
    case SymbolKind::whitham: return "whitham";
    case SymbolKind::ilw: return "ilw";
  }
  return "?";
}

inline SymbolKind symbol_kind_from_string(const std::string& s) {
  if (s == "pure_power") return SymbolKind::pure_power;
  if (s == "whitham") return SymbolKind::whitham;
  if (s == "ilw") return SymbolKind::ilw;
  throw ConfigError("unknown equation.type '" + s + "' (expected pure_power, whitham or ilw)");
}

inline double scaling_critical_index(double alpha) { return 0.5 - alpha; }
inline double lwp_threshold(double alpha) { return 1.5 - 1.25 * alpha; }

namespace detail {

inline double sgn(double x) { return (x > 0) - (x < 0); }

// T(x) = tanh(x)/x and derivatives; series below 1e-2 where the closed forms cancel.
inline double tanhc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0 - 17.0 * x2 * x2 * x2 / 315.0;
  }
  return std::tanh(x) / x;
}
inline double tanhc_d1(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x * (-2.0 / 3.0 + x2 * (8.0 / 15.0 + x2 * (-102.0 / 315.0 + x2 * (496.0 / 2835.0))));
  }
  const double s2 = 1.0 / (std::cosh(x) * std::cosh(x));
  return (x * s2 - std::tanh(x)) / (x * x);
}
inline double tanhc_d2(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return -2.0 / 3.0 + x2 * (8.0 / 5.0 + x2 * (-510.0 / 315.0 + x2 * (3472.0 / 2835.0)));
  }
  const double th = std::tanh(x);
  const double s2 = 1.0 / (std::cosh(x) * std::cosh(x));
  const double a = x * s2 - th;
  const double da = -2.0 * x * s2 * th;
  return da / (x * x) - 2.0 * a / (x * x * x);
}

// K(x) = x coth(x) and derivatives.
inline double xcoth(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0;
  }
  return x / std::tanh(x);
}
inline double xcoth_d1(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x * (2.0 / 3.0 + x2 * (-4.0 / 45.0 + x2 * (12.0 / 945.0 - x2 * (8.0 / 4725.0))));
  }
  const double sh = std::sinh(x);
  return 1.0 / std::tanh(x) - x / (sh * sh);
}
inline double xcoth_d2(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return 2.0 / 3.0 + x2 * (-12.0 / 45.0 + x2 * (60.0 / 945.0 - x2 * (56.0 / 4725.0)));
  }
  if (std::abs(x) > 350.0) return 0.0;
  const double sh = std::sinh(x);
  const double cs2 = 1.0 / (sh * sh);
  return -2.0 * cs2 + 2.0 * x * cs2 / std::tanh(x);
}

}  // namespace detail

class DispersionSymbol {
 public:
  static DispersionSymbol pure_power(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    return DispersionSymbol(SymbolKind::pure_power, alpha, 0.0);
  }
  static DispersionSymbol whitham(double tau = 1.0) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("whitham tau must be positive");
    return DispersionSymbol(SymbolKind::whitham, 0.5, tau);
  }
  static DispersionSymbol ilw() { return DispersionSymbol(SymbolKind::ilw, 1.0, 0.0); }

  DispersionSymbol with_xi0(double xi0) const {
    if (!(xi0 > 0.0)) throw ConfigError("xi0 must be positive");
    DispersionSymbol s = *this;
    s.xi0_ = xi0;
    return s;
  }

  SymbolKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double tau() const { return tau_; }
  double xi0() const { return xi0_; }

  double operator()(double xi) const { return omega(xi); }

  double omega(double xi) const {
    switch (kind_) {
      case SymbolKind::pure_power: return -xi * std::pow(std::abs(xi), alpha_);
      case SymbolKind::whitham: return xi * std::sqrt(detail::tanhc(xi) * (1.0 + tau_ * xi * xi));
      case SymbolKind::ilw: return xi * detail::xcoth(xi);
    }
    return 0.0;
  }

  // omega(xi)/xi continued to xi = 0.
  double phase_speed(double xi) const {
    switch (kind_) {
      case SymbolKind::pure_power: return -std::pow(std::abs(xi), alpha_);
      case SymbolKind::whitham: return std::sqrt(detail::tanhc(xi) * (1.0 + tau_ * xi * xi));
      case SymbolKind::ilw: return detail::xcoth(xi);
    }
    return 0.0;
  }

  // Analytic d^order omega / dxi^order for order 0, 1, 2.
  double derivative(double xi, int order) const {
    if (order == 0) return omega(xi);
    if (order < 0 || order > 2) throw ConfigError("analytic derivatives only up to order 2");
    switch (kind_) {
      case SymbolKind::pure_power: {
        const double a = alpha_;
        if (order == 1) return -(a + 1.0) * std::pow(std::abs(xi), a);
        if (xi == 0.0) {
          if (a == 1.0) return 0.0;
          throw DomainError("second derivative of pure_power symbol is singular at 0");
        }
        return -a * (a + 1.0) * std::pow(std::abs(xi), a - 1.0) * detail::sgn(xi);
      }
      case SymbolKind::whitham: {
        // omega = xi h, h = sqrt(q), q = T(xi) (1 + tau xi^2)
        const double t0 = detail::tanhc(xi), t1 = detail::tanhc_d1(xi), t2 = detail::tanhc_d2(xi);
        const double p0 = 1.0 + tau_ * xi * xi, p1 = 2.0 * tau_ * xi, p2 = 2.0 * tau_;
        const double q0 = t0 * p0, q1 = t1 * p0 + t0 * p1, q2 = t2 * p0 + 2.0 * t1 * p1 + t0 * p2;
        const double h0 = std::sqrt(q0);
        const double h1 = q1 / (2.0 * h0);
        if (order == 1) return h0 + xi * h1;
        const double h2 = q2 / (2.0 * h0) - q1 * q1 / (4.0 * h0 * h0 * h0);
        return 2.0 * h1 + xi * h2;
      }
      case SymbolKind::ilw: {
        const double k0 = detail::xcoth(xi), k1 = detail::xcoth_d1(xi);
        if (order == 1) return k0 + xi * k1;
        return 2.0 * k1 + xi * detail::xcoth_d2(xi);
      }
    }
    return 0.0;
  }

 private:
  DispersionSymbol(SymbolKind k, double alpha, double tau) : kind_(k), alpha_(alpha), tau_(tau) {}

  SymbolKind kind_;
  double alpha_;
  double tau_;
  double xi0_ = 1.0;
};

// Centered 4th-order accurate difference for the m-th derivative, m = 1..3.
template <class F>
double central_difference(F&& f, double x, int m, double h) {
  if (m == 1) return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
  if (m == 2) return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
  if (m == 3)
    return (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h) + 8 * f(x + 2 * h) -
            f(x + 3 * h)) /
           (8 * h * h * h);
  throw ConfigError("central_difference: order must be 1, 2 or 3");
}

struct BetaRatios {
  int beta = 0;
  std::vector<double> ratio;  // |d^beta omega| / |xi|^(alpha+1-beta) on xi grid
  double min = 0.0;
  double max = 0.0;
  bool pass = false;
};

struct Hyp2Result {
  double sup = 0.0;
  double argsup = 0.0;
  bool pass = false;
};

struct HypothesisReport {
  SymbolKind kind{};
  double alpha = 0.0;
  double xi_lo = 0.0, xi_hi = 0.0;
  std::vector<double> xi;
  std::vector<BetaRatios> betas;
  Hyp2Result hyp2;
  double window_lo = 1.0 / 50.0, window_hi = 50.0;
  bool pass = false;
};

// sup over (0, 1] of |omega(xi)/xi|, scanned on a fine grid that includes xi = 1.
inline Hyp2Result check_hyp2(const DispersionSymbol& sym, int samples = 20000) {
  Hyp2Result r;
  for (int i = 1; i <= samples; ++i) {
    const double xi = static_cast<double>(i) / samples;
    const double v = std::abs(sym.phase_speed(xi));
    if (v > r.sup || !std::isfinite(v)) {
      r.sup = v;
      r.argsup = xi;
    }
  }
  r.pass = std::isfinite(r.sup) && r.sup <= 10.0;
  return r;
}

inline HypothesisReport check_hypothesis1(const DispersionSymbol& sym, double xi_lo, double xi_hi,
                                          int beta_max = 3, int samples = 400) {
  if (!(xi_lo > 0.0) || !(xi_hi > xi_lo)) throw ConfigError("check_hypothesis1: need 0 < xi_lo < xi_hi");
  if (xi_lo < sym.xi0())
    throw DomainError("check_hypothesis1: xi range starts below xi0 = " + std::to_string(sym.xi0()));
  if (beta_max < 2 || beta_max > 4) throw ConfigError("check_hypothesis1: beta_max must be in [2, 4]");
  if (samples < 2) throw ConfigError("check_hypothesis1: need at least two samples");

  HypothesisReport rep;
  rep.kind = sym.kind();
  rep.alpha = sym.alpha();
  rep.xi_lo = xi_lo;
  rep.xi_hi = xi_hi;
  const double la = std::log(xi_lo), lb = std::log(xi_hi);
  for (int i = 0; i < samples; ++i) rep.xi.push_back(std::exp(la + (lb - la) * i / (samples - 1)));
  rep.xi.front() = xi_lo;
  rep.xi.back() = xi_hi;

  auto d2 = [&](double x) { return sym.derivative(x, 2); };
  rep.pass = true;
  for (int beta = 0; beta <= beta_max; ++beta) {
    BetaRatios b;
    b.beta = beta;
    b.min = std::numeric_limits<double>::infinity();
    b.max = 0.0;
    for (double x : rep.xi) {
      double d;
      if (beta <= 2) {
        d = sym.derivative(x, beta);
      } else {
        // step well inside [xi0, inf) so the stencil never crosses 0
        const double h = 1e-2 * x;
        d = central_difference(d2, x, beta - 2, h);
      }
      const double r = std::abs(d) / std::pow(x, sym.alpha() + 1.0 - beta);
      b.ratio.push_back(r);
      b.min = std::min(b.min, r);
      b.max = std::max(b.max, r);
    }
    if (beta <= 2)
      b.pass = b.min >= rep.window_lo && b.max <= rep.window_hi;
    else
      b.pass = b.max <= rep.window_hi;
    rep.pass = rep.pass && b.pass;
    rep.betas.push_back(std::move(b));
  }
  rep.hyp2 = check_hyp2(sym);
  return rep;
}

// Lambda(xi) = |omega(xi)/xi|^(1/2), even, continuous at 0.
inline std::function<double(double)> lambda_half_multiplier(const DispersionSymbol& sym) {
  if (!check_hyp2(sym).pass) throw ConfigError("symbol does not satisfy the low-frequency bound");
  return [sym](double xi) { return std::sqrt(std::abs(sym.phase_speed(xi))); };
}

// Sign of the cubic term in the conserved Hamiltonian: +1 when omega/xi < 0.
inline double hamiltonian_cubic_sign(const DispersionSymbol& sym) {
  return sym.phase_speed(1.0) < 0.0 ? 1.0 : -1.0;
}

}  // namespace dbl
