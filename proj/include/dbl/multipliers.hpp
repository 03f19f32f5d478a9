#pragma once

// Multilinear Fourier multipliers Pi^n_chi for n = 2, 3, the Marcinkiewicz
// checker, and the commutator / corrector symbols used by the energies.

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dbl/dispersion.hpp"
#include "dbl/littlewood_paley.hpp"
#include "dbl/resonance.hpp"
#include "dbl/spectral.hpp"
#include "dbl/trajectory.hpp"

namespace dbl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
using Box = std::vector<Interval>;

namespace detail {

// 4th-order accurate central stencils: offsets -r..r, weights, and the power of h.
struct Stencil {
  int r;
  std::vector<double> w;
  double denom;
};

inline const Stencil& stencil(int order) {
  static const std::array<Stencil, 5> table = {{
      {0, {1.0}, 1.0},
      {2, {1.0, -8.0, 0.0, 8.0, -1.0}, 12.0},
      {2, {-1.0, 16.0, -30.0, 16.0, -1.0}, 12.0},
      {3, {1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0}, 8.0},
      {3, {-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0}, 6.0},
  }};
  if (order < 0 || order > 4) throw ConfigError("derivative order must be in [0, 4]");
  return table[order];
}

}  // namespace detail

class MultiplierSymbol {
 public:
  using Eval = std::function<cplx(std::span<const double>)>;
  using Partial = std::function<cplx(std::span<const double>, std::span<const int>)>;

  MultiplierSymbol(int arity, Eval f, std::string name = {}, Partial d = {})
      : arity_(arity), f_(std::move(f)), d_(std::move(d)), name_(std::move(name)) {
    if (arity < 1 || arity > 3) throw ConfigError("multiplier arity must be 1, 2 or 3");
  }

  int arity() const { return arity_; }
  const std::string& name() const { return name_; }
  bool has_analytic_partial() const { return static_cast<bool>(d_); }

  cplx eval(std::span<const double> xi) const {
    if (static_cast<int>(xi.size()) != arity_) throw ConfigError("multiplier evaluated with wrong arity");
    return f_(xi);
  }
  cplx operator()(double a, double b) const {
    const std::array<double, 2> x{a, b};
    return eval(x);
  }
  cplx operator()(double a, double b, double c) const {
    const std::array<double, 3> x{a, b, c};
    return eval(x);
  }

  // d^beta chi at xi: analytic when provided, else tensor-product 4th-order
  // centered differences with step 1e-3 |xi_i| (1e-3 at xi_i = 0).
  cplx partial(std::span<const double> xi, std::span<const int> beta) const {
    if (d_) return d_(xi, beta);
    return fd_partial(xi, beta);
  }

  cplx fd_partial(std::span<const double> xi, std::span<const int> beta) const {
    if (static_cast<int>(beta.size()) != arity_) throw ConfigError("multi-index has wrong arity");
    std::array<double, 3> h{}, x{};
    std::array<const detail::Stencil*, 3> st{};
    for (int i = 0; i < arity_; ++i) {
      st[i] = &detail::stencil(beta[i]);
      h[i] = xi[i] == 0.0 ? 1e-3 : 1e-3 * std::abs(xi[i]);
    }
    cplx acc{};
    std::array<int, 3> idx{};
    // odometer over the stencil points of every variable
    while (true) {
      double w = 1.0;
      for (int i = 0; i < arity_; ++i) {
        w *= st[i]->w[idx[i]];
        x[i] = xi[i] + (idx[i] - st[i]->r) * h[i];
      }
      if (w != 0.0) acc += w * f_(std::span<const double>(x.data(), arity_));
      int i = 0;
      while (i < arity_ && ++idx[i] == static_cast<int>(st[i]->w.size())) idx[i++] = 0;
      if (i == arity_) break;
    }
    for (int i = 0; i < arity_; ++i) acc /= st[i]->denom * std::pow(h[i], beta[i]);
    return acc;
  }

  friend MultiplierSymbol operator*(const MultiplierSymbol& a, const MultiplierSymbol& b) {
    if (a.arity_ != b.arity_) throw ConfigError("product of multipliers with different arity");
    return MultiplierSymbol(
        a.arity_, [fa = a.f_, fb = b.f_](std::span<const double> x) { return fa(x) * fb(x); },
        "(" + a.name_ + ")*(" + b.name_ + ")");
  }

  // Box constraints |xi_i| in [lo, hi] where the evaluator is meaningful; empty means all of R^n.
  Box support;

 private:
  int arity_;
  Eval f_;
  Partial d_;
  std::string name_;
};

inline MultiplierSymbol symbol_one(int arity) {
  return MultiplierSymbol(arity, [](std::span<const double>) { return cplx(1.0); }, "1");
}

inline MultiplierSymbol symbol_tensor_phi(double N1, double N2) {
  lp::require_dyadic(N1, "N1");
  lp::require_dyadic(N2, "N2");
  return MultiplierSymbol(
      2, [N1, N2](std::span<const double> x) { return cplx(lp::phi_N(x[0], N1) * lp::phi_N(x[1], N2)); },
      "phi_N1 x phi_N2");
}

namespace detail {

struct Mode {
  int k;
  double xi;
  cplx c;
};

inline std::vector<Mode> nonzero_modes(const Field& f, int kcap) {
  std::vector<Mode> out;
  const auto& g = f.grid();
  const int km = std::min(g.kmax(), kcap);
  for (int k = -km; k <= km; ++k) {
    const cplx c = f.coeff(k);
    if (c != cplx{}) out.push_back({k, g.frequency(k), c});
  }
  return out;
}

inline void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("multiplier operands live on different grids");
}

}  // namespace detail

// d_m = sum_{k1+k2=m} chi(xi_k1, xi_k2) a_k1 b_k2; outputs with |m| >= n/2 are dropped.
inline Field apply_pi2(const MultiplierSymbol& chi, const Field& f, const Field& g) {
  if (chi.arity() != 2) throw ConfigError("apply_pi2 needs an arity-2 symbol");
  detail::require_same_grid(f, g);
  const auto& grid = f.grid();
  const int km = grid.kmax();
  const auto A = detail::nonzero_modes(f, km);
  const auto B = detail::nonzero_modes(g, km);
  std::vector<cplx> d(grid.half_size());
  for (const auto& a : A)
    for (const auto& b : B) {
      const int m = a.k + b.k;
      if (m < 0 || m > km) continue;
      d[m] += chi(a.xi, b.xi) * a.c * b.c;
    }
  return Field(grid, std::move(d));
}

inline constexpr int kPi3ModeCap = 512;

inline Field apply_pi3(const MultiplierSymbol& chi, const Field& f, const Field& g, const Field& h) {
  if (chi.arity() != 3) throw ConfigError("apply_pi3 needs an arity-3 symbol");
  detail::require_same_grid(f, g);
  detail::require_same_grid(f, h);
  const auto& grid = f.grid();
  const int km = grid.kmax();
  const auto A = detail::nonzero_modes(f, kPi3ModeCap);
  const auto B = detail::nonzero_modes(g, kPi3ModeCap);
  const auto C = detail::nonzero_modes(h, kPi3ModeCap);
  std::vector<cplx> d(grid.half_size());
  for (const auto& a : A)
    for (const auto& b : B) {
      const cplx ab = a.c * b.c;
      for (const auto& c : C) {
        const int m = a.k + b.k + c.k;
        if (m < 0 || m > km) continue;
        d[m] += chi(a.xi, b.xi, c.xi) * ab * c.c;
      }
    }
  return Field(grid, std::move(d));
}

// int_0^t int Pi^n_chi(u_1..u_n) u_{n+1} dx dt' by the trapezoid rule on the
// record times (t measured from the first sample).
inline double gt_functional(const MultiplierSymbol& chi, const std::vector<const TrajectoryRecord*>& u, double t) {
  const int n = chi.arity();
  if (n != 2 && n != 3) throw ConfigError("gt_functional supports arity 2 and 3");
  if (static_cast<int>(u.size()) != n + 1) throw ConfigError("gt_functional needs arity + 1 records");
  const auto& r0 = *u[0];
  for (auto* r : u) {
    if (!(r->grid() == r0.grid())) throw ConfigError("gt_functional: records on different grids");
    if (r->times() != r0.times()) throw ConfigError("gt_functional: records with different time samples");
  }
  if (t == 0.0) return 0.0;
  if (!(t > 0.0) || t > r0.span() * (1.0 + 1e-12)) throw ConfigError("gt_functional: t outside (0, record length]");

  const auto& ts = r0.times();
  auto integrand = [&](std::size_t j) {
    const Field p = (n == 2) ? apply_pi2(chi, (*u[0])[j], (*u[1])[j])
                             : apply_pi3(chi, (*u[0])[j], (*u[1])[j], (*u[2])[j]);
    return pairing(p, (*u[n])[j]);
  };
  double acc = 0.0;
  double prev = integrand(0);
  for (std::size_t j = 1; j < ts.size(); ++j) {
    const double a = ts[j - 1] - ts[0], b = ts[j] - ts[0];
    const double cur = integrand(j);
    if (t >= b * (1.0 - 1e-12)) {
      acc += 0.5 * (b - a) * (prev + cur);
    } else {
      const double lam = (t - a) / (b - a);
      const double mid = prev + lam * (cur - prev);
      acc += 0.5 * (t - a) * (prev + mid);
      break;
    }
    prev = cur;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Marcinkiewicz checker

struct MarcinkiewiczEntry {
  std::vector<int> beta;
  double max_normalized = 0.0;
};

struct MarcinkiewiczReport {
  std::vector<MarcinkiewiczEntry> entries;
  double window = 1e3;
  bool pass = false;

  double worst() const {
    double w = 0.0;
    for (auto& e : entries) w = std::max(w, e.max_normalized);
    return w;
  }
};

inline std::vector<std::vector<int>> multi_indices(int arity, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> b(arity, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == arity) {
      out.push_back(b);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      b[i] = v;
      rec(i + 1, left - v);
    }
    b[i] = 0;
  };
  rec(0, max_order);
  return out;
}

// Box with |xi_i| in [N_i/2, 2N_i] and the given signs.
inline Box dyadic_box(const std::vector<double>& N, const std::vector<int>& signs = {}) {
  Box b;
  for (std::size_t i = 0; i < N.size(); ++i) {
    const int s = signs.empty() ? 1 : signs[i];
    if (s > 0)
      b.push_back({N[i] / 2.0, 2.0 * N[i]});
    else
      b.push_back({-2.0 * N[i], -N[i] / 2.0});
  }
  return b;
}

// max over box sample points of |d^beta chi| prod |xi_i|^beta_i, per beta.
inline MarcinkiewiczReport check_marcinkiewicz(const MultiplierSymbol& chi, const std::vector<Box>& boxes,
                                               int beta_max = 3, int points = 32, double window = 1e3) {
  const int n = chi.arity();
  if (beta_max < 0 || beta_max > 4) throw ConfigError("beta_max must be in [0, 4]");
  const auto betas = multi_indices(n, beta_max);
  MarcinkiewiczReport rep;
  rep.window = window;
  for (auto& b : betas) rep.entries.push_back({b, 0.0});
  std::vector<double> x(n);
  for (const auto& box : boxes) {
    if (static_cast<int>(box.size()) != n) throw ConfigError("box dimension differs from symbol arity");
    std::vector<int> idx(n, 0);
    while (true) {
      for (int i = 0; i < n; ++i)
        x[i] = box[i].lo + (idx[i] + 0.5) * (box[i].hi - box[i].lo) / points;
      for (std::size_t e = 0; e < betas.size(); ++e) {
        const auto& b = betas[e];
        double v = std::abs(chi.partial(x, b));
        for (int i = 0; i < n; ++i) v *= std::pow(std::abs(x[i]), b[i]);
        auto& m = rep.entries[e].max_normalized;
        if (!std::isfinite(v))
          m = std::numeric_limits<double>::infinity();
        else
          m = std::max(m, v);
      }
      int i = 0;
      while (i < n && ++idx[i] == points) idx[i++] = 0;
      if (i == n) break;
    }
  }
  rep.pass = true;
  for (auto& e : rep.entries) rep.pass = rep.pass && std::isfinite(e.max_normalized) && e.max_normalized <= window;
  return rep;
}

// ---------------------------------------------------------------------------
// Commutator and corrector symbols

// chi(xi1, xi2) = -i int_0^1 phi'((theta xi1 + xi2)/N) dtheta, 32-point Gauss-Legendre.
inline cplx chi_commutator(double x1, double x2, double N) {
  using Gauss = boost::math::quadrature::gauss<double, 32>;
  const double I = Gauss::integrate([&](double th) { return lp::phi_prime((th * x1 + x2) / N); }, 0.0, 1.0);
  return cplx(0.0, -I);
}

inline MultiplierSymbol symbol_chi_commutator(double N) {
  lp::require_dyadic(N, "N");
  return MultiplierSymbol(
      2, [N](std::span<const double> x) { return chi_commutator(x[0], x[1], N); }, "chi_commutator");
}

// ||P_N(u_ll u) - u_ll P_N u - N^{-1} Pi2_chi(d_x u_ll, u)||_{L^2} / ||u||_{L^2}^2 with
// u_ll = P_{<<N} u and every product taken at coefficient level. The identity is
// exact, so this measures the quadrature error in chi.
inline double commutator_residual(const Field& u, double N) {
  lp::require_dyadic(N, "N");
  const Field low = lp::project_band(u, lp::Band::ll, N);
  const auto one = symbol_one(2);
  const Field a = lp::project(apply_pi2(one, low, u), N);
  const Field b = apply_pi2(one, low, lp::project(u, N));
  Field c = apply_pi2(symbol_chi_commutator(N), derivative(low), u);
  c *= 1.0 / N;
  const double nu = l2_norm(u);
  return nu > 0.0 ? l2_norm(a - b - c) / (nu * nu) : 0.0;
}

// (<N>/N)^{2s} (phi_N(xi2) + 2i ((xi1+xi2)/N) chi(xi1,xi2) tilde_phi_N(xi2)) phi_N(xi1+xi2)
inline cplx chi1_value(double x1, double x2, double N, double s) {
  const double outer = lp::phi_N(x1 + x2, N);
  if (outer == 0.0) return cplx{};
  const double w = std::pow(jbracket(N) / N, 2.0 * s);
  cplx inner = lp::phi_N(x2, N);
  const double tp = lp::tilde_phi_N(x2, N);
  if (tp != 0.0) inner += cplx(0.0, 2.0 * (x1 + x2) / N) * chi_commutator(x1, x2, N) * tp;
  return w * inner * outer;
}

inline MultiplierSymbol symbol_chi1(double N, double s) {
  lp::require_dyadic(N, "N");
  return MultiplierSymbol(
      2, [N, s](std::span<const double> x) { return chi1_value(x[0], x[1], N, s); }, "chi1");
}

struct GuardedValue {
  cplx value;
  bool guarded = false;
};

// numerator(xi1, xi2) / Omega2(xi1, xi2) on |xi1| <= N/16, N/4 <= |xi2| <= 4N,
// set to zero where |Omega2| <= 1e-10 |xi1| N^alpha.
class GuardedOverOmega2 {
 public:
  using Numerator = std::function<cplx(double, double)>;

  GuardedOverOmega2(DispersionSymbol sym, double N, Numerator num)
      : sym_(std::move(sym)), N_(N), num_(std::move(num)) {
    lp::require_dyadic(N, "N");
  }

  double N() const { return N_; }
  const DispersionSymbol& symbol() const { return sym_; }

  bool in_band(double x1, double x2) const {
    const double tol = 1e-12 * N_;
    const double a2 = std::abs(x2);
    return std::abs(x1) <= N_ / 16.0 + tol && a2 >= N_ / 4.0 - tol && a2 <= 4.0 * N_ + tol;
  }

  GuardedValue eval(double x1, double x2) const {
    if (!in_band(x1, x2)) {
      std::ostringstream os;
      os.precision(17);
      os << "corrector symbol evaluated outside its band at (" << x1 << ", " << x2 << "), N = " << N_;
      throw DomainError(os.str());
    }
    const double om = omega2(sym_, x1, x2);
    if (std::abs(om) <= 1e-10 * std::abs(x1) * std::pow(N_, sym_.alpha())) return {cplx{}, true};
    return {num_(x1, x2) / om, false};
  }

  cplx operator()(double x1, double x2) const { return eval(x1, x2).value; }

 private:
  DispersionSymbol sym_;
  double N_;
  Numerator num_;
};

inline GuardedOverOmega2 chi1_over_omega2(const DispersionSymbol& sym, double N, double s) {
  return GuardedOverOmega2(sym, N, [N, s](double a, double b) { return chi1_value(a, b, N, s); });
}

inline MultiplierSymbol symbol_chi1_over_omega2(const DispersionSymbol& sym, double N, double s) {
  auto g = chi1_over_omega2(sym, N, s);
  MultiplierSymbol m(2, [g](std::span<const double> x) { return g(x[0], x[1]); }, "chi1/Omega2");
  m.support = {{0.0, N / 16.0}, {N / 4.0, 4.0 * N}};
  return m;
}

// N1 N^alpha chi1 / Omega2, the form that should satisfy the Marcinkiewicz bound.
inline MultiplierSymbol symbol_chi1_over_omega2_normalized(const DispersionSymbol& sym, double N, double s,
                                                           double N1) {
  auto g = chi1_over_omega2(sym, N, s);
  const double scale = N1 * std::pow(N, sym.alpha());
  MultiplierSymbol m(2, [g, scale](std::span<const double> x) { return scale * g(x[0], x[1]); },
                     "N1 N^alpha chi1/Omega2");
  m.support = {{0.0, N / 16.0}, {N / 4.0, 4.0 * N}};
  return m;
}

// ---------------------------------------------------------------------------
// Symbol dump for plotting: xi1, xi2, re, im on a tensor grid.
inline void write_symbol_samples(std::ostream& os, const MultiplierSymbol& chi, const Box& box, int points) {
  if (chi.arity() != 2 || box.size() != 2) throw ConfigError("symbol dump supports arity 2 only");
  os << "xi1,xi2,re,im\n";
  os.precision(17);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) {
      const double a = box[0].lo + (i + 0.5) * (box[0].hi - box[0].lo) / points;
      const double b = box[1].lo + (j + 0.5) * (box[1].hi - box[1].lo) / points;
      const cplx v = chi(a, b);
      os << a << "," << b << "," << v.real() << "," << v.imag() << "\n";
    }
}

}  // namespace dbl
