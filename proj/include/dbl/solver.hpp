#pragma once

// Time integration of u_t + L u = (u^2)_x on the torus. The linear part is
// diagonal, c_k' = -i omega(xi_k) c_k + N(c)_k, N(c)_k = i xi_k (u^2)_k.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dbl/dispersion.hpp"
#include "dbl/energies.hpp"
#include "dbl/spectral.hpp"
#include "dbl/trajectory.hpp"

namespace dbl {

enum class Scheme { ifrk4, etdrk4 };

inline std::string to_string(Scheme s) { return s == Scheme::ifrk4 ? "ifrk4" : "etdrk4"; }

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "ifrk4") return Scheme::ifrk4;
  if (s == "etdrk4") return Scheme::etdrk4;
  throw ConfigError("unknown time.scheme '" + s + "' (expected ifrk4 or etdrk4)");
}

struct SolverConfig {
  Scheme scheme = Scheme::ifrk4;
  double dt = 1e-3;
  double t_final = 1.0;
  int record_every = 100;
  bool dealias = true;
  bool nonlinear = true;  // false: free linear evolution only

  long long steps() const { return std::llround(t_final / dt); }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time.dt must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("time.t_final must be positive");
    if (record_every < 1) throw ConfigError("time.record_every must be >= 1");
    if (steps() < 1) throw ConfigError("time.t_final shorter than one step");
    if (std::abs(steps() * dt - t_final) > 1e-9 * t_final) throw ConfigError("time.t_final is not reachable in whole steps");
  }
};

inline constexpr double kBlowUpThreshold = 1e12;

// Stepper with the per-mode exponentials precomputed. The step size may be
// negative (used for backward steps in consistency checks).
class Integrator {
 public:
  Integrator(const SpectralGrid& g, const DispersionSymbol& sym, Scheme scheme, double dt, bool dealias = true,
             bool nonlinear = true)
      : grid_(g), scheme_(scheme), dt_(dt), dealias_(dealias), nonlinear_(nonlinear) {
    const int K = g.half_size();
    e_half_.resize(K);
    e_full_.resize(K);
    ik_.resize(K);
    for (int k = 0; k < K; ++k) {
      const double om = (k <= g.kmax()) ? sym.omega(g.frequency(k)) : 0.0;
      e_half_[k] = std::exp(cplx(0.0, -om * dt / 2.0));
      e_full_[k] = std::exp(cplx(0.0, -om * dt));
      ik_[k] = cplx(0.0, g.frequency(k));
    }
    if (scheme == Scheme::etdrk4) init_etd(sym);
  }

  double dt() const { return dt_; }

  Field nonlinearity(const Field& u) const {
    Field sq = dealias_ ? dealiased_square(u) : grid_product(u, u);
    auto c = sq.half();
    for (int k = 0; k < static_cast<int>(c.size()); ++k) c[k] *= ik_[k];
    sq.sanitize();
    return sq;
  }

  Field step(const Field& u) const {
    if (!nonlinear_) return scale(u, e_full_);
    return scheme_ == Scheme::ifrk4 ? step_ifrk4(u) : step_etdrk4(u);
  }

 private:
  Field scale(const Field& u, const std::vector<cplx>& e) const {
    Field out = u;
    auto c = out.half();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= e[k];
    out.sanitize();
    return out;
  }

  // out = e1 * a + h * e2 * b (elementwise; missing factors are 1)
  Field combine(const Field& a, const std::vector<cplx>* ea, const Field& b, const std::vector<cplx>* eb,
                double h) const {
    Field out(grid_);
    auto o = out.half();
    auto A = a.half();
    auto B = b.half();
    for (std::size_t k = 0; k < o.size(); ++k)
      o[k] = (ea ? (*ea)[k] : 1.0) * A[k] + h * (eb ? (*eb)[k] : 1.0) * B[k];
    out.sanitize();
    return out;
  }

  Field step_ifrk4(const Field& c) const {
    const double h = dt_;
    const Field k1 = nonlinearity(c);
    const Field a = scale(combine(c, nullptr, k1, nullptr, h / 2), e_half_);
    const Field k2 = nonlinearity(a);
    const Field b = combine(c, &e_half_, k2, nullptr, h / 2);
    const Field k3 = nonlinearity(b);
    const Field d = combine(c, &e_full_, k3, &e_half_, h);
    const Field k4 = nonlinearity(d);
    Field out(grid_);
    auto o = out.half();
    auto C = c.half(), K1 = k1.half(), K2 = k2.half(), K3 = k3.half(), K4 = k4.half();
    for (std::size_t k = 0; k < o.size(); ++k)
      o[k] = e_full_[k] * C[k] +
             (h / 6.0) * (e_full_[k] * K1[k] + 2.0 * e_half_[k] * (K2[k] + K3[k]) + K4[k]);
    out.sanitize();
    return out;
  }

  // Cox-Matthews ETDRK4 with the phi-functions evaluated by contour means
  // (Kassam-Trefethen); the full circle is used since L is imaginary.
  void init_etd(const DispersionSymbol& sym) {
    const int K = grid_.half_size();
    const int M = 64;
    q_.resize(K);
    f1_.resize(K);
    f2_.resize(K);
    f3_.resize(K);
    const double h = dt_;
    for (int k = 0; k < K; ++k) {
      const double om = (k <= grid_.kmax()) ? sym.omega(grid_.frequency(k)) : 0.0;
      const cplx Lh(0.0, -om * h);
      cplx q{}, a{}, b{}, c{};
      for (int j = 0; j < M; ++j) {
        const cplx r = std::exp(cplx(0.0, 2.0 * kPi * (j + 0.5) / M));
        const cplx z = Lh + r;
        const cplx ez = std::exp(z), ez2 = std::exp(z / 2.0);
        const cplx z3 = z * z * z;
        q += (ez2 - 1.0) / z;
        a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        b += (2.0 + z + ez * (z - 2.0)) / z3;
        c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      q_[k] = h * q / double(M);
      f1_[k] = h * a / double(M);
      f2_[k] = h * b / double(M);
      f3_[k] = h * c / double(M);
    }
  }

  Field step_etdrk4(const Field& v) const {
    const Field Nv = nonlinearity(v);
    const Field a = combine(v, &e_half_, Nv, &q_, 1.0);
    const Field Na = nonlinearity(a);
    const Field b = combine(v, &e_half_, Na, &q_, 1.0);
    const Field Nb = nonlinearity(b);
    Field tmp(grid_);
    {
      auto t = tmp.half();
      auto NB = Nb.half(), NV = Nv.half();
      for (std::size_t k = 0; k < t.size(); ++k) t[k] = 2.0 * NB[k] - NV[k];
    }
    const Field c = combine(a, &e_half_, tmp, &q_, 1.0);
    const Field Nc = nonlinearity(c);
    Field out(grid_);
    auto o = out.half();
    auto V = v.half(), NV = Nv.half(), NA = Na.half(), NB = Nb.half(), NC = Nc.half();
    for (std::size_t k = 0; k < o.size(); ++k)
      o[k] = e_full_[k] * V[k] + NV[k] * f1_[k] + 2.0 * (NA[k] + NB[k]) * f2_[k] + NC[k] * f3_[k];
    out.sanitize();
    return out;
  }

  SpectralGrid grid_;
  Scheme scheme_;
  double dt_;
  bool dealias_;
  bool nonlinear_;
  std::vector<cplx> e_half_, e_full_, ik_;
  std::vector<cplx> q_, f1_, f2_, f3_;
};

inline bool blown_up(const Field& u) { return !u.all_finite() || u.max_abs_coeff() > kBlowUpThreshold; }

// One step; throws BlowUpError when the result is non-finite or exceeds the threshold.
inline Field step(const Field& u, const DispersionSymbol& sym, const SolverConfig& cfg, double t = 0.0) {
  cfg.validate();
  Integrator I(u.grid(), sym, cfg.scheme, cfg.dt, cfg.dealias, cfg.nonlinear);
  Field v = I.step(u);
  if (blown_up(v)) throw BlowUpError("solution blew up after t = " + std::to_string(t), t);
  return v;
}

struct Diagnostics {
  bool enabled = false;
  double s = 0.3;
  double n0 = 64.0;
  int every = 1;  // energy report every `every` recorded snapshots
};

struct RunResult {
  TrajectoryRecord record;
  std::vector<EnergyReport> reports;
  bool blew_up = false;
  double last_valid_time = 0.0;
};

using SnapshotHook = std::function<void(std::size_t index, double t, const Field&, const EnergyReport*)>;

inline RunResult run(const Field& u0, const DispersionSymbol& sym, const SolverConfig& cfg,
                     const Diagnostics& diag = {}, const SnapshotHook& hook = {}) {
  cfg.validate();
  if (diag.every < 1) throw ConfigError("diagnostics.every must be >= 1");
  const auto& g = u0.grid();
  Integrator I(g, sym, cfg.scheme, cfg.dt, cfg.dealias, cfg.nonlinear);
  RunResult res{TrajectoryRecord(g), {}, false, 0.0};
  res.record.metadata["symbol"] = to_string(sym.kind());
  res.record.metadata["scheme"] = to_string(cfg.scheme);
  std::size_t recorded = 0;
  auto record = [&](double t, const Field& u) {
    res.record.append(t, u);
    const EnergyReport* rp = nullptr;
    if (diag.enabled && recorded % static_cast<std::size_t>(diag.every) == 0) {
      auto rep = modified_energy(u, sym, diag.s, diag.n0);
      rep.t = t;
      res.reports.push_back(std::move(rep));
      rp = &res.reports.back();
    }
    if (hook) hook(recorded, t, u, rp);
    ++recorded;
  };
  Field u = u0;
  record(0.0, u);
  const long long n = cfg.steps();
  for (long long i = 1; i <= n; ++i) {
    Field v = I.step(u);
    if (blown_up(v)) {
      res.blew_up = true;
      res.last_valid_time = static_cast<double>(i - 1) * cfg.dt;
      return res;
    }
    u = std::move(v);
    if (i % cfg.record_every == 0 || i == n) record(static_cast<double>(i) * cfg.dt, u);
  }
  res.last_valid_time = static_cast<double>(n) * cfg.dt;
  return res;
}

// Final state only.
inline Field evolve(const Field& u0, const DispersionSymbol& sym, const SolverConfig& cfg) {
  cfg.validate();
  Integrator I(u0.grid(), sym, cfg.scheme, cfg.dt, cfg.dealias, cfg.nonlinear);
  Field u = u0;
  const long long n = cfg.steps();
  for (long long i = 1; i <= n; ++i) {
    u = I.step(u);
    if (blown_up(u))
      throw BlowUpError("solution blew up after t = " + std::to_string((i - 1) * cfg.dt), (i - 1) * cfg.dt);
  }
  return u;
}

struct ScalingReport {
  double lambda = 1.0;
  double max_rel_discrepancy = 0.0;
  double critical_norm_u = 0.0;
  double critical_norm_v = 0.0;
  double critical_norm_rel_diff = 0.0;
  std::size_t compared_times = 0;
};

// u solves on period L over [0, lambda^{alpha+1} T] with dt_u = lambda^{alpha+1} dt;
// v = lambda^alpha u0(lambda x) solves on period L/lambda over [0, T] with dt.
// Same n, so node j of v corresponds to node j of u.
inline ScalingReport scaling_check(const DispersionSymbol& sym, double lambda, const Field& u0,
                                   const SolverConfig& cfg) {
  if (sym.kind() != SymbolKind::pure_power) throw ConfigError("scaling_check needs a pure_power symbol");
  if (!lp::is_dyadic(lambda)) throw ConfigError("scaling factor lambda must be a power of two");
  cfg.validate();
  const double a = sym.alpha();
  const double tscale = std::pow(lambda, a + 1.0);
  const auto& gu = u0.grid();
  const SpectralGrid gv(gu.n(), gu.length() / lambda);

  std::vector<cplx> half(u0.half().begin(), u0.half().end());
  const double amp = std::pow(lambda, a);
  for (auto& c : half) c *= amp;
  const Field v0(gv, std::move(half));

  SolverConfig cu = cfg, cv = cfg;
  cu.dt = cfg.dt * tscale;
  cu.t_final = cfg.t_final * tscale;
  const auto ru = run(u0, sym, cu);
  const auto rv = run(v0, sym, cv);
  if (ru.blew_up || rv.blew_up) throw BlowUpError("scaling_check run blew up", 0.0);

  ScalingReport rep;
  rep.lambda = lambda;
  for (std::size_t j = 0; j < std::min(ru.record.size(), rv.record.size()); ++j) {
    const auto su = ru.record[j].samples();
    const auto sv = rv.record[j].samples();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < su.size(); ++i) {
      num = std::max(num, std::abs(amp * su[i] - sv[i]));
      den = std::max(den, std::abs(sv[i]));
    }
    if (den > 0.0) rep.max_rel_discrepancy = std::max(rep.max_rel_discrepancy, num / den);
    ++rep.compared_times;
  }
  const double sc = scaling_critical_index(a);
  rep.critical_norm_u = homogeneous_sobolev_norm(u0, sc);
  rep.critical_norm_v = homogeneous_sobolev_norm(v0, sc);
  rep.critical_norm_rel_diff = std::abs(rep.critical_norm_u - rep.critical_norm_v) / rep.critical_norm_u;
  return rep;
}

}  // namespace dbl
