#pragma once

// Discrete space-time transform of a uniformly sampled record, and the
// modulation projectors Q_L built on it.
//
// The time transform uses the kernel exp(+i tau t), so a free solution
// c_k(t) = c_k(0) exp(-i omega(xi_k) t) concentrates at tau = omega(xi_k).

#include <cmath>
#include <vector>

#include "dbl/dispersion.hpp"
#include "dbl/littlewood_paley.hpp"
#include "dbl/trajectory.hpp"

namespace dbl {

// Raised cosine taper over `fraction` of the samples at each end.
inline std::vector<double> raised_cosine_window(std::size_t M, double fraction = 0.1) {
  std::vector<double> w(M, 1.0);
  if (M < 3) return w;
  const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * M)));
  for (std::size_t j = 0; j < m && j < M; ++j) {
    const double v = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(j) / m));
    w[j] = v;
    w[M - 1 - j] = v;
  }
  return w;
}

class SpaceTimeSpectrum {
 public:
  SpaceTimeSpectrum(const SpectralGrid& g, std::size_t M, double dt)
      : grid_(g), M_(M), dt_(dt), data_((g.kmax() + 1) * M) {}

  const SpectralGrid& grid() const { return grid_; }
  std::size_t samples() const { return M_; }
  double dt() const { return dt_; }

  // Angular frequency of bin m in FFT order.
  double tau(std::size_t m) const {
    const long long mm = (m <= M_ / 2) ? static_cast<long long>(m) : static_cast<long long>(m) - static_cast<long long>(M_);
    return 2.0 * kPi * static_cast<double>(mm) / (static_cast<double>(M_) * dt_);
  }

  // tau - omega(xi) reduced to the principal interval [-pi/dt, pi/dt).
  double modulation(const DispersionSymbol& sym, int k, std::size_t m) const {
    const double period = 2.0 * kPi / dt_;
    double s = tau(m) - sym.omega(grid_.frequency(k));
    s -= period * std::floor(s / period + 0.5);
    return s;
  }

  cplx& at(int k, std::size_t m) { return data_[static_cast<std::size_t>(k) * M_ + m]; }
  const cplx& at(int k, std::size_t m) const { return data_[static_cast<std::size_t>(k) * M_ + m]; }

 private:
  SpectralGrid grid_;
  std::size_t M_;
  double dt_;
  std::vector<cplx> data_;
};

// X[k][m] = sum_j w_j c_k(t_j) exp(+2 pi i j m / M), k >= 0 only.
inline SpaceTimeSpectrum spacetime_transform(const TrajectoryRecord& r, bool window = true) {
  const double dt = r.uniform_step();
  const std::size_t M = r.size();
  const auto w = window ? raised_cosine_window(M) : std::vector<double>(M, 1.0);
  const auto& g = r.grid();
  SpaceTimeSpectrum S(g, M, dt);
  std::vector<cplx> series(M);
  for (int k = 0; k <= g.kmax(); ++k) {
    for (std::size_t j = 0; j < M; ++j) series[j] = w[j] * r[j].half()[k];
    fft::c2c(series, FFTW_BACKWARD);
    for (std::size_t m = 0; m < M; ++m) S.at(k, m) = series[m];
  }
  return S;
}

inline TrajectoryRecord inverse_spacetime(const SpaceTimeSpectrum& S, const std::vector<double>& times) {
  const auto& g = S.grid();
  const std::size_t M = S.samples();
  if (times.size() != M) throw ConfigError("inverse_spacetime: time count mismatch");
  std::vector<std::vector<cplx>> halves(M, std::vector<cplx>(g.half_size()));
  std::vector<cplx> series(M);
  for (int k = 0; k <= g.kmax(); ++k) {
    for (std::size_t m = 0; m < M; ++m) series[m] = S.at(k, m);
    fft::c2c(series, FFTW_FORWARD);
    for (std::size_t j = 0; j < M; ++j) halves[j][k] = series[j] / static_cast<double>(M);
  }
  TrajectoryRecord out(g);
  for (std::size_t j = 0; j < M; ++j) out.append(times[j], Field(g, std::move(halves[j])));
  return out;
}

// Windowed record multiplied by weight(sigma) in space-time frequency.
template <class W>
TrajectoryRecord modulation_filter(const TrajectoryRecord& r, const DispersionSymbol& sym, W&& weight) {
  SpaceTimeSpectrum S = spacetime_transform(r);
  for (int k = 0; k <= r.grid().kmax(); ++k)
    for (std::size_t m = 0; m < S.samples(); ++m) S.at(k, m) *= weight(S.modulation(sym, k, m));
  TrajectoryRecord out = inverse_spacetime(S, r.times());
  out.metadata = r.metadata;
  return out;
}

// Q_L.
inline TrajectoryRecord modulation_project(const TrajectoryRecord& r, double L, const DispersionSymbol& sym) {
  if (!(L >= 1.0)) throw ConfigError("modulation scale L must be >= 1");
  lp::require_dyadic(L, "L");
  return modulation_filter(r, sym, [L](double s) { return lp::psi_L(s, L); });
}

// Q_{<=L} = sum_{L' <= L} Q_L', i.e. the weight eta(sigma / L).
inline TrajectoryRecord modulation_project_le(const TrajectoryRecord& r, double L, const DispersionSymbol& sym) {
  if (!(L >= 1.0)) throw ConfigError("modulation scale L must be >= 1");
  lp::require_dyadic(L, "L");
  return modulation_filter(r, sym, [L](double s) { return lp::eta(s / L); });
}

// Modulation scales 1, 2, ... covering |sigma| <= pi/dt.
inline std::vector<double> modulation_scales(double dt) {
  std::vector<double> Ls{1.0};
  while (Ls.back() < kPi / dt) Ls.push_back(2.0 * Ls.back());
  return Ls;
}

}  // namespace dbl
