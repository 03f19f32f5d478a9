#pragma once

// Periodic grid, real fields stored as half spectra, multipliers and
// dealiased products.
//
// Convention: c_k = (1/L) int_0^L u(x) exp(-i xi_k x) dx with xi_k = 2 pi k / L,
// so int u v w dx = L * sum_{k1+k2+k3=0} a_k1 b_k2 c_k3.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "dbl/errors.hpp"
#include "dbl/fft.hpp"

namespace dbl {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

inline bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

// Japanese bracket <x> = (1 + x^2)^(1/2).
inline double jbracket(double x) { return std::sqrt(1.0 + x * x); }

class SpectralGrid {
 public:
  explicit SpectralGrid(int n = 256, double length = 2.0 * kPi) : n_(n), length_(length) {
    if (!is_power_of_two(n) || n < 4)
      throw ConfigError("grid.n must be a power of two >= 4, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
      throw ConfigError("grid.length must be positive and finite");
  }

  int n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / n_; }
  double node(int j) const { return j * length_ / n_; }
  double frequency(int k) const { return 2.0 * kPi * k / length_; }
  // Largest |k| carried by a field; the Nyquist mode n/2 is always zero.
  int kmax() const { return n_ / 2 - 1; }
  int dealias_cutoff() const { return n_ / 3; }
  int half_size() const { return n_ / 2 + 1; }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j) x[j] = node(j);
    return x;
  }

  bool operator==(const SpectralGrid& o) const { return n_ == o.n_ && length_ == o.length_; }

 private:
  int n_;
  double length_;
};

// Real field on a SpectralGrid. Only k = 0..n/2 is stored; c_{-k} = conj(c_k)
// is implied, c_0 is kept real and the Nyquist entry is kept at zero.
class Field {
 public:
  explicit Field(const SpectralGrid& g) : grid_(g), c_(g.half_size(), cplx{}) {}

  Field(const SpectralGrid& g, std::vector<cplx> half) : grid_(g), c_(std::move(half)) {
    if (static_cast<int>(c_.size()) != g.half_size())
      throw ConfigError("half spectrum has " + std::to_string(c_.size()) + " entries, expected " +
                        std::to_string(g.half_size()));
    sanitize();
  }

  const SpectralGrid& grid() const { return grid_; }
  std::span<const cplx> half() const { return c_; }
  std::span<cplx> half() { return c_; }

  // Coefficient for any k with |k| < n/2; zero outside.
  cplx coeff(int k) const {
    if (k >= 0) return k <= grid_.kmax() ? c_[k] : cplx{};
    return -k <= grid_.kmax() ? std::conj(c_[-k]) : cplx{};
  }

  // Sets c_k (and implicitly c_{-k}). For k = 0 only the real part is kept.
  void set(int k, cplx v) {
    if (k < 0) {
      k = -k;
      v = std::conj(v);
    }
    if (k > grid_.kmax()) throw DomainError("mode " + std::to_string(k) + " outside retained range");
    c_[k] = (k == 0) ? cplx{v.real(), 0.0} : v;
  }

  std::vector<double> samples() const {
    std::vector<double> u(grid_.n());
    fft::c2r(c_, u);
    return u;
  }

  bool is_zero() const {
    for (auto& v : c_)
      if (v != cplx{}) return false;
    return true;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    for (auto& v : c_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Field& operator*=(double a) {
    for (auto& v : c_) v *= a;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field f) { return f *= a; }

  void sanitize() {
    c_[0] = cplx{c_[0].real(), 0.0};
    c_.back() = cplx{};
  }

 private:
  void check_same(const Field& o) const {
    if (!(grid_ == o.grid_)) throw ConfigError("fields live on different grids");
  }

  SpectralGrid grid_;
  std::vector<cplx> c_;
};

inline Field transform(const SpectralGrid& g, std::span<const double> samples) {
  if (static_cast<int>(samples.size()) != g.n())
    throw ConfigError("transform: got " + std::to_string(samples.size()) + " samples for n = " +
                      std::to_string(g.n()));
  std::vector<cplx> half(g.half_size());
  fft::r2c(samples, half);
  const double inv = 1.0 / g.n();
  for (auto& v : half) v *= inv;
  return Field(g, std::move(half));
}

template <class F>
Field from_function(const SpectralGrid& g, F&& u) {
  std::vector<double> s(g.n());
  for (int j = 0; j < g.n(); ++j) s[j] = u(g.node(j));
  return transform(g, s);
}

// Multiplies c_k by m(xi_k) for k >= 0; the negative half follows by symmetry,
// so m is effectively replaced by its Hermitian part. For k = 0 the real part
// of m(0) c_0 is kept.
template <class M>
Field apply_multiplier(const Field& f, M&& m) {
  const auto& g = f.grid();
  Field out(g);
  auto in = f.half();
  auto dst = out.half();
  for (int k = 0; k <= g.kmax(); ++k) {
    const double xi = g.frequency(k);
    const cplx mk = cplx(m(xi));
    if (!std::isfinite(mk.real()) || !std::isfinite(mk.imag())) {
      std::ostringstream os;
      os.precision(17);
      os << "multiplier is not finite at xi = " << xi;
      throw EvaluationError(os.str());
    }
    dst[k] = mk * in[k];
  }
  out.sanitize();
  return out;
}

inline Field derivative(const Field& f) {
  return apply_multiplier(f, [](double xi) { return cplx(0.0, xi); });
}

// Zeroes every mode with |k| > kc.
inline Field truncate(const Field& f, int kc) {
  Field out = f;
  auto c = out.half();
  for (int k = kc + 1; k < static_cast<int>(c.size()); ++k) c[k] = cplx{};
  return out;
}

// Pointwise product on the grid, no dealiasing.
inline Field grid_product(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw ConfigError("fields live on different grids");
  auto a = f.samples();
  auto b = g.samples();
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
  return transform(f.grid(), a);
}

// 2/3 rule: |k| > n/3 zeroed before and after the grid product.
inline Field dealiased_product(const Field& f, const Field& g) {
  const int kc = f.grid().dealias_cutoff();
  return truncate(grid_product(truncate(f, kc), truncate(g, kc)), kc);
}

inline Field dealiased_square(const Field& f) { return dealiased_product(f, f); }

// int_0^L f g dx = L * sum_k c_k conj(d_k).
inline double pairing(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw ConfigError("fields live on different grids");
  auto a = f.half();
  auto b = g.half();
  double s = a[0].real() * b[0].real();
  double t = 0.0;
  for (std::size_t k = 1; k < a.size(); ++k) t += (a[k] * std::conj(b[k])).real();
  return f.grid().length() * (s + 2.0 * t);
}

// L * sum_k w(xi_k) |c_k|^2 over all k (w must be even).
template <class W>
double weighted_square_sum(const Field& f, W&& w) {
  const auto& g = f.grid();
  auto c = f.half();
  double s = w(0.0) * std::norm(c[0]);
  for (int k = 1; k <= g.kmax(); ++k) s += 2.0 * w(g.frequency(k)) * std::norm(c[k]);
  return g.length() * s;
}

inline double sobolev_norm(const Field& f, double s) {
  return std::sqrt(weighted_square_sum(f, [s](double xi) { return std::pow(1.0 + xi * xi, s); }));
}

// Homogeneous norm; the mean mode is excluded.
inline double homogeneous_sobolev_norm(const Field& f, double s) {
  return std::sqrt(weighted_square_sum(
      f, [s](double xi) { return xi == 0.0 ? 0.0 : std::pow(std::abs(xi), 2.0 * s); }));
}

inline double l2_norm(const Field& f) { return sobolev_norm(f, 0.0); }

// Mean-free random field with c_k ~ N(0,1) + i N(0,1) times <xi_k>^(-decay)
// for 1 <= k <= kmax, rescaled so that ||u||_{H^s} = norm.
inline Field random_field(const SpectralGrid& g, unsigned long long seed, int kmax, double decay,
                          double s = 0.0, double norm = 1.0) {
  if (kmax < 1 || kmax > g.kmax()) throw ConfigError("random_field: kmax out of range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field f(g);
  auto c = f.half();
  for (int k = 1; k <= kmax; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    c[k] = cplx(re, im) * std::pow(jbracket(g.frequency(k)), -decay);
  }
  const double cur = sobolev_norm(f, s);
  if (cur > 0.0) f *= norm / cur;
  return f;
}

}  // namespace dbl
