#pragma once

// Thin FFTW wrapper. Plans are created with FFTW_ESTIMATE so results do not
// depend on timing measurements, and cached per thread; the FFTW planner
// itself is not thread safe, hence the global mutex.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace dbl::fft {

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  fftw_plan p = nullptr;
  Plan() = default;
  explicit Plan(fftw_plan q) : p(q) {}
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    if (p) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(p);
    }
  }
};

struct RealPlans {
  Plan forward;
  Plan backward;
};

inline const RealPlans& real_plans(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<RealPlans>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto plans = std::make_unique<RealPlans>();
  std::vector<double> r(n);
  std::vector<std::complex<double>> c(n / 2 + 1);
  auto* cp = reinterpret_cast<fftw_complex*>(c.data());
  {
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    plans->forward.p = fftw_plan_dft_r2c_1d(ni, r.data(), cp, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans->backward.p = fftw_plan_dft_c2r_1d(ni, cp, r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  return *cache.emplace(n, std::move(plans)).first->second;
}

inline const Plan& complex_plan(std::size_t n, int sign) {
  thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<Plan>> cache;
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  auto plan = std::make_unique<Plan>();
  std::vector<std::complex<double>> a(n), b(n);
  {
    std::lock_guard lock(planner_mutex());
    plan->p = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                               reinterpret_cast<fftw_complex*>(b.data()), sign,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  return *cache.emplace(key, std::move(plan)).first->second;
}

}  // namespace detail

// out[k] = sum_j in[j] exp(-2 pi i j k / n), k = 0..n/2. Unnormalized.
inline void r2c(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  std::vector<double> tmp(in.begin(), in.end());
  fftw_execute_dft_r2c(detail::real_plans(n).forward.p, tmp.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

// Inverse of r2c up to the factor n; the input is read as a Hermitian half spectrum.
inline void c2r(std::span<const std::complex<double>> in, std::span<double> out) {
  const std::size_t n = out.size();
  std::vector<std::complex<double>> tmp(in.begin(), in.end());
  fftw_execute_dft_c2r(detail::real_plans(n).backward.p, reinterpret_cast<fftw_complex*>(tmp.data()),
                       out.data());
}

// In-place complex DFT. sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1). Unnormalized.
inline void c2c(std::span<std::complex<double>> data, int sign) {
  std::vector<std::complex<double>> out(data.size());
  fftw_execute_dft(detail::complex_plan(data.size(), sign).p,
                   reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  std::copy(out.begin(), out.end(), data.begin());
}

}  // namespace dbl::fft
