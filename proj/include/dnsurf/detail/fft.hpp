#ifndef DNSURF_DETAIL_FFT_HPP
#define DNSURF_DETAIL_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace dnsurf::detail {

using cplx = std::complex<double>;

// FFTW planning is not thread safe; execution with the new-array interface is.
class fft_plan_cache {
 public:
  static fft_plan_cache& instance() {
    static fft_plan_cache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  fft_plan_cache(const fft_plan_cache&) = delete;
  fft_plan_cache& operator=(const fft_plan_cache&) = delete;

 private:
  fft_plan_cache() = default;
  ~fft_plan_cache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

/// Normalised Fourier coefficients c_k = (1/N) sum_j v_j e^{-i k t_j}, stored in
/// FFT order (k = 0..N/2-1, then negative frequencies).
inline std::vector<cplx> forward(std::vector<cplx> v) {
  if (v.empty()) return v;
  fftw_plan plan = fft_plan_cache::instance().get(v.size(), FFTW_FORWARD);
  auto* p = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(plan, p, p);
  const double s = 1.0 / static_cast<double>(v.size());
  for (auto& c : v) c *= s;
  return v;
}

/// Inverse of `forward`: values from normalised coefficients.
inline std::vector<cplx> backward(std::vector<cplx> c) {
  if (c.empty()) return c;
  fftw_plan plan = fft_plan_cache::instance().get(c.size(), FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(c.data());
  fftw_execute_dft(plan, p, p);
  return c;
}

/// Signed frequency of FFT slot k for even N; the Nyquist slot maps to N/2.
inline long frequency(std::size_t k, std::size_t n) {
  const long kk = static_cast<long>(k);
  const long nn = static_cast<long>(n);
  return kk <= nn / 2 ? kk : kk - nn;
}

}  // namespace dnsurf::detail

#endif
