#pragma once
//
// Thin RAII wrapper over FFTW for one-shot complex transforms. FFTW's planner
// is not thread-safe, so plan creation/destruction is serialized; execution
// runs unlocked on per-call buffers.
//

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace clc::fft {

namespace detail {
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

inline std::vector<std::complex<double>> transform(std::span<const std::complex<double>> in, int sign) {
  const std::size_t n = in.size();
  if (n == 0) return {};
  FftwBuffer buf(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data, buf.data, sign, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fftw planning failed");
  for (std::size_t i = 0; i < n; ++i) {
    buf.data[i][0] = in[i].real();
    buf.data[i][1] = in[i].imag();
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {buf.data[i][0], buf.data[i][1]};
  return out;
}
}  // namespace detail

/// out[k] = sum_i in[i] exp(-2 pi i i k / n)  (unnormalized)
inline std::vector<std::complex<double>> forward(std::span<const std::complex<double>> in) {
  return detail::transform(in, FFTW_FORWARD);
}

/// out[k] = sum_i in[i] exp(+2 pi i i k / n)  (unnormalized)
inline std::vector<std::complex<double>> backward(std::span<const std::complex<double>> in) {
  return detail::transform(in, FFTW_BACKWARD);
}

/// Signed frequency index of FFT bin k for length n: k for k < ceil(n/2), k - n otherwise.
inline long signed_bin(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace clc::fft
