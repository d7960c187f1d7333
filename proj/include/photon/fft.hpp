#pragma once
// Thin RAII wrapper over FFTW for n^3 complex transforms.

#include "photon/core.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace photon {

namespace detail {
// FFTW planning is not thread-safe.
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

enum class FftSign { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

/// Unnormalised in-place 3-D DFT, sum_x f(x) exp(sign * 2 pi i x.m / n).
/// FFTW_ESTIMATE plans are deterministic, which the CLI reports rely on.
class Fft3 {
 public:
  Fft3(std::size_t n, FftSign sign) : n_(n), buffer_(n * n * n) {
    std::lock_guard lock(detail::fftw_plan_mutex());
    plan_ = fftw_plan_dft_3d(static_cast<int>(n), static_cast<int>(n), static_cast<int>(n),
                             reinterpret_cast<fftw_complex*>(buffer_.data()),
                             reinterpret_cast<fftw_complex*>(buffer_.data()), static_cast<int>(sign),
                             FFTW_ESTIMATE);
  }
  ~Fft3() {
    std::lock_guard lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(plan_);
  }
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  std::vector<cdouble>& buffer() noexcept { return buffer_; }
  void execute() { fftw_execute(plan_); }

  /// Transforms `data` in place.
  void operator()(std::vector<cdouble>& data) {
    if (data.size() != buffer_.size())
      throw Error(ErrorCode::invalid_argument, "fft buffer size mismatch");
    std::copy(data.begin(), data.end(), buffer_.begin());
    execute();
    std::copy(buffer_.begin(), buffer_.end(), data.begin());
  }

 private:
  std::size_t n_;
  std::vector<cdouble> buffer_;
  fftw_plan plan_ = nullptr;
};

}  // namespace photon
