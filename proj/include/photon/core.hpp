#pragma once
// Shared vocabulary: complex aliases, small Eigen vectors, the error type,
// deterministic reductions and the thread pool used by nodewise maps.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <exception>
#include <thread>
#include <vector>

namespace photon {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;
using Vec4 = Eigen::Vector4d;
using CVec4 = Eigen::Matrix<cdouble, 4, 1>;
using Mat4 = Eigen::Matrix4d;

inline constexpr double pi = std::numbers::pi;
inline constexpr cdouble I{0.0, 1.0};
// (2 pi)^{-3/2}, the Fourier normalisation used for every k <-> r map.
inline const double inv_two_pi_three_halves = 1.0 / std::pow(2.0 * pi, 1.5);

enum class ErrorCode {
  invalid_argument,
  pole_singularity,
  invalid_state,
  wrong_grid,
  incompatible_grids,
  form_pairing,
  unsupported_chi,
  needs_analytic_state,
  ill_conditioned,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::pole_singularity: return "pole-singularity";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::wrong_grid: return "wrong-grid";
    case ErrorCode::incompatible_grids: return "incompatible-grids";
    case ErrorCode::form_pairing: return "form-pairing";
    case ErrorCode::unsupported_chi: return "unsupported-chi";
    case ErrorCode::needs_analytic_state: return "needs-analytic-state";
    case ErrorCode::ill_conditioned: return "ill-conditioned";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Pairwise summation over a contiguous range. The split points depend only
/// on the length, so results are reproducible regardless of thread count.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  constexpr std::size_t block = 64;
  if (values.size() <= block) {
    T acc{};
    for (const T& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

/// Worker count: PHOTON_NUMERICS_THREADS if set and positive, otherwise the
/// hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("PHOTON_NUMERICS_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) over contiguous chunks. fn must only write to
/// slot i of its outputs.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n / 4096 + 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, &err = errors[w]] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  // Rethrow the error of the lowest chunk, as a serial loop would have.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline bool is_finite(cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// |a - b| relative to `scale`, falling back to absolute when scale is 0.
inline double relative_deviation(cdouble a, cdouble b, double scale) {
  const double d = std::abs(a - b);
  return scale > 0.0 ? d / scale : d;
}

}  // namespace photon
