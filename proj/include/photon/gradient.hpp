#pragma once
// k-space gradients of scalar samples.
//
// Cartesian grids: spectral differentiation (one forward 3-D DFT, multiply by
// i xi per axis, three inverse DFTs); the Nyquist mode is zeroed so the
// discrete operator is exactly skew-Hermitian.
// Spherical grids: 4th-order finite differences in (k, cos theta, phi) with
// Fornberg weights on the non-uniform Gauss nodes (one-sided 5-point stencils
// at the ends), periodic central differences in phi, combined as
//   grad f = k_hat df/dk - theta_hat (sin theta / k) df/dmu
//            + phi_hat (1 / (k sin theta)) df/dphi.

#include "photon/fft.hpp"
#include "photon/kgrid.hpp"
#include "photon/polarization.hpp"

#include <array>

namespace photon {

using GradientField = std::array<std::vector<cdouble>, 3>;

namespace detail {

/// First-derivative weights at x0 for the stencil xs (Fornberg 1988).
inline std::vector<double> fornberg_first_derivative(double x0, std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

/// Differentiation stencils along one non-uniform axis: for each node, the
/// first index of a 5-point window and its weights.
struct AxisStencil {
  std::vector<std::size_t> start;
  std::vector<std::vector<double>> weights;
};

inline AxisStencil build_axis_stencil(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t width = std::min<std::size_t>(5, n);
  AxisStencil s;
  s.start.resize(n);
  s.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i < 2 ? 0 : std::min(i - 2, n - width);
    s.start[i] = lo;
    s.weights[i] = fornberg_first_derivative(x[i], std::span<const double>(x).subspan(lo, width));
  }
  return s;
}

}  // namespace detail

inline GradientField spectral_gradient(const CartesianGrid& grid, const std::vector<cdouble>& f) {
  const std::size_t n = grid.n();
  std::vector<cdouble> spectrum(f);
  Fft3(n, FftSign::forward)(spectrum);
  std::vector<double> xi(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double ms = m < n / 2 ? static_cast<double>(m) : (m == n / 2 ? 0.0 : static_cast<double>(m) - n);
    xi[m] = 2.0 * pi * ms / (static_cast<double>(n) * grid.dk());
  }
  const double inv = 1.0 / static_cast<double>(n * n * n);
  GradientField out;
  Fft3 back(n, FftSign::backward);
  for (int a = 0; a < 3; ++a) {
    auto& g = out[a];
    g.resize(spectrum.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) {
          const std::size_t idx = grid.index(i, j, l);
          const std::size_t m = a == 0 ? i : (a == 1 ? j : l);
          g[idx] = spectrum[idx] * (I * xi[m] * inv);
        }
    back(g);
  }
  return out;
}

inline GradientField spherical_gradient(const SphericalGrid& grid, const std::vector<cdouble>& f) {
  const std::size_t nt = grid.n_theta(), np = grid.n_phi();
  const auto sr = detail::build_axis_stencil(grid.radii());
  const auto sm = detail::build_axis_stencil(grid.mu());
  const double dphi = 2.0 * pi / static_cast<double>(np);

  GradientField out;
  for (auto& g : out) g.assign(f.size(), cdouble{});
  parallel_for(f.size(), [&](std::size_t idx) {
    const std::size_t ir = idx / (nt * np), it = (idx / np) % nt, ip = idx % np;
    cdouble dk{}, dmu{}, dph{};
    for (std::size_t s = 0; s < sr.weights[ir].size(); ++s)
      dk += sr.weights[ir][s] * f[grid.index(sr.start[ir] + s, it, ip)];
    for (std::size_t s = 0; s < sm.weights[it].size(); ++s)
      dmu += sm.weights[it][s] * f[grid.index(ir, sm.start[it] + s, ip)];
    auto at = [&](long off) {
      const long p = (static_cast<long>(ip) + off + static_cast<long>(np)) % static_cast<long>(np);
      return f[grid.index(ir, it, static_cast<std::size_t>(p))];
    };
    if (np >= 5)
      dph = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * dphi);
    else
      dph = (at(1) - at(-1)) / (2.0 * dphi);

    const KNode& n = grid.node(idx);
    const Direction d{n.theta, n.phi};
    const double k = n.kmag;
    const double st = std::sin(n.theta);
    const Vec3 g_r = k_hat(d), g_t = theta_hat(d), g_p = phi_hat(d);
    const cdouble a_t = -dmu * (st / k);
    const cdouble a_p = dph / (k * st);
    for (int c = 0; c < 3; ++c) out[c][idx] = g_r[c] * dk + g_t[c] * a_t + g_p[c] * a_p;
  });
  return out;
}

/// Gradient with the scheme matching the grid family.
inline GradientField k_gradient(const KSpaceGrid& grid, const std::vector<cdouble>& f) {
  if (grid.kind() == GridKind::cartesian)
    return spectral_gradient(static_cast<const CartesianGrid&>(grid), f);
  return spherical_gradient(static_cast<const SphericalGrid&>(grid), f);
}

}  // namespace photon
