#pragma once
// Localized detection states, the photon number amplitude, linear
// polarisation detection, and the Glauber-density comparison.
//
// The number amplitude
//   c_sigma(r, t) = int d^3k exp(i sigma chi + i k.r - i omega t) c_sigma(k) / (2 pi)^{3/2}
// is the scalar product of the localized state
//   d_sigma'(k; r, t, chi) = delta_{sigma' sigma} exp(-i sigma chi - i k.r + i omega t) / (2 pi)^{3/2}
// with the photon state. On a Cartesian grid the delta functions of the
// continuum become Kronecker deltas divided by the cell volume.

#include "photon/scalarprod.hpp"
#include "photon/wavefunction.hpp"

#include <json.hpp>

#include <optional>
#include <utility>

namespace photon {

struct LocalizedSpec {
  Vec3 position = Vec3::Zero();
  double time = 0.0;
  int sigma = +1;
  ChiSpec chi = ChiSpec::zero();
};

/// Amplitudes of the state localized at (position, time) with polarisation
/// e_sigma^(chi). |d| = (2 pi)^{-3/2} on every node of the chosen helicity.
inline WaveFunctionK localized_state(GridPtr grid, const LocalizedSpec& spec,
                                     Form form = Form::landau_peierls) {
  const LocalizedSpec s = spec;
  auto amplitude = [s](const KNode& n, std::size_t index) {
    return std::conj(s.chi.phase(n, index, s.sigma)) *
           std::exp(I * (n.omega() * s.time - n.k.dot(s.position))) * inv_two_pi_three_halves;
  };
  const std::size_t size = grid->size();
  std::vector<cdouble> same(size), none(size);
  for (std::size_t i = 0; i < size; ++i) same[i] = amplitude(grid->node(i), i);

  std::optional<AnalyticState> closed;
  if (s.chi.kind != ChiSpec::Kind::table) {
    AmplitudeFn f = [amplitude](const Vec3& k) { return amplitude(make_node(k, 0.0), 0); };
    closed = s.sigma > 0 ? AnalyticState{f, {}} : AnalyticState{{}, f};
  }
  if (s.sigma > 0) return WaveFunctionK(std::move(grid), std::move(same), std::move(none), form, 0.0, closed);
  return WaveFunctionK(std::move(grid), std::move(none), std::move(same), form, 0.0, closed);
}

enum class AmplitudePath { fft, quadrature };

/// Number amplitude per helicity, either on the full dual r-grid (fft) or at
/// caller-supplied points (quadrature).
struct NumberAmplitudeR {
  std::shared_ptr<const CartesianGrid> grid;  // set for the fft path
  std::vector<Vec3> points;                   // set for the quadrature path
  std::array<std::vector<cdouble>, 2> values; // [0] sigma = +1, [1] sigma = -1
  double t = 0.0;

  const std::vector<cdouble>& helicity(int sigma) const { return values[sigma > 0 ? 0 : 1]; }
  std::size_t size() const noexcept { return values[0].size(); }
  Vec3 position(std::size_t i) const { return grid ? grid->r_point(i) : points[i]; }
  double density(std::size_t i) const { return std::norm(values[0][i]) + std::norm(values[1][i]); }

  /// sum_r |c|^2 dr^3 (fft path only).
  double total_probability() const {
    if (!grid) throw Error(ErrorCode::wrong_grid, "total probability needs the full r-grid");
    std::vector<double> terms(size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = density(i);
    return pairwise_sum(terms) * grid->cell_volume_r();
  }
};

inline NumberAmplitudeR number_amplitude(const WaveFunctionK& wf, double t, const ChiSpec& chi,
                                         AmplitudePath path, std::vector<Vec3> points = {}) {
  const KSpaceGrid& grid = wf.grid();
  const std::size_t size = grid.size();
  const double dt = t - wf.time();
  NumberAmplitudeR out;
  out.t = t;

  std::array<std::vector<cdouble>, 2> spectra;
  for (int h = 0; h < 2; ++h) {
    const int sigma = h == 0 ? +1 : -1;
    const auto c = wf.amplitudes(sigma);
    spectra[h].resize(size);
    parallel_for(size, [&](std::size_t i) {
      const KNode& n = grid.node(i);
      spectra[h][i] = c[i] * chi.phase(n, i, sigma) * std::exp(-I * (n.omega() * dt));
    });
  }

  if (path == AmplitudePath::fft) {
    out.grid = require_cartesian(wf.grid_ptr(), "fft number amplitude");
    for (int h = 0; h < 2; ++h) out.values[h] = k_to_r(*out.grid, std::move(spectra[h]));
    return out;
  }

  if (points.empty()) throw Error(ErrorCode::invalid_argument, "quadrature path needs at least one point");
  out.points = std::move(points);
  for (int h = 0; h < 2; ++h) {
    out.values[h].resize(out.points.size());
    for (std::size_t p = 0; p < out.points.size(); ++p) {
      const Vec3 r = out.points[p];
      std::vector<cdouble> terms(size);
      parallel_for(size, [&](std::size_t i) {
        const KNode& n = grid.node(i);
        terms[i] = n.weight * spectra[h][i] * std::exp(I * n.k.dot(r));
      });
      out.values[h][p] = pairwise_sum(terms) * inv_two_pi_three_halves;
    }
  }
  return out;
}

/// TM / TE detection amplitudes for a polariser at angle chi:
///   c_R1 = (c_1 e^{i chi} + c_-1 e^{-i chi}) / sqrt 2
///   c_R2 = i (c_1 e^{i chi} - c_-1 e^{-i chi}) / sqrt 2
inline std::pair<cdouble, cdouble> linear_detection(cdouble c_plus, cdouble c_minus, double chi) {
  const double s = 1.0 / std::sqrt(2.0);
  const cdouble a = c_plus * std::exp(I * chi);
  const cdouble b = c_minus * std::exp(-I * chi);
  return {s * (a + b), I * s * (a - b)};
}

/// Unit-normalised number density sum_sigma |c_sigma(r,t)|^2 and Glauber
/// density |Psi^(1/2)(r,t)|^2 on the dual r-grid (chi = 0).
struct DensityPair {
  std::shared_ptr<const CartesianGrid> grid;
  std::vector<double> number;
  std::vector<double> glauber;
};

inline DensityPair glauber_densities(const WaveFunctionK& wf, double t) {
  auto grid = require_cartesian(wf.grid_ptr(), "glauber comparison");
  if (!(wf.norm_squared() > 0.0)) throw Error(ErrorCode::invalid_state, "zero-norm state");
  const auto amp = number_amplitude(wf, t, ChiSpec::zero(), AmplitudePath::fft);
  const auto field = synthesize_real_space(convert_alpha(wf, Form::electric_field), t);
  DensityPair d;
  d.grid = grid;
  d.number.resize(grid->size());
  d.glauber.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    d.number[i] = amp.density(i);
    d.glauber[i] = field.at(i).squaredNorm();
  }
  const double dv = grid->cell_volume_r();
  for (auto* v : {&d.number, &d.glauber}) {
    const double total = pairwise_sum(*v) * dv;
    if (!(total > 0.0)) throw Error(ErrorCode::invalid_state, "zero-norm density");
    for (auto& x : *v) x /= total;
  }
  return d;
}

struct GlauberComparison {
  double distance = 0.0;           // sqrt(int (rho_N - rho_G)^2 d^3r)
  double relative_distance = 0.0;  // distance / sqrt(int rho_N^2 d^3r)
};

inline GlauberComparison glauber_compare(const WaveFunctionK& wf, double t) {
  const auto d = glauber_densities(wf, t);
  std::vector<double> diff(d.number.size()), ref(d.number.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = (d.number[i] - d.glauber[i]) * (d.number[i] - d.glauber[i]);
    ref[i] = d.number[i] * d.number[i];
  }
  const double dv = d.grid->cell_volume_r();
  GlauberComparison c;
  c.distance = std::sqrt(pairwise_sum(diff) * dv);
  c.relative_distance = c.distance / std::sqrt(pairwise_sum(ref) * dv);
  return c;
}

}  // namespace photon
