#pragma once
// The alpha-parametrised single-photon wave function family.
//
// The canonical representation is the pair of helicity amplitudes c_sigma(k)
// (phase-evolved to the carried time t). The 3-vector form
//   Psi^(alpha)(k) = sum_sigma c_sigma(k) e_sigma^(0)(k) omega_k^alpha
// is derived on demand, so transversality holds by construction. alpha = 0 is
// the Landau-Peierls form; alpha = -1/2 and +1/2 are the vector potential /
// electric field pair.

#include "photon/core.hpp"
#include "photon/fft.hpp"
#include "photon/kgrid.hpp"
#include "photon/polarization.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <utility>

namespace photon {

/// Form exponent alpha in units of 1/2.
enum class Form : int { vector_potential = -1, landau_peierls = 0, electric_field = 1 };

inline double alpha(Form f) noexcept { return static_cast<int>(f) / 2.0; }
inline Form conjugate(Form f) noexcept { return static_cast<Form>(-static_cast<int>(f)); }

inline Form form_from_alpha(double a) {
  if (a == -0.5) return Form::vector_potential;
  if (a == 0.0) return Form::landau_peierls;
  if (a == 0.5) return Form::electric_field;
  throw Error(ErrorCode::invalid_argument, "alpha must be one of -1/2, 0, 1/2");
}

/// omega^alpha; omega^0 is 1 even at omega = 0.
inline double omega_power(double omega, Form f) {
  switch (f) {
    case Form::landau_peierls: return 1.0;
    case Form::electric_field: return std::sqrt(omega);
    case Form::vector_potential: return 1.0 / std::sqrt(omega);
  }
  return 1.0;
}

using AmplitudeFn = std::function<cdouble(const Vec3&)>;

/// Closed-form helicity amplitudes c_sigma(k) at t = 0. Boosts need these to
/// evaluate the state off the sampling nodes.
struct AnalyticState {
  AmplitudeFn plus;
  AmplitudeFn minus;

  cdouble operator()(const Vec3& k, int sigma) const {
    const auto& f = sigma > 0 ? plus : minus;
    return f ? f(k) : cdouble{};
  }
};

class WaveFunctionK {
 public:
  WaveFunctionK(GridPtr grid, std::vector<cdouble> c_plus, std::vector<cdouble> c_minus, Form form,
                double t = 0.0, std::optional<AnalyticState> analytic = std::nullopt,
                double analytic_scale = 1.0)
      : grid_(std::move(grid)),
        c_plus_(std::move(c_plus)),
        c_minus_(std::move(c_minus)),
        form_(form),
        t_(t),
        analytic_(std::move(analytic)),
        analytic_scale_(analytic_scale) {
    if (!grid_) throw Error(ErrorCode::invalid_argument, "null grid");
    if (c_plus_.size() != grid_->size() || c_minus_.size() != grid_->size())
      throw Error(ErrorCode::invalid_argument, "amplitude length does not match the grid");
    for (std::size_t i = 0; i < c_plus_.size(); ++i)
      if (!is_finite(c_plus_[i]) || !is_finite(c_minus_[i]))
        throw Error(ErrorCode::invalid_state, "non-finite amplitude at node " + std::to_string(i));
  }

  const KSpaceGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const cdouble> amplitudes(int sigma) const noexcept {
    return sigma > 0 ? std::span<const cdouble>(c_plus_) : std::span<const cdouble>(c_minus_);
  }
  const std::vector<cdouble>& c_plus() const noexcept { return c_plus_; }
  const std::vector<cdouble>& c_minus() const noexcept { return c_minus_; }
  Form form() const noexcept { return form_; }
  double alpha() const noexcept { return photon::alpha(form_); }
  double time() const noexcept { return t_; }

  bool has_analytic() const noexcept { return analytic_.has_value(); }
  const std::optional<AnalyticState>& analytic() const noexcept { return analytic_; }
  double analytic_scale() const noexcept { return analytic_scale_; }

  /// c_sigma(k) exp(-i omega t) at an arbitrary momentum.
  cdouble analytic_amplitude(const Vec3& k, int sigma) const {
    if (!analytic_)
      throw Error(ErrorCode::needs_analytic_state, "state has no closed-form amplitude");
    return analytic_scale_ * (*analytic_)(k, sigma) * std::exp(-I * (k.norm() * t_));
  }

  /// Psi^(f)(k_i) in the chi = 0 basis.
  CVec3 vector_sample(std::size_t i, Form f) const {
    const KNode& n = grid_->node(i);
    const double w = omega_power(n.omega(), f);
    return (helicity_vector(n, +1) * c_plus_[i] + helicity_vector(n, -1) * c_minus_[i]) * w;
  }
  CVec3 vector_sample(std::size_t i) const { return vector_sample(i, form_); }

  /// The same vector assembled in a chi basis:
  /// sum_sigma (c_sigma exp(i sigma chi)) e_sigma^(chi) omega^alpha.
  CVec3 vector_sample(std::size_t i, Form f, const ChiSpec& chi) const {
    const KNode& n = grid_->node(i);
    const double w = omega_power(n.omega(), f);
    CVec3 v = CVec3::Zero();
    for (int s : {+1, -1}) {
      const double x = chi.value(n, i, s);
      v += helicity_vector(n, s, x) * (amplitudes(s)[i] * std::exp(I * (s * x)));
    }
    return v * w;
  }

  double helicity_norm_squared(int sigma) const {
    std::vector<double> terms(grid_->size());
    const auto a = amplitudes(sigma);
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = grid_->node(i).weight * std::norm(a[i]);
    return pairwise_sum(terms);
  }

  /// QED norm sum_sigma int d^3k |c_sigma|^2.
  double norm_squared() const { return helicity_norm_squared(+1) + helicity_norm_squared(-1); }

 private:
  GridPtr grid_;
  std::vector<cdouble> c_plus_;
  std::vector<cdouble> c_minus_;
  Form form_;
  double t_;
  std::optional<AnalyticState> analytic_;
  double analytic_scale_;
};

/// Samples closed-form amplitudes on every node. Either function may be empty
/// (treated as zero).
inline WaveFunctionK make_wavefunction(GridPtr grid, AmplitudeFn c_plus, AmplitudeFn c_minus,
                                       Form form) {
  std::vector<cdouble> p(grid->size()), m(grid->size());
  const auto nodes = grid->nodes();
  parallel_for(nodes.size(), [&](std::size_t i) {
    p[i] = c_plus ? c_plus(nodes[i].k) : cdouble{};
    m[i] = c_minus ? c_minus(nodes[i].k) : cdouble{};
  });
  return WaveFunctionK(std::move(grid), std::move(p), std::move(m), form, 0.0,
                       AnalyticState{std::move(c_plus), std::move(c_minus)});
}

/// Change of form: the stored amplitudes are form-independent, so only the
/// label (and hence the omega power applied by consumers) changes.
inline WaveFunctionK convert_alpha(const WaveFunctionK& wf, Form target) {
  return WaveFunctionK(wf.grid_ptr(), wf.c_plus(), wf.c_minus(), target, wf.time(), wf.analytic(),
                       wf.analytic_scale());
}

/// c_sigma(k) -> c_sigma(k) exp(-i omega_k dt).
inline WaveFunctionK evolve(const WaveFunctionK& wf, double dt) {
  if (dt == 0.0) return wf;
  std::vector<cdouble> p(wf.c_plus()), m(wf.c_minus());
  const auto nodes = wf.grid().nodes();
  parallel_for(nodes.size(), [&](std::size_t i) {
    const cdouble ph = std::exp(-I * (nodes[i].omega() * dt));
    p[i] *= ph;
    m[i] *= ph;
  });
  return WaveFunctionK(wf.grid_ptr(), std::move(p), std::move(m), wf.form(), wf.time() + dt,
                       wf.analytic(), wf.analytic_scale());
}

inline WaveFunctionK scale(const WaveFunctionK& wf, cdouble factor) {
  std::vector<cdouble> p(wf.c_plus()), m(wf.c_minus());
  for (auto& v : p) v *= factor;
  for (auto& v : m) v *= factor;
  // The analytic closure only tracks real rescaling; complex factors drop it.
  if (factor.imag() == 0.0 && wf.has_analytic())
    return WaveFunctionK(wf.grid_ptr(), std::move(p), std::move(m), wf.form(), wf.time(),
                         wf.analytic(), wf.analytic_scale() * factor.real());
  return WaveFunctionK(wf.grid_ptr(), std::move(p), std::move(m), wf.form(), wf.time());
}

inline WaveFunctionK normalize(const WaveFunctionK& wf) {
  const double n2 = wf.norm_squared();
  if (!(n2 > 0.0)) throw Error(ErrorCode::invalid_state, "cannot normalise a zero-norm state");
  return scale(wf, 1.0 / std::sqrt(n2));
}

/// Real-space field on the r-grid dual to a CartesianGrid.
struct WaveFunctionR {
  std::shared_ptr<const CartesianGrid> grid;
  std::array<std::vector<cdouble>, 3> components;
  Form form = Form::landau_peierls;
  double t = 0.0;

  CVec3 at(std::size_t i) const { return {components[0][i], components[1][i], components[2][i]}; }

  double norm_squared() const {
    std::vector<double> terms(components[0].size());
    for (std::size_t i = 0; i < terms.size(); ++i)
      terms[i] = std::norm(components[0][i]) + std::norm(components[1][i]) + std::norm(components[2][i]);
    return pairwise_sum(terms) * grid->cell_volume_r();
  }
};

inline std::shared_ptr<const CartesianGrid> require_cartesian(const GridPtr& g, const char* what) {
  auto c = std::dynamic_pointer_cast<const CartesianGrid>(g);
  if (!c)
    throw Error(ErrorCode::wrong_grid,
                std::string(what) + " needs a Cartesian grid; spherical grids use the quadrature path");
  return c;
}

/// f(r_j) = dk^3 (2 pi)^{-3/2} sum_i F(k_i) exp(+i k_i . r_j) over the whole
/// dual r-grid, evaluated with one FFT.
///
/// With k_i = k0 + i dk and r_j = r0 + j dr per axis, dk r0 = -pi, so
/// exp(i k_i r_j) = exp(i k0 r_j) (-1)^i exp(2 pi i i j / n).
inline std::vector<cdouble> k_to_r(const CartesianGrid& grid, std::vector<cdouble> samples) {
  const std::size_t n = grid.n();
  if (samples.size() != n * n * n) throw Error(ErrorCode::invalid_argument, "sample count mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        if ((i + j + l) % 2 == 1) samples[grid.index(i, j, l)] = -samples[grid.index(i, j, l)];
  Fft3 fft(n, FftSign::backward);
  fft(samples);
  std::vector<cdouble> axis_phase(3 * n);
  for (int a = 0; a < 3; ++a)
    for (std::size_t j = 0; j < n; ++j)
      axis_phase[a * n + j] = std::exp(I * (grid.k_axis(0, a) * grid.r_axis(j)));
  const double norm = grid.cell_volume_k() * inv_two_pi_three_halves;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        samples[grid.index(i, j, l)] *= norm * axis_phase[i] * axis_phase[n + j] * axis_phase[2 * n + l];
  return samples;
}

/// Psi^(alpha)(r, t) by FFT. `t` defaults to the carried time; otherwise the
/// amplitudes are first evolved from wf.time() to t.
inline WaveFunctionR synthesize_real_space(const WaveFunctionK& wf, std::optional<double> t = std::nullopt) {
  auto grid = require_cartesian(wf.grid_ptr(), "synthesize_real_space");
  const double target = t.value_or(wf.time());
  const WaveFunctionK state = evolve(wf, target - wf.time());
  WaveFunctionR out;
  out.grid = grid;
  out.form = wf.form();
  out.t = target;
  const std::size_t size = grid->size();
  for (int c = 0; c < 3; ++c) out.components[c].resize(size);
  parallel_for(size, [&](std::size_t i) {
    const CVec3 v = state.vector_sample(i);
    for (int c = 0; c < 3; ++c) out.components[c][i] = v[c];
  });
  for (int c = 0; c < 3; ++c) out.components[c] = k_to_r(*grid, std::move(out.components[c]));
  return out;
}

/// CSV snapshot of a k-space state. Columns:
/// kx,ky,kz,weight,re_c_plus,im_c_plus,re_c_minus,im_c_minus
inline void write_state_csv(std::ostream& os, const WaveFunctionK& wf) {
  os << "kx,ky,kz,weight,re_c_plus,im_c_plus,re_c_minus,im_c_minus\n";
  os.precision(17);
  for (std::size_t i = 0; i < wf.grid().size(); ++i) {
    const KNode& n = wf.grid().node(i);
    os << n.k.x() << ',' << n.k.y() << ',' << n.k.z() << ',' << n.weight << ','
       << wf.c_plus()[i].real() << ',' << wf.c_plus()[i].imag() << ',' << wf.c_minus()[i].real()
       << ',' << wf.c_minus()[i].imag() << '\n';
  }
}

/// Closed-form test states.
namespace states {

/// exp(-|k - center|^2 / width^2) exp(i k . shift): a packet centred on
/// `center` in k and displaced to -shift in r.
inline AmplitudeFn gaussian_amplitude(const Vec3& center, double width, const Vec3& shift = Vec3::Zero()) {
  return [center, width, shift](const Vec3& k) {
    return std::exp(-(k - center).squaredNorm() / (width * width)) * std::exp(I * k.dot(shift));
  };
}

inline WaveFunctionK gaussian(GridPtr grid, const Vec3& center, double width, int sigma,
                              Form form = Form::landau_peierls, const Vec3& shift = Vec3::Zero()) {
  auto f = gaussian_amplitude(center, width, shift);
  return sigma > 0 ? make_wavefunction(std::move(grid), f, {}, form)
                   : make_wavefunction(std::move(grid), {}, f, form);
}

/// c_sigma = exp(-i sigma chi') / sqrt(2) * Gaussian: linearly polarised at
/// angle chi' in the chi = 0 basis.
inline WaveFunctionK two_helicity(GridPtr grid, double chi_prime, const Vec3& center, double width,
                                  Form form = Form::landau_peierls) {
  auto g = gaussian_amplitude(center, width);
  const double s = 1.0 / std::sqrt(2.0);
  AmplitudeFn p = [g, chi_prime, s](const Vec3& k) { return s * std::exp(-I * chi_prime) * g(k); };
  AmplitudeFn m = [g, chi_prime, s](const Vec3& k) { return s * std::exp(I * chi_prime) * g(k); };
  return make_wavefunction(std::move(grid), p, m, form);
}

/// Radial Laguerre-Gaussian profiles L_n^{1/2}(k^2) exp(-k^2 / 2), orthogonal
/// under int k^2 dk for different n (n = 0, 1, 2).
inline AmplitudeFn radial_laguerre(int order) {
  return [order](const Vec3& k) -> cdouble {
    const double x = k.squaredNorm();
    double l = 1.0;
    if (order == 1) l = 1.5 - x;
    if (order == 2) l = 0.5 * x * x - 2.5 * x + 15.0 / 8.0;
    return l * std::exp(-0.5 * x);
  };
}

/// Reproducible random superposition of Gaussians in both helicities. Uses the
/// raw mt19937_64 stream (not std distributions) so values are identical across
/// standard libraries.
inline WaveFunctionK random_superposition(GridPtr grid, std::uint64_t seed, int modes = 3,
                                          Form form = Form::landau_peierls) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  struct Mode {
    Vec3 center;
    double width;
    cdouble coeff;
  };
  std::array<std::vector<Mode>, 2> per_helicity;
  for (auto& list : per_helicity)
    for (int m = 0; m < modes; ++m) {
      Mode md;
      md.center = Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      md.width = uniform(0.7, 1.3);
      md.coeff = std::polar(uniform(0.3, 1.0), uniform(-pi, pi));
      list.push_back(md);
    }
  auto make = [](std::vector<Mode> list) -> AmplitudeFn {
    return [list = std::move(list)](const Vec3& k) {
      cdouble s{};
      for (const auto& m : list) s += m.coeff * std::exp(-(k - m.center).squaredNorm() / (m.width * m.width));
      return s;
    };
  };
  return make_wavefunction(std::move(grid), make(per_helicity[0]), make(per_helicity[1]), form);
}

}  // namespace states

}  // namespace photon
