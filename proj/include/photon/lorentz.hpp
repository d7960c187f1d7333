#pragma once
// 4-vector embedding, boosts, and the invariance / helicity checks.
//
// Psi^(1/2)mu(k) transforms as a 4-vector field on the mass shell, and
// d^3k / omega is the invariant measure, so
//   Psi'(k') = Lambda Psi(Lambda^{-1} k')
// and the Minkowski-contracted scalar product over d^3k / omega is frame
// independent. Boosted frames are re-gridded with k_max inflated by e^|eta|
// and states are evaluated from their closed form at the mapped momenta, so
// any residual defect is quadrature error.

#include "photon/scalarprod.hpp"
#include "photon/wavefunction.hpp"

#include <json.hpp>

#include <functional>
#include <limits>
#include <optional>

namespace photon {

inline const Mat4& minkowski_metric() {
  static const Mat4 g = Vec4(-1.0, 1.0, 1.0, 1.0).asDiagonal();
  return g;
}

/// Pure boost of rapidity eta along a unit direction n, acting on
/// contravariant (omega, k). For n = z: omega' = omega cosh eta - k_z sinh eta.
class Boost {
 public:
  Boost(double rapidity, const Vec3& direction) : eta_(rapidity) {
    if (!std::isfinite(rapidity)) throw Error(ErrorCode::invalid_argument, "rapidity must be finite");
    const double len = direction.norm();
    if (!(len > 0.0)) {
      if (rapidity != 0.0) throw Error(ErrorCode::invalid_argument, "boost direction must be non-zero");
      n_ = Vec3::UnitZ();
    } else {
      n_ = direction / len;
    }
    const double ch = std::cosh(eta_), sh = std::sinh(eta_);
    m_.setIdentity();
    m_(0, 0) = ch;
    for (int i = 0; i < 3; ++i) {
      m_(0, i + 1) = -sh * n_[i];
      m_(i + 1, 0) = -sh * n_[i];
      for (int j = 0; j < 3; ++j) m_(i + 1, j + 1) += (ch - 1.0) * n_[i] * n_[j];
    }
  }

  double rapidity() const noexcept { return eta_; }
  const Vec3& direction() const noexcept { return n_; }
  const Mat4& matrix() const noexcept { return m_; }
  Boost inverse() const { return Boost(-eta_, n_); }

  /// Spatial part of Lambda (|k|, k).
  Vec3 map_momentum(const Vec3& k) const {
    const Vec4 p(k.norm(), k.x(), k.y(), k.z());
    return (m_ * p).tail<3>();
  }

  CVec4 apply(const CVec4& v) const { return m_.cast<cdouble>() * v; }

  nlohmann::json to_json() const { return {{"rapidity", eta_}, {"direction", {n_.x(), n_.y(), n_.z()}}}; }

 private:
  double eta_;
  Vec3 n_;
  Mat4 m_;
};

using FourField = std::function<CVec4(const Vec3&)>;

/// Four complex components per node in the alpha = 1/2 form, plus the closed
/// form when the state was built from one.
struct FourVectorWF {
  GridPtr grid;
  std::vector<CVec4> samples;
  std::optional<FourField> field;

  bool has_field() const noexcept { return field.has_value(); }
};

inline FourVectorWF sample_field(FourField field, GridPtr grid) {
  FourVectorWF out;
  out.samples.resize(grid->size());
  const auto nodes = grid->nodes();
  parallel_for(nodes.size(), [&](std::size_t i) { out.samples[i] = field(nodes[i].k); });
  out.grid = std::move(grid);
  out.field = std::move(field);
  return out;
}

/// Transverse state -> (0, Psi^(1/2)(k)).
inline FourVectorWF embed(const WaveFunctionK& wf) {
  if (wf.has_analytic()) {
    FourField f = [wf](const Vec3& k) {
      const double w = std::sqrt(k.norm());
      const CVec3 v = (helicity_vector_at(k, +1) * wf.analytic_amplitude(k, +1) +
                       helicity_vector_at(k, -1) * wf.analytic_amplitude(k, -1)) *
                      w;
      return detail::embed_transverse(v);
    };
    FourVectorWF out = sample_field(f, wf.grid_ptr());
    // Use the stored samples on the native grid so embedding is exact there.
    parallel_for(out.samples.size(), [&](std::size_t i) {
      out.samples[i] = detail::embed_transverse(wf.vector_sample(i, Form::electric_field));
    });
    return out;
  }
  FourVectorWF out;
  out.grid = wf.grid_ptr();
  out.samples.resize(wf.grid().size());
  parallel_for(out.samples.size(), [&](std::size_t i) {
    out.samples[i] = detail::embed_transverse(wf.vector_sample(i, Form::electric_field));
  });
  return out;
}

/// Minkowski-contracted scalar product over the invariant measure d^3k / omega.
inline cdouble sp_minkowski(const FourVectorWF& phi, const FourVectorWF& psi) {
  if (!phi.grid || !psi.grid || !same_grid(*phi.grid, *psi.grid))
    throw Error(ErrorCode::incompatible_grids, "4-vector fields live on different grids");
  return detail::reduce_nodes(*phi.grid, [&](std::size_t i) {
    const KNode& n = phi.grid->node(i);
    return n.weight / n.omega() * detail::minkowski_dot(phi.samples[i], psi.samples[i]);
  });
}

/// Grid for the boosted frame: same resolution, k_max scaled by e^|eta|.
inline GridPtr boosted_grid(const KSpaceGrid& rest, const Boost& b) {
  const double f = std::exp(std::abs(b.rapidity()));
  if (rest.kind() == GridKind::spherical) {
    const auto& s = static_cast<const SphericalGrid&>(rest);
    return build_spherical_grid(s.n_r(), s.n_theta(), s.n_phi(), s.k_max() * f, s.radial_rule());
  }
  const auto& c = static_cast<const CartesianGrid&>(rest);
  return build_cartesian_grid(c.n(), c.k_max() * f, c.centering(), c.center());
}

namespace detail {

/// Bracketing index and fraction for x in a sorted axis, clamped to the ends.
inline std::pair<std::size_t, double> bracket(const std::vector<double>& axis, double x) {
  if (x <= axis.front()) return {0, 0.0};
  if (x >= axis.back()) return {axis.size() - 2, 1.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  const std::size_t lo = hi - 1;
  return {lo, (x - axis[lo]) / (axis[hi] - axis[lo])};
}

/// Multilinear (first-order, O(h^2) error) interpolation of 4-vector samples.
/// Outside the sampled region the field is taken as zero.
inline CVec4 interpolate(const KSpaceGrid& grid, std::span<const CVec4> s, const Vec3& k) {
  if (grid.kind() == GridKind::cartesian) {
    const auto& g = static_cast<const CartesianGrid&>(grid);
    std::size_t i0[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
      const double u = (k[a] - g.k_axis(0, a)) / g.dk();
      if (u < 0.0 || u > static_cast<double>(g.n() - 1)) return CVec4::Zero();
      i0[a] = std::min(static_cast<std::size_t>(u), g.n() - 2);
      t[a] = u - static_cast<double>(i0[a]);
    }
    CVec4 acc = CVec4::Zero();
    for (int c = 0; c < 8; ++c) {
      const int bx = c >> 2 & 1, by = c >> 1 & 1, bz = c & 1;
      const double w = (bx ? t[0] : 1 - t[0]) * (by ? t[1] : 1 - t[1]) * (bz ? t[2] : 1 - t[2]);
      acc += w * s[g.index(i0[0] + bx, i0[1] + by, i0[2] + bz)];
    }
    return acc;
  }
  const auto& g = static_cast<const SphericalGrid&>(grid);
  const double r = k.norm();
  if (r > g.k_max()) return CVec4::Zero();
  const double mu = r > 0.0 ? k.z() / r : 1.0;
  double ph = std::atan2(k.y(), k.x());
  if (ph < 0.0) ph += 2.0 * pi;
  const auto [ir, tr] = bracket(g.radii(), r);
  const auto [im, tm] = bracket(g.mu(), mu);
  const double dphi = 2.0 * pi / static_cast<double>(g.n_phi());
  double u = ph / dphi - 0.5;
  if (u < 0.0) u += static_cast<double>(g.n_phi());
  const std::size_t ip0 = static_cast<std::size_t>(u) % g.n_phi();
  const std::size_t ip1 = (ip0 + 1) % g.n_phi();
  const double tp = u - std::floor(u);
  CVec4 acc = CVec4::Zero();
  for (int c = 0; c < 8; ++c) {
    const int br = c >> 2 & 1, bm = c >> 1 & 1, bp = c & 1;
    const double w = (br ? tr : 1 - tr) * (bm ? tm : 1 - tm) * (bp ? tp : 1 - tp);
    acc += w * s[g.index(ir + br, im + bm, bp ? ip1 : ip0)];
  }
  return acc;
}

}  // namespace detail

struct BoostOptions {
  /// Allow boosting sampled-only states by multilinear interpolation
  /// (first order). Off by default: the analytic path has no interpolation error.
  bool interpolate = false;
};

/// Psi'(k') = Lambda Psi(Lambda^{-1} k') sampled on `target` (default: the
/// inflated boosted-frame grid).
inline FourVectorWF boost_state(const FourVectorWF& psi, const Boost& b, GridPtr target = nullptr,
                                BoostOptions opt = {}) {
  if (!target) target = boosted_grid(*psi.grid, b);
  const Boost inv = b.inverse();
  if (psi.field) {
    FourField src = *psi.field;
    FourField f = [src, b, inv](const Vec3& kp) { return b.apply(src(inv.map_momentum(kp))); };
    return sample_field(std::move(f), std::move(target));
  }
  if (!opt.interpolate)
    throw Error(ErrorCode::needs_analytic_state,
                "boosting a sampled-only state needs its closed form (or BoostOptions::interpolate)");
  FourVectorWF out;
  out.grid = target;
  out.samples.resize(target->size());
  const auto nodes = target->nodes();
  parallel_for(nodes.size(), [&](std::size_t i) {
    out.samples[i] = b.apply(detail::interpolate(*psi.grid, psi.samples, inv.map_momentum(nodes[i].k)));
  });
  return out;
}

/// Re-samples a closed-form state on another grid.
inline WaveFunctionK resample(const WaveFunctionK& wf, GridPtr grid) {
  if (!wf.has_analytic())
    throw Error(ErrorCode::needs_analytic_state, "re-gridding needs the closed-form amplitudes");
  const double t = wf.time();
  const double s = wf.analytic_scale();
  const AnalyticState a = *wf.analytic();
  auto fresh = make_wavefunction(std::move(grid), a.plus, a.minus, wf.form());
  return evolve(scale(fresh, s), t);
}

/// |SP_boosted - SP_rest| / |SP_rest| with both sides in the invariant form,
/// each on its own frame's grid.
inline double invariance_defect(const FourVectorWF& phi, const FourVectorWF& psi, const Boost& b,
                                GridPtr target = nullptr) {
  const cdouble rest = sp_minkowski(phi, psi);
  if (std::abs(rest) < 1e-13)
    throw Error(ErrorCode::ill_conditioned, "rest-frame scalar product is below 1e-13");
  if (!target) target = boosted_grid(*phi.grid, b);
  const cdouble moved = sp_minkowski(boost_state(phi, b, target), boost_state(psi, b, target));
  return std::abs(moved - rest) / std::abs(rest);
}

struct LadderStep {
  nlohmann::json grid;
  double defect = 0.0;
};

/// Invariance defect for analytic states re-sampled on a sequence of rest
/// grids (each boosted grid inflated from its rest grid).
inline std::vector<LadderStep> invariance_ladder(const WaveFunctionK& phi, const WaveFunctionK& psi,
                                                 const Boost& b, const std::vector<GridPtr>& rest_grids) {
  std::vector<LadderStep> out;
  for (const auto& g : rest_grids) {
    const auto p = embed(resample(phi, g));
    const auto q = embed(resample(psi, g));
    out.push_back({g->descriptor(), invariance_defect(p, q, b)});
  }
  return out;
}

/// Spherical rest grids (16 s, 8 s, 16 s) for s = 1..levels; level 4 is the
/// default (64, 32, 64) grid.
inline std::vector<GridPtr> refinement_grids(double k_max, std::size_t levels = 4) {
  std::vector<GridPtr> out;
  for (std::size_t s = 1; s <= levels; ++s) out.push_back(build_spherical_grid(16 * s, 8 * s, 16 * s, k_max));
  return out;
}

/// Each step must shrink the defect by `factor`, except once the defect is at
/// the round-off floor, where it can only stay there.
inline bool ladder_converges(const std::vector<LadderStep>& steps, double factor = 10.0, double floor = 1e-13) {
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const double prev = steps[i - 1].defect, cur = steps[i].defect;
    if (cur < floor && prev < floor * factor) continue;
    if (!(cur * factor <= prev)) return false;
  }
  return !steps.empty();
}

struct HelicityReport {
  double max_leakage = 0.0;          // max (|wrong helicity| + |longitudinal|) / amplitude scale
  double max_magnitude_error = 0.0;  // max ||a| - |c(k)| omega^{1/2}| / amplitude scale
  double max_gauge_part = 0.0;       // max |g k'| / amplitude scale (expected non-zero)
  double amplitude_scale = 0.0;      // max |Psi'| over nodes
  std::vector<double> wigner_angles; // per node with significant amplitude; NaN elsewhere
  double max_wigner_angle = 0.0;
};

/// Boosts a single-helicity closed-form state and decomposes it at each
/// boosted node as a e_sigma(k') + b e_-sigma(k') + g k'^mu. Helicity is
/// preserved when b = 0 and the spatial remainder has no longitudinal part;
/// the phase of a relative to c(k) omega^{1/2} gives the Wigner angle
/// chi_W = -sigma arg(a / (c omega^{1/2})).
inline HelicityReport helicity_invariance_check(const WaveFunctionK& psi, const Boost& b,
                                                GridPtr target = nullptr) {
  if (!psi.has_analytic())
    throw Error(ErrorCode::needs_analytic_state, "helicity check needs the closed-form amplitudes");
  const bool has_plus = psi.helicity_norm_squared(+1) > 0.0;
  const bool has_minus = psi.helicity_norm_squared(-1) > 0.0;
  if (has_plus == has_minus)
    throw Error(ErrorCode::invalid_argument, "helicity check needs a single-helicity state");
  const int sigma = has_plus ? +1 : -1;
  if (!target) target = boosted_grid(psi.grid(), b);
  const Boost inv = b.inverse();
  const std::size_t size = target->size();

  struct NodeResult {
    double leak, mag_abs, expected, gauge, norm;
    cdouble a, ref;
  };
  std::vector<NodeResult> res(size);
  parallel_for(size, [&](std::size_t i) {
    const KNode& n = target->node(i);
    const Vec3 k = inv.map_momentum(n.k);
    const cdouble c = psi.analytic_amplitude(k, sigma);
    const double w = std::sqrt(k.norm());
    const CVec4 rest = detail::embed_transverse(helicity_vector_at(k, sigma) * (c * w));
    const CVec4 moved = b.apply(rest);
    const cdouble g = moved[0] / n.omega();
    const CVec3 spatial = moved.tail<3>() - g * n.k.cast<cdouble>();
    const CVec3 e_same = helicity_vector(n, sigma);
    const CVec3 e_other = helicity_vector(n, -sigma);
    const Vec3 kh = n.k / n.kmag;
    const cdouble a = e_same.dot(spatial);
    const cdouble wrong = e_other.dot(spatial);
    const cdouble lon = kh.cast<cdouble>().dot(spatial);
    res[i] = {std::abs(wrong) + std::abs(lon), std::abs(a), std::abs(c) * w, std::abs(g) * n.kmag,
              moved.norm(), a, c * w};
  });

  HelicityReport r;
  for (const auto& x : res) r.amplitude_scale = std::max(r.amplitude_scale, x.norm);
  const double s = r.amplitude_scale > 0.0 ? r.amplitude_scale : 1.0;
  r.wigner_angles.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto& x = res[i];
    r.max_leakage = std::max(r.max_leakage, x.leak / s);
    r.max_magnitude_error = std::max(r.max_magnitude_error, std::abs(x.mag_abs - x.expected) / s);
    r.max_gauge_part = std::max(r.max_gauge_part, x.gauge / s);
    if (x.mag_abs > 1e-6 * s && std::abs(x.ref) > 0.0) {
      const double angle = -sigma * std::arg(x.a / x.ref);
      r.wigner_angles[i] = angle;
      r.max_wigner_angle = std::max(r.max_wigner_angle, std::abs(angle));
    } else {
      r.wigner_angles[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return r;
}

}  // namespace photon
