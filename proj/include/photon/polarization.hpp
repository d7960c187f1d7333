#pragma once
// Spin-1 rotation algebra and helicity / linear polarisation unit vectors.
//
// Spherical conventions (shared by every module):
//   k_hat     = (sin t cos p, sin t sin p, cos t)
//   theta_hat = (cos t cos p, cos t sin p, -sin t)
//   phi_hat   = (-sin p, cos p, 0)
//   e_sigma^(chi) = (theta_hat + i sigma phi_hat) exp(-i sigma chi) / sqrt(2)

#include "photon/core.hpp"
#include "photon/kgrid.hpp"

#include <array>
#include <utility>
#include <vector>

namespace photon {

struct Direction {
  double theta = 0.0;
  double phi = 0.0;
};

inline Vec3 k_hat(const Direction& d) {
  const double st = std::sin(d.theta);
  return {st * std::cos(d.phi), st * std::sin(d.phi), std::cos(d.theta)};
}
inline Vec3 theta_hat(const Direction& d) {
  const double ct = std::cos(d.theta);
  return {ct * std::cos(d.phi), ct * std::sin(d.phi), -std::sin(d.theta)};
}
inline Vec3 phi_hat(const Direction& d) { return {-std::sin(d.phi), std::cos(d.phi), 0.0}; }

/// (S_i)_{jl} = -i eps_{ijl}, the vector representation of spin 1.
inline std::array<CMat3, 3> spin1_generators() {
  std::array<CMat3, 3> s;
  for (int i = 0; i < 3; ++i) {
    s[i].setZero();
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        // Levi-Civita via the cyclic structure of (i, j, l).
        int eps = 0;
        if (i != j && j != l && i != l) eps = ((j - i + 3) % 3 == 1) ? 1 : -1;
        s[i](j, l) = -I * static_cast<double>(eps);
      }
  }
  return s;
}

/// exp(-i (n.S) angle) for a unit axis n: the real rotation by `angle`
/// about n (Rodrigues).
inline Mat3 axis_rotation(const Vec3& axis, double angle) {
  const Vec3 n = axis.normalized();
  Mat3 cross;
  cross << 0.0, -n.z(), n.y(), n.z(), 0.0, -n.x(), -n.y(), n.x(), 0.0;
  return Mat3::Identity() + std::sin(angle) * cross + (1.0 - std::cos(angle)) * cross * cross;
}

struct RotationMatrix {
  CMat3 matrix;
  double phi = 0.0;
  double theta = 0.0;
  double chi = 0.0;
};

/// D = exp(-i S_k chi) exp(-i S_z phi) exp(-i S_y theta). With chi = 0 the
/// columns are theta_hat, phi_hat, k_hat; chi then turns the first two about
/// k_hat.
inline RotationMatrix rotation_D(double theta, double phi, double chi) {
  const Mat3 ry = axis_rotation(Vec3::UnitY(), theta);
  const Mat3 rz = axis_rotation(Vec3::UnitZ(), phi);
  const Vec3 kh = k_hat({theta, phi});
  const Mat3 rk = axis_rotation(kh, chi);
  return {(rk * rz * ry).cast<cdouble>(), phi, theta, chi};
}

struct PolarizationTriad {
  CVec3 e_plus;
  CVec3 e_minus;
  Vec3 e_long;
  double chi = 0.0;
  Direction direction;

  const CVec3& e(int sigma) const { return sigma > 0 ? e_plus : e_minus; }
};

namespace detail {

inline PolarizationTriad triad_unchecked(const Direction& d, double chi) {
  const Vec3 th = theta_hat(d);
  const Vec3 ph = phi_hat(d);
  const double s = 1.0 / std::sqrt(2.0);
  PolarizationTriad t;
  t.e_plus = (th.cast<cdouble>() + I * ph.cast<cdouble>()) * (s * std::exp(-I * chi));
  t.e_minus = (th.cast<cdouble>() - I * ph.cast<cdouble>()) * (s * std::exp(I * chi));
  t.e_long = k_hat(d);
  t.chi = chi;
  t.direction = d;
  return t;
}

inline void require_off_pole(const Direction& d) {
  if (!(d.theta > 0.0 && d.theta < pi))
    throw Error(ErrorCode::pole_singularity,
                "theta_hat and phi_hat are discontinuous at theta = 0, pi; move the direction "
                "off the pole or use chi = -phi, for which e_sigma has a limit along the axis");
}

}  // namespace detail

inline PolarizationTriad polarization_vectors(const Direction& d, double chi = 0.0) {
  detail::require_off_pole(d);
  return detail::triad_unchecked(d, chi);
}

/// e_sigma^(chi) at a grid node. Nodes on the kz axis raise the pole error.
inline CVec3 helicity_vector(const KNode& n, int sigma, double chi = 0.0) {
  if (n.on_axis())
    throw Error(ErrorCode::pole_singularity,
                "helicity vector requested at a node on the kz axis (use a cell-centred grid)");
  const Vec3 th = theta_hat({n.theta, n.phi});
  const Vec3 ph = phi_hat({n.theta, n.phi});
  const double sg = static_cast<double>(sigma);
  return (th.cast<cdouble>() + (I * sg) * ph.cast<cdouble>()) *
         (std::exp(-I * (sg * chi)) / std::sqrt(2.0));
}

/// e_sigma^(0) at an arbitrary off-grid momentum, as needed when analytic
/// states are evaluated at boosted momenta. On the kz axis the phi = 0 branch
/// is taken (a measure-zero set for every quadrature used here).
inline CVec3 helicity_vector_at(const Vec3& k, int sigma) {
  const Direction d{std::atan2(std::hypot(k.x(), k.y()), k.z()), std::atan2(k.y(), k.x())};
  return detail::triad_unchecked(d, 0.0).e(sigma);
}

/// (e_R1, e_R2) = ((e_1 + e_-1) / sqrt 2, (e_1 - e_-1) / (i sqrt 2)); equal to
/// theta_hat cos chi + phi_hat sin chi and -theta_hat sin chi + phi_hat cos chi.
inline std::pair<Vec3, Vec3> linear_polarization_vectors(const Direction& d, double chi = 0.0) {
  const auto t = polarization_vectors(d, chi);
  const double s = 1.0 / std::sqrt(2.0);
  const CVec3 r1 = (t.e_plus + t.e_minus) * s;
  const CVec3 r2 = (t.e_plus - t.e_minus) * (s / I);
  return {r1.real(), r2.real()};
}

/// The gauge angle chi(k) used to label transverse polarisations.
///
/// `time_shift` tau implements chi -> chi - sigma omega_k tau, which makes the
/// physical localized amplitudes position eigenvectors. It enters only through
/// exp(i sigma chi) = exp(i sigma chi_base - i omega tau), so no per-helicity
/// table is needed.
struct ChiSpec {
  enum class Kind { zero, minus_phi, table };

  Kind kind = Kind::zero;
  std::vector<double> table;  // per-node chi for Kind::table
  double time_shift = 0.0;

  static ChiSpec zero() { return {}; }
  static ChiSpec minus_phi() { return {Kind::minus_phi, {}, 0.0}; }
  static ChiSpec from_table(std::vector<double> values) {
    return {Kind::table, std::move(values), 0.0};
  }
  ChiSpec with_time_shift(double tau) const {
    ChiSpec c = *this;
    c.time_shift = tau;
    return c;
  }

  bool differentiable() const noexcept { return kind != Kind::table; }

  double base(const KNode& n, std::size_t index) const {
    switch (kind) {
      case Kind::zero: return 0.0;
      case Kind::minus_phi: return -n.phi;
      case Kind::table:
        if (index >= table.size())
          throw Error(ErrorCode::invalid_argument, "chi table shorter than the grid");
        return table[index];
    }
    return 0.0;
  }

  /// chi for helicity sigma at a node.
  double value(const KNode& n, std::size_t index, int sigma) const {
    return base(n, index) - static_cast<double>(sigma) * n.omega() * time_shift;
  }

  /// exp(i sigma chi) at a node.
  cdouble phase(const KNode& n, std::size_t index, int sigma) const {
    return std::exp(I * (static_cast<double>(sigma) * base(n, index) - n.omega() * time_shift));
  }

  std::string name() const {
    switch (kind) {
      case Kind::zero: return "zero";
      case Kind::minus_phi: return "minus_phi";
      case Kind::table: return "table";
    }
    return "zero";
  }
};

inline ChiSpec parse_chi(const std::string& s) {
  if (s == "zero") return ChiSpec::zero();
  if (s == "minus_phi") return ChiSpec::minus_phi();
  throw Error(ErrorCode::invalid_argument, "chi must be 'zero' or 'minus_phi' (got '" + s + "')");
}

}  // namespace photon
