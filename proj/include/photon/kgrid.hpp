#pragma once
// k-space quadrature grids.
//
// Natural units hbar = c = eps0 = 1 are used throughout, so omega_k = |k|.
// Every grid flattens to a list of KNode carrying the full d^3k weight, which
// is all that integrals, scalar products and state sampling need. Spherical
// grids are tensor products (radial x cos(theta) x phi); Cartesian grids are
// uniform cubes paired with an FFT-dual r-grid.

#include "photon/core.hpp"

#include <json.hpp>

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace photon {

struct KNode {
  Vec3 k;
  double kmag = 0.0;   // |k| = omega_k
  double theta = 0.0;  // polar angle
  double phi = 0.0;    // azimuth in (-pi, pi]
  double weight = 0.0; // full d^3k weight

  double omega() const noexcept { return kmag; }
  // e_sigma is undefined at k = 0 and along the kz axis.
  bool on_axis() const noexcept { return k.x() == 0.0 && k.y() == 0.0; }
};

inline KNode make_node(const Vec3& k, double weight) {
  KNode n;
  n.k = k;
  n.kmag = k.norm();
  n.theta = std::atan2(std::hypot(k.x(), k.y()), k.z());
  n.phi = std::atan2(k.y(), k.x());
  n.weight = weight;
  return n;
}

enum class GridKind { spherical, cartesian };
enum class RadialRule { gauss_legendre, tanh_sinh };
enum class Centering { cell, vertex };

inline std::string to_string(RadialRule r) {
  return r == RadialRule::gauss_legendre ? "gauss-legendre" : "tanh-sinh";
}

inline RadialRule parse_radial_rule(const std::string& s) {
  if (s == "gauss-legendre") return RadialRule::gauss_legendre;
  if (s == "tanh-sinh") return RadialRule::tanh_sinh;
  throw Error(ErrorCode::invalid_argument, "unknown radial rule '" + s + "'");
}

class KSpaceGrid {
 public:
  virtual ~KSpaceGrid() = default;
  virtual GridKind kind() const noexcept = 0;
  virtual nlohmann::json descriptor() const = 0;

  std::span<const KNode> nodes() const noexcept { return nodes_; }
  const KNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t size() const noexcept { return nodes_.size(); }

 protected:
  std::vector<KNode> nodes_;
};

using GridPtr = std::shared_ptr<const KSpaceGrid>;

namespace quadrature {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline Rule gauss_legendre(std::size_t n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
    }
    dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

/// n-point tanh-sinh rule mapped to [0, b]. Nodes are returned as the
/// distance from 0, computed without cancellation so none is exactly 0.
inline Rule tanh_sinh_half_line(std::size_t n, double b) {
  constexpr double t_max = 3.2;
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const double h = 2.0 * t_max / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = -t_max + h * static_cast<double>(j);
    const double u = 0.5 * pi * std::sinh(t);
    // 1 + tanh(u) = 2 / (1 + exp(-2u))
    const double one_plus_x = 2.0 / (1.0 + std::exp(-2.0 * u));
    const double cu = std::cosh(u);
    r.x[j] = 0.5 * b * one_plus_x;
    r.w[j] = 0.5 * b * h * 0.5 * pi * std::cosh(t) / (cu * cu);
  }
  return r;
}

}  // namespace quadrature

/// Spherical product grid on the ball |k| < k_max. Node (ir, it, ip) lives at
/// flat index (ir * n_theta + it) * n_phi + ip.
class SphericalGrid final : public KSpaceGrid {
 public:
  SphericalGrid(std::size_t n_r, std::size_t n_theta, std::size_t n_phi, double k_max,
                RadialRule rule)
      : n_r_(n_r), n_theta_(n_theta), n_phi_(n_phi), k_max_(k_max), rule_(rule) {
    if (n_r < 2 || n_theta < 2 || n_phi < 2)
      throw Error(ErrorCode::invalid_argument, "spherical grid needs n_r, n_theta, n_phi >= 2");
    if (!(k_max > 0.0) || !std::isfinite(k_max))
      throw Error(ErrorCode::invalid_argument, "k_max must be positive and finite");

    quadrature::Rule radial;
    if (rule == RadialRule::gauss_legendre) {
      radial = quadrature::gauss_legendre(n_r);
      for (std::size_t i = 0; i < n_r; ++i) {
        radial.x[i] = 0.5 * k_max * (radial.x[i] + 1.0);
        radial.w[i] *= 0.5 * k_max;
      }
    } else {
      radial = quadrature::tanh_sinh_half_line(n_r, k_max);
    }
    radii_ = radial.x;
    radial_weights_ = radial.w;

    const auto polar = quadrature::gauss_legendre(n_theta);
    mu_ = polar.x;
    mu_weights_ = polar.w;

    phis_.resize(n_phi);
    const double dphi = 2.0 * pi / static_cast<double>(n_phi);
    for (std::size_t p = 0; p < n_phi; ++p) phis_[p] = (static_cast<double>(p) + 0.5) * dphi;

    nodes_.reserve(n_r * n_theta * n_phi);
    for (std::size_t ir = 0; ir < n_r; ++ir) {
      const double k = radii_[ir];
      for (std::size_t it = 0; it < n_theta; ++it) {
        const double mu = mu_[it];
        const double st = std::sqrt((1.0 - mu) * (1.0 + mu));
        for (std::size_t ip = 0; ip < n_phi; ++ip) {
          const double ph = phis_[ip];
          KNode n;
          n.k = Vec3(k * st * std::cos(ph), k * st * std::sin(ph), k * mu);
          n.kmag = k;
          n.theta = std::acos(mu);
          n.phi = ph > pi ? ph - 2.0 * pi : ph;
          n.weight = k * k * radial_weights_[ir] * mu_weights_[it] * dphi;
          nodes_.push_back(n);
        }
      }
    }
  }

  GridKind kind() const noexcept override { return GridKind::spherical; }

  nlohmann::json descriptor() const override {
    return {{"type", "spherical"},     {"n_r", n_r_},     {"n_theta", n_theta_},
            {"n_phi", n_phi_},         {"k_max", k_max_}, {"radial_rule", to_string(rule_)}};
  }

  std::size_t n_r() const noexcept { return n_r_; }
  std::size_t n_theta() const noexcept { return n_theta_; }
  std::size_t n_phi() const noexcept { return n_phi_; }
  double k_max() const noexcept { return k_max_; }
  RadialRule radial_rule() const noexcept { return rule_; }

  const std::vector<double>& radii() const noexcept { return radii_; }
  const std::vector<double>& mu() const noexcept { return mu_; }
  const std::vector<double>& phis() const noexcept { return phis_; }

  std::size_t index(std::size_t ir, std::size_t it, std::size_t ip) const noexcept {
    return (ir * n_theta_ + it) * n_phi_ + ip;
  }

 private:
  std::size_t n_r_, n_theta_, n_phi_;
  double k_max_;
  RadialRule rule_;
  std::vector<double> radii_, radial_weights_, mu_, mu_weights_, phis_;
};

/// Uniform n^3 cube of half-width k_max around `center`, with its FFT-dual
/// r-grid. Nodes are enumerated row-major with x slowest:
/// flat = (i * n + j) * n + l, k = center + (-k_max + (i + s) dk, ...), where
/// s = 1/2 for cell centring and 0 for vertex centring. The r-grid is
/// r_j = -n dr / 2 + j dr on every axis, dr = 2 pi / (n dk).
class CartesianGrid final : public KSpaceGrid {
 public:
  CartesianGrid(std::size_t n, double k_max, Centering centering = Centering::cell,
                const Vec3& center = Vec3::Zero())
      : n_(n), k_max_(k_max), centering_(centering), center_(center) {
    if (n < 8 || (n & (n - 1)) != 0)
      throw Error(ErrorCode::invalid_argument, "cartesian grid size must be a power of two >= 8");
    if (!(k_max > 0.0) || !std::isfinite(k_max))
      throw Error(ErrorCode::invalid_argument, "k_max must be positive and finite");
    dk_ = 2.0 * k_max / static_cast<double>(n);
    dr_ = 2.0 * pi / (static_cast<double>(n) * dk_);
    const double w = dk_ * dk_ * dk_;
    nodes_.reserve(n * n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l)
          nodes_.push_back(make_node(Vec3(k_axis(i, 0), k_axis(j, 1), k_axis(l, 2)), w));
  }

  GridKind kind() const noexcept override { return GridKind::cartesian; }

  nlohmann::json descriptor() const override {
    return {{"type", "cartesian"},
            {"n", n_},
            {"k_max", k_max_},
            {"centering", centering_ == Centering::cell ? "cell" : "vertex"},
            {"center", {center_.x(), center_.y(), center_.z()}}};
  }

  std::size_t n() const noexcept { return n_; }
  double k_max() const noexcept { return k_max_; }
  double dk() const noexcept { return dk_; }
  double dr() const noexcept { return dr_; }
  double cell_volume_k() const noexcept { return dk_ * dk_ * dk_; }
  double cell_volume_r() const noexcept { return dr_ * dr_ * dr_; }
  Centering centering() const noexcept { return centering_; }
  const Vec3& center() const noexcept { return center_; }

  /// k coordinate of index i along `axis`.
  double k_axis(std::size_t i, int axis) const noexcept {
    const double s = centering_ == Centering::cell ? 0.5 : 0.0;
    return center_[axis] - k_max_ + (static_cast<double>(i) + s) * dk_;
  }
  /// r coordinate of index j (identical on every axis).
  double r_axis(std::size_t j) const noexcept {
    return -0.5 * static_cast<double>(n_) * dr_ + static_cast<double>(j) * dr_;
  }
  Vec3 r_point(std::size_t flat) const noexcept {
    const std::size_t i = flat / (n_ * n_), j = (flat / n_) % n_, l = flat % n_;
    return Vec3(r_axis(i), r_axis(j), r_axis(l));
  }
  std::size_t index(std::size_t i, std::size_t j, std::size_t l) const noexcept {
    return (i * n_ + j) * n_ + l;
  }
  /// Flat r-grid index of a point lying on the grid, if it does.
  std::optional<std::size_t> r_index(const Vec3& r) const {
    std::size_t idx[3];
    for (int a = 0; a < 3; ++a) {
      const double f = (r[a] + 0.5 * static_cast<double>(n_) * dr_) / dr_;
      const double fr = std::round(f);
      if (std::abs(f - fr) > 1e-9 || fr < 0.0 || fr >= static_cast<double>(n_)) return std::nullopt;
      idx[a] = static_cast<std::size_t>(fr);
    }
    return index(idx[0], idx[1], idx[2]);
  }

 private:
  std::size_t n_;
  double k_max_;
  Centering centering_;
  Vec3 center_;
  double dk_ = 0.0, dr_ = 0.0;
};

inline std::shared_ptr<const SphericalGrid> build_spherical_grid(
    std::size_t n_r, std::size_t n_theta, std::size_t n_phi, double k_max,
    RadialRule rule = RadialRule::gauss_legendre) {
  return std::make_shared<const SphericalGrid>(n_r, n_theta, n_phi, k_max, rule);
}

inline std::shared_ptr<const CartesianGrid> build_cartesian_grid(
    std::size_t n, double k_max, Centering centering = Centering::cell,
    const Vec3& center = Vec3::Zero()) {
  return std::make_shared<const CartesianGrid>(n, k_max, centering, center);
}

/// Sum of weight_i * sample_i with deterministic pairwise summation.
inline cdouble integrate(const KSpaceGrid& grid, std::span<const cdouble> samples) {
  if (samples.size() != grid.size())
    throw Error(ErrorCode::invalid_argument,
                "sample count " + std::to_string(samples.size()) + " != node count " +
                    std::to_string(grid.size()));
  std::vector<cdouble> terms(samples.size());
  const auto nodes = grid.nodes();
  for (std::size_t i = 0; i < samples.size(); ++i) terms[i] = nodes[i].weight * samples[i];
  return pairwise_sum(terms);
}

/// Samples f at every node, then integrates.
template <typename Fn>
cdouble integrate_function(const KSpaceGrid& grid, Fn&& f) {
  std::vector<cdouble> s(grid.size());
  const auto nodes = grid.nodes();
  parallel_for(s.size(), [&](std::size_t i) { s[i] = f(nodes[i]); });
  return integrate(grid, s);
}

inline bool same_grid(const KSpaceGrid& a, const KSpaceGrid& b) {
  return &a == &b || a.descriptor() == b.descriptor();
}

/// Grid from a JSON/config descriptor of the form emitted by descriptor().
inline GridPtr grid_from_descriptor(const nlohmann::json& d) {
  const std::string type = d.at("type").get<std::string>();
  if (type == "spherical") {
    return build_spherical_grid(d.at("n_r").get<std::size_t>(), d.at("n_theta").get<std::size_t>(),
                                d.at("n_phi").get<std::size_t>(), d.at("k_max").get<double>(),
                                parse_radial_rule(d.value("radial_rule", std::string("gauss-legendre"))));
  }
  if (type == "cartesian") {
    Vec3 c = Vec3::Zero();
    if (d.contains("center")) {
      const auto& a = d.at("center");
      c = Vec3(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
    }
    const std::string centering = d.value("centering", std::string("cell"));
    if (centering != "cell" && centering != "vertex")
      throw Error(ErrorCode::invalid_argument, "centering must be 'cell' or 'vertex'");
    return build_cartesian_grid(d.at("n").get<std::size_t>(), d.at("k_max").get<double>(),
                                centering == "cell" ? Centering::cell : Centering::vertex, c);
  }
  throw Error(ErrorCode::invalid_argument, "unknown grid type '" + type + "'");
}

}  // namespace photon
