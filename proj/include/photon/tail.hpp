#pragma once
// Radial falloff of the field of a localized state.
//
// Integrating the angles out of int d^3k omega^alpha exp(i k.r) exp(-eps k)
// leaves the scalar radial model
//   F(r, eps) = 4 pi / ((2 pi)^{3/2} r) int_0^inf k^{1+alpha} sin(k r) exp(-eps k) dk.
// The integral is evaluated by quadrature over half-periods of sin(k r) with
// Wynn's epsilon algorithm accelerating the alternating partial sums, the
// regulator is then removed by polynomial (Richardson) extrapolation eps -> 0,
// and the slope of log|F| against log r is fitted. For alpha = 1/2 the tail
// falls as r^{-7/2}. For alpha = 0 the eps -> 0 limit vanishes for r > 0 (the
// field is a delta at the origin); at finite eps it falls as eps r^{-4}.

#include "photon/core.hpp"
#include "photon/kgrid.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

namespace photon {

/// Closed form Im[Gamma(nu) / (eps - i r)^nu], nu = 2 + alpha, of the radial
/// integral (principal branch; valid down to eps = 0).
inline double tail_integral_closed_form(double r, double eps, double alpha) {
  const double nu = 2.0 + alpha;
  return (std::tgamma(nu) * std::pow(cdouble(eps, -r), -nu)).imag();
}

/// |Gamma(nu) / (eps - i r)^nu|: the natural size of the radial integral, used
/// to measure quadrature error when the imaginary part itself cancels.
inline double tail_integral_scale(double r, double eps, double alpha) {
  const double nu = 2.0 + alpha;
  return std::tgamma(nu) * std::pow(std::hypot(eps, r), -nu);
}

inline double tail_prefactor(double r) { return 4.0 * pi * inv_two_pi_three_halves / r; }

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm. Returns
/// the even-column estimate whose change from its predecessor is smallest.
inline double wynn_epsilon(const std::vector<double>& partial_sums, double* error = nullptr) {
  const std::size_t n = partial_sums.size();
  std::vector<double> prev(n + 1, 0.0), cur(partial_sums);
  double best = partial_sums.back();
  double best_err = std::numeric_limits<double>::infinity();
  double last_even = best;
  for (std::size_t col = 1; col < n; ++col) {
    std::vector<double> next(n - col);
    bool broke = false;
    for (std::size_t i = 0; i + col < n; ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0) {
        broke = true;
        break;
      }
      next[i] = prev[i + 1] + 1.0 / d;
    }
    if (broke) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (col % 2 == 0) {
      const double est = cur.back();
      const double err = std::abs(est - last_even);
      if (err < best_err) {
        best_err = err;
        best = est;
      }
      last_even = est;
    }
  }
  if (error) *error = best_err;
  return best;
}

/// int_0^inf k^{1+alpha} sin(k r) exp(-eps k) dk by half-period quadrature.
/// Two dozen half-periods suffice; longer sequences only feed round-off into
/// the epsilon table.
/// The first half-period uses k = u^2, which removes the k^{1+alpha} branch
/// point at 0 for alpha in {-1/2, 0, 1/2}.
inline double tail_integral_quadrature(double r, double eps, double alpha, std::size_t periods = 24,
                                       std::size_t order = 32) {
  static thread_local quadrature::Rule gl;
  if (gl.x.size() != order) gl = quadrature::gauss_legendre(order);
  const double p = 1.0 + alpha;
  auto f = [&](double k) { return std::pow(k, p) * std::sin(k * r) * std::exp(-eps * k); };
  const double half = pi / r;

  std::vector<double> sums;
  sums.reserve(periods);
  // [0, half] in u with k = u^2, dk = 2u du.
  const double umax = std::sqrt(half);
  double s = 0.0;
  for (std::size_t j = 0; j < order; ++j) {
    const double u = 0.5 * umax * (gl.x[j] + 1.0);
    s += 0.5 * umax * gl.w[j] * f(u * u) * 2.0 * u;
  }
  sums.push_back(s);
  for (std::size_t m = 1; m < periods; ++m) {
    const double a = m * half;
    double piece = 0.0;
    for (std::size_t j = 0; j < order; ++j) piece += 0.5 * half * gl.w[j] * f(a + 0.5 * half * (gl.x[j] + 1.0));
    s += piece;
    sums.push_back(s);
  }
  return wynn_epsilon(sums);
}

/// Value at 0 of the polynomial through (x_i, y_i) (Neville). For a ratio-2
/// ladder this is repeated two-point Richardson extrapolation.
inline double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> p(y);
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

struct TailFitRequest {
  double alpha = 0.5;
  std::vector<double> radii;     // at least two, spanning one decade
  std::vector<double> epsilons;  // strictly decreasing; empty -> default ladder
  double k_scale = 1.0;          // radii must satisfy r k_scale >= min_core_multiple

  static constexpr double min_core_multiple = 5.0;
};

struct TailFitReport {
  double alpha = 0.5;
  std::vector<double> radii;
  std::vector<double> epsilons;
  std::vector<std::vector<double>> values;  // F(r_i, eps_j)
  std::vector<double> extrapolated;         // F(r_i, 0) from the ladder
  std::vector<double> closed_form;          // F(r_i, 0) exact
  double max_quadrature_error = 0.0;        // vs closed form at each eps, relative to the integral scale
  double max_extrapolation_error = 0.0;     // extrapolated vs exact, relative to the eps = 0 scale
  bool limit_vanishes = false;              // exact F(r, 0) is zero at every radius (alpha = 0)
  double slope = 0.0;                       // d log|F(r,0)| / d log r
  double half_width = 0.0;                  // 2 sigma of the slope
  double finite_eps_slope = 0.0;            // same fit at the smallest eps

  nlohmann::json to_json() const {
    return {{"alpha", alpha},
            {"radii", radii},
            {"epsilons", epsilons},
            {"extrapolated", extrapolated},
            {"closed_form", closed_form},
            {"max_quadrature_error", max_quadrature_error},
            {"max_extrapolation_error", max_extrapolation_error},
            {"limit_vanishes", limit_vanishes},
            {"slope", slope},
            {"half_width", half_width},
            {"finite_eps_slope", finite_eps_slope}};
  }
};

/// Least-squares slope of y against x with a 2-sigma half-width.
inline std::pair<double, double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double half = 0.0;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - (my + slope * (x[i] - mx));
      ss += e * e;
    }
    half = 2.0 * std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  }
  return {slope, half};
}

/// Default ladder {0.1, 0.05, 0.025, 0.0125} / r_min.
inline std::vector<double> default_epsilon_ladder(double r_min) {
  return {0.1 / r_min, 0.05 / r_min, 0.025 / r_min, 0.0125 / r_min};
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

inline TailFitReport tail_exponent(const TailFitRequest& req) {
  if (req.alpha != -0.5 && req.alpha != 0.0 && req.alpha != 0.5)
    throw Error(ErrorCode::invalid_argument, "alpha must be one of -1/2, 0, 1/2");
  if (req.radii.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two radii");
  const auto [rmin_it, rmax_it] = std::minmax_element(req.radii.begin(), req.radii.end());
  const double r_min = *rmin_it, r_max = *rmax_it;
  if (!(r_min * req.k_scale >= TailFitRequest::min_core_multiple))
    throw Error(ErrorCode::invalid_argument,
                "radii inside the core: need r * k_scale >= " + std::to_string(TailFitRequest::min_core_multiple));
  if (r_max < 10.0 * r_min * (1.0 - 1e-12))
    throw Error(ErrorCode::invalid_argument, "radii must span at least one decade");

  TailFitReport rep;
  rep.alpha = req.alpha;
  rep.radii = req.radii;
  rep.epsilons = req.epsilons.empty() ? default_epsilon_ladder(r_min) : req.epsilons;
  if (rep.epsilons.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two regulators");
  for (std::size_t j = 0; j < rep.epsilons.size(); ++j) {
    if (!(rep.epsilons[j] > 0.0)) throw Error(ErrorCode::invalid_argument, "regulators must be positive");
    if (j > 0 && !(rep.epsilons[j] < rep.epsilons[j - 1]))
      throw Error(ErrorCode::invalid_argument, "regulator ladder must be strictly decreasing");
  }

  // For alpha = 0 the eps -> 0 limit Im[-1 / r^2] is identically zero, so
  // there is no power law to fit at eps = 0.
  rep.limit_vanishes = req.alpha == 0.0;
  std::vector<double> logr, logf, logf_eps;
  for (double r : rep.radii) {
    const double pref = tail_prefactor(r);
    std::vector<double> row;
    for (double eps : rep.epsilons) {
      const double q = tail_integral_quadrature(r, eps, req.alpha);
      const double exact = tail_integral_closed_form(r, eps, req.alpha);
      rep.max_quadrature_error =
          std::max(rep.max_quadrature_error, std::abs(q - exact) / tail_integral_scale(r, eps, req.alpha));
      row.push_back(pref * q);
    }
    const double f0 = extrapolate_to_zero(rep.epsilons, row);
    const double exact0 = pref * tail_integral_closed_form(r, 0.0, req.alpha);
    const double scale0 = pref * tail_integral_scale(r, 0.0, req.alpha);
    rep.max_extrapolation_error = std::max(rep.max_extrapolation_error, std::abs(f0 - exact0) / scale0);
    rep.values.push_back(row);
    rep.extrapolated.push_back(f0);
    rep.closed_form.push_back(exact0);
    logr.push_back(std::log(r));
    logf.push_back(std::log(std::abs(f0)));
    logf_eps.push_back(std::log(std::abs(row.back())));
  }
  if (rep.limit_vanishes) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    rep.half_width = std::numeric_limits<double>::quiet_NaN();
  } else {
    std::tie(rep.slope, rep.half_width) = fit_slope(logr, logf);
  }
  rep.finite_eps_slope = fit_slope(logr, logf_eps).first;
  return rep;
}

}  // namespace photon
