#include "photon/tail.hpp"

#include <gtest/gtest.h>

using namespace photon;

TEST(TailIntegral, ClosedFormKnownValues) {
  // alpha = 0: Im[Gamma(2) (eps - i r)^{-2}] = 2 eps r / (eps^2 + r^2)^2
  for (double r : {1.0, 7.0})
    for (double eps : {0.0, 0.3})
      EXPECT_NEAR(tail_integral_closed_form(r, eps, 0.0), 2 * eps * r / std::pow(eps * eps + r * r, 2), 1e-15);
  // eps = 0, alpha = 1/2: Gamma(5/2) sin(5 pi / 4) ... sign only; magnitude r^{-5/2}
  EXPECT_NEAR(std::abs(tail_integral_closed_form(4.0, 0.0, 0.5)), std::tgamma(2.5) * std::pow(4.0, -2.5) / std::sqrt(2.0),
              1e-14);
}

TEST(TailIntegral, QuadratureMatchesClosedForm) {
  for (double alpha : {-0.5, 0.0, 0.5})
    for (double r : {5.0, 20.0, 60.0})
      for (double eps : {0.02, 0.005, 0.0025}) {
        const double q = tail_integral_quadrature(r, eps, alpha);
        const double exact = tail_integral_closed_form(r, eps, alpha);
        EXPECT_LT(std::abs(q - exact) / tail_integral_scale(r, eps, alpha), 1e-10)
            << alpha << " " << r << " " << eps;
      }
}

TEST(Wynn, AcceleratesAlternatingSeries) {
  // 1 - 1/2 + 1/3 - ... = ln 2
  std::vector<double> s;
  double acc = 0.0;
  for (int n = 1; n <= 16; ++n) {
    acc += (n % 2 ? 1.0 : -1.0) / n;
    s.push_back(acc);
  }
  double err = 0.0;
  EXPECT_NEAR(wynn_epsilon(s, &err), std::log(2.0), 1e-11);
  EXPECT_LT(err, 1e-8);
}

TEST(Extrapolation, PolynomialIsExact) {
  const std::vector<double> x{0.4, 0.2, 0.1, 0.05};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 - 2.0 * v + 0.5 * v * v * v);
  EXPECT_NEAR(extrapolate_to_zero(x, y), 3.0, 1e-13);
}

TEST(SlopeFit, ExactLine) {
  const std::vector<double> x{0, 1, 2, 3}, y{1, -2.5, -6, -9.5};
  const auto [s, h] = fit_slope(x, y);
  EXPECT_NEAR(s, -3.5, 1e-14);
  EXPECT_LT(h, 1e-13);
}

TEST(TailExponent, LandauPeierlsTailForElectricForm) {
  TailFitRequest req;
  req.alpha = 0.5;
  req.radii = log_spaced(5.0, 100.0, 12);
  const auto rep = tail_exponent(req);
  EXPECT_NEAR(rep.slope, -3.5, 0.1);
  EXPECT_LT(rep.half_width, 0.1);
  EXPECT_LT(rep.max_quadrature_error, 1e-10);
  EXPECT_LT(rep.max_extrapolation_error, 1e-6);
  EXPECT_FALSE(rep.limit_vanishes);
  EXPECT_EQ(rep.epsilons, default_epsilon_ladder(5.0));
}

TEST(TailExponent, VectorPotentialForm) {
  TailFitRequest req;
  req.alpha = -0.5;
  req.radii = log_spaced(5.0, 100.0, 8);
  const auto rep = tail_exponent(req);
  EXPECT_NEAR(rep.slope, -2.5, 0.1);
}

TEST(TailExponent, LandauPeierlsLimitVanishes) {
  TailFitRequest req;
  req.alpha = 0.0;
  req.radii = log_spaced(5.0, 100.0, 8);
  const auto rep = tail_exponent(req);
  EXPECT_TRUE(rep.limit_vanishes);
  EXPECT_TRUE(std::isnan(rep.slope));
  EXPECT_LT(rep.max_extrapolation_error, 1e-6);
  // At fixed eps, 2 eps r / r^4 ~ r^{-3}, times the 1/r prefactor.
  EXPECT_NEAR(rep.finite_eps_slope, -4.0, 0.05);
}

TEST(TailExponent, Preconditions) {
  TailFitRequest req;
  req.radii = log_spaced(5.0, 100.0, 4);
  auto bad = req;
  bad.alpha = 0.3;
  EXPECT_THROW(tail_exponent(bad), Error);
  bad = req;
  bad.radii = {10.0};
  EXPECT_THROW(tail_exponent(bad), Error);
  bad = req;
  bad.radii = log_spaced(1.0, 20.0, 4);  // inside the core
  EXPECT_THROW(tail_exponent(bad), Error);
  bad = req;
  bad.radii = log_spaced(5.0, 40.0, 4);  // under a decade
  EXPECT_THROW(tail_exponent(bad), Error);
  bad = req;
  bad.epsilons = {0.01};
  EXPECT_THROW(tail_exponent(bad), Error);
  bad.epsilons = {0.01, 0.02};
  EXPECT_THROW(tail_exponent(bad), Error);
  bad.epsilons = {0.01, -0.005};
  EXPECT_THROW(tail_exponent(bad), Error);
}
