#include "photon/localization.hpp"

#include <gtest/gtest.h>

using namespace photon;

namespace {

std::shared_ptr<const CartesianGrid> cart(std::size_t n, double k_max, const Vec3& center = Vec3::Zero()) {
  return std::static_pointer_cast<const CartesianGrid>(build_cartesian_grid(n, k_max, Centering::cell, center));
}

double second_moment(const NumberAmplitudeR& a) {
  Vec3 mean = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += a.density(i);
    mean += a.density(i) * a.position(i);
  }
  mean /= total;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.density(i) * (a.position(i) - mean).squaredNorm();
  return s / total;
}

}  // namespace

TEST(NumberAmplitude, LocalizedStateIsDelta) {
  auto g = cart(32, 2.0 * pi);
  const std::size_t site = g->index(9, 20, 14);
  for (int s : {+1, -1}) {
    auto d = localized_state(g, {g->r_point(site), 0.0, s});
    const auto amp = number_amplitude(d, 0.0, ChiSpec::zero(), AmplitudePath::fft);
    const double dv = g->cell_volume_r();
    double off = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
      const double v = std::abs(amp.helicity(s)[i]) * dv;
      if (i == site)
        EXPECT_NEAR(v, 1.0, 1e-12);
      else
        off = std::max(off, v);
      EXPECT_EQ(amp.helicity(-s)[i], cdouble{});
    }
    EXPECT_LT(off, 1e-12);
  }
}

TEST(NumberAmplitude, LocalizedAtLaterTime) {
  auto g = cart(16, 4.0);
  const std::size_t site = 777;
  auto d = localized_state(g, {g->r_point(site), 1.5, +1});
  const auto amp = number_amplitude(d, 1.5, ChiSpec::zero(), AmplitudePath::fft);
  EXPECT_NEAR(std::abs(amp.helicity(+1)[site]) * g->cell_volume_r(), 1.0, 1e-12);
}

TEST(NumberAmplitude, ProbabilityConservedWhileSpreading) {
  auto g = cart(32, 6.0);
  auto wf = normalize(states::gaussian(g, Vec3::Zero(), 1.0, +1));
  const auto a0 = number_amplitude(wf, 0.0, ChiSpec::zero(), AmplitudePath::fft);
  const auto a1 = number_amplitude(wf, 2.0, ChiSpec::zero(), AmplitudePath::fft);
  EXPECT_NEAR(a0.total_probability(), 1.0, 1e-12);
  EXPECT_NEAR(a1.total_probability(), 1.0, 1e-12);
  EXPECT_GT(second_moment(a1), 2.0 * second_moment(a0));
}

TEST(NumberAmplitude, GaussianClosedForm) {
  // (2pi)^{-3/2} int exp(-|k-c|^2/w^2 + i k.(r+a)) d^3k = (w^2/2)^{3/2} e^{-w^2|r+a|^2/4} e^{i c.(r+a)}
  const Vec3 c(0.4, 0.0, -0.3), a(0.7, -0.4, 0.3);
  const double w = 1.2;
  auto g = cart(64, 8.0);
  auto wf = states::gaussian(g, c, w, -1, Form::landau_peierls, a);
  const auto amp = number_amplitude(wf, 0.0, ChiSpec::zero(), AmplitudePath::fft);
  double worst = 0.0;
  const double peak = std::pow(w * w / 2.0, 1.5);
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const Vec3 x = amp.position(i) + a;
    const cdouble expected = peak * std::exp(-w * w * x.squaredNorm() / 4.0) * std::exp(I * c.dot(x));
    worst = std::max(worst, std::abs(amp.helicity(-1)[i] - expected));
  }
  EXPECT_LT(worst / peak, 1e-10);
}

TEST(NumberAmplitude, PathsAgree) {
  auto g = cart(32, 6.0);
  auto wf = states::random_superposition(g, 17);
  const auto chi = ChiSpec::minus_phi();
  const auto fft = number_amplitude(wf, 0.6, chi, AmplitudePath::fft);
  std::vector<std::size_t> idx{0, 100, 5000, 16400, 32767};
  std::vector<Vec3> pts;
  for (auto i : idx) pts.push_back(g->r_point(i));
  const auto quad = number_amplitude(wf, 0.6, chi, AmplitudePath::quadrature, pts);
  double scale = 0.0;
  for (std::size_t i = 0; i < fft.size(); ++i) scale = std::max(scale, std::sqrt(fft.density(i)));
  for (std::size_t p = 0; p < idx.size(); ++p)
    for (int s : {+1, -1})
      EXPECT_LT(std::abs(quad.helicity(s)[p] - fft.helicity(s)[idx[p]]) / scale, 1e-12);
  EXPECT_THROW(quad.total_probability(), Error);
  EXPECT_THROW(number_amplitude(wf, 0.0, chi, AmplitudePath::quadrature), Error);
}

TEST(NumberAmplitude, FftNeedsCartesianGrid) {
  auto wf = states::gaussian(build_spherical_grid(4, 4, 4, 2.0), Vec3::Zero(), 1.0, +1);
  try {
    number_amplitude(wf, 0.0, ChiSpec::zero(), AmplitudePath::fft);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::wrong_grid);
  }
}

TEST(LinearDetection, MalusLaw) {
  for (double chi_p : {0.0, 0.4, 1.3}) {
    const cdouble g(0.8, -0.3);
    const cdouble cp = std::exp(-I * chi_p) * g / std::sqrt(2.0);
    const cdouble cm = std::exp(I * chi_p) * g / std::sqrt(2.0);
    for (double chi : {0.0, 0.25, pi / 3, 2.0}) {
      const auto [r1, r2] = linear_detection(cp, cm, chi);
      EXPECT_NEAR(std::norm(r1), std::norm(g) * std::pow(std::cos(chi - chi_p), 2), 1e-15);
      EXPECT_NEAR(std::norm(r2), std::norm(g) * std::pow(std::sin(chi - chi_p), 2), 1e-15);
    }
  }
}

TEST(LinearDetection, Unitary) {
  const cdouble cp(0.3, 1.1), cm(-0.7, 0.2);
  for (double chi : {0.0, 0.9, -2.4}) {
    const auto [r1, r2] = linear_detection(cp, cm, chi);
    EXPECT_NEAR(std::norm(r1) + std::norm(r2), std::norm(cp) + std::norm(cm), 1e-15);
  }
}

TEST(Glauber, NarrowbandAgreesBroadbandDoesNot) {
  // s / k0 = 0.01 and 0.5, packets along x where the chi = 0 basis is smooth.
  auto narrow_grid = cart(32, 6.0, Vec3(100.0, 0, 0));
  auto narrow = states::gaussian(narrow_grid, Vec3(100.0, 0, 0), 1.0, +1);
  auto broad_grid = cart(32, 6.0, Vec3(2.0, 0, 0));
  auto broad = states::gaussian(broad_grid, Vec3(2.0, 0, 0), 1.0, +1);
  const double n = glauber_compare(narrow, 0.0).relative_distance;
  const double b = glauber_compare(broad, 0.0).relative_distance;
  EXPECT_LT(n, 1e-3);
  EXPECT_GT(b, 10.0 * n);
}

TEST(Glauber, DensitiesNormalised) {
  auto g = cart(32, 6.0, Vec3(3.0, 0, 0));
  const auto d = glauber_densities(states::gaussian(g, Vec3(3.0, 0, 0), 0.8, -1), 0.5);
  double sn = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < d.number.size(); ++i) {
    sn += d.number[i];
    sg += d.glauber[i];
  }
  EXPECT_NEAR(sn * g->cell_volume_r(), 1.0, 1e-12);
  EXPECT_NEAR(sg * g->cell_volume_r(), 1.0, 1e-12);
}

TEST(Glauber, ZeroNormRejected) {
  auto g = cart(8, 2.0);
  auto zero = make_wavefunction(g, {}, {}, Form::landau_peierls);
  try {
    glauber_compare(zero, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_state);
  }
}
