#include "photon/wavefunction.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace photon;

namespace {

double max_sample_diff(const WaveFunctionK& a, const WaveFunctionK& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) d = std::max(d, (a.vector_sample(i) - b.vector_sample(i)).norm());
  return d;
}

double max_amp_diff(const WaveFunctionK& a, const WaveFunctionK& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i)
    d = std::max({d, std::abs(a.c_plus()[i] - b.c_plus()[i]), std::abs(a.c_minus()[i] - b.c_minus()[i])});
  return d;
}

AmplitudeFn gauss0 = [](const Vec3& k) { return cdouble(std::exp(-k.squaredNorm())); };

}  // namespace

TEST(MakeWavefunction, FactorisedVectorSamples) {
  auto g = build_spherical_grid(8, 6, 8, 3.0);
  auto wf = make_wavefunction(g, gauss0, {}, Form::landau_peierls);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const KNode& n = g->node(i);
    const CVec3 expected = std::exp(-n.kmag * n.kmag) * polarization_vectors({n.theta, n.phi}).e_plus;
    EXPECT_LT((wf.vector_sample(i) - expected).norm(), 1e-15);
    EXPECT_LT(std::abs(n.k.normalized().cast<cdouble>().dot(wf.vector_sample(i))), 1e-14);
  }
}

TEST(MakeWavefunction, VectorPotentialFormScaling) {
  auto g = build_spherical_grid(8, 6, 8, 3.0);
  auto lp = make_wavefunction(g, gauss0, {}, Form::landau_peierls);
  auto a = make_wavefunction(g, gauss0, {}, Form::vector_potential);
  for (std::size_t i = 0; i < g->size(); ++i)
    EXPECT_LT((a.vector_sample(i) - lp.vector_sample(i) / std::sqrt(g->node(i).omega())).norm(), 1e-15);
}

TEST(MakeWavefunction, OffsetGaussianNorm) {
  // int exp(-2 |k - k0|^2) d^3k = (pi / 2)^{3/2}
  auto g = build_cartesian_grid(32, 5.0, Centering::cell, Vec3(0, 0, 5));
  auto wf = states::gaussian(g, Vec3(0, 0, 5), 1.0, +1);
  EXPECT_LT(std::abs(wf.norm_squared() - std::pow(pi / 2, 1.5)) / std::pow(pi / 2, 1.5), 1e-9);
}

TEST(MakeWavefunction, NonFiniteSampleNamesNode) {
  auto g = build_spherical_grid(4, 4, 4, 1.0);
  AmplitudeFn bad = [](const Vec3& k) { return k.z() > 0.5 ? cdouble(NAN) : cdouble(1.0); };
  try {
    make_wavefunction(g, bad, {}, Form::landau_peierls);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_state);
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(ConvertAlpha, RoundTripIsIdentity) {
  auto g = build_spherical_grid(8, 6, 8, 3.0);
  auto wf = states::random_superposition(g, 5);
  auto back = convert_alpha(convert_alpha(wf, Form::electric_field), Form::landau_peierls);
  EXPECT_EQ(max_sample_diff(wf, back), 0.0);
}

TEST(ConvertAlpha, ElectricFieldIsTimeDerivativeOfPotential) {
  auto g = build_spherical_grid(16, 8, 8, 6.0);
  auto a = convert_alpha(states::random_superposition(g, 9), Form::vector_potential);
  auto e = convert_alpha(a, Form::electric_field);
  auto fd_error = [&](double h) {
    const auto p = evolve(a, h), m = evolve(a, -h);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const CVec3 d = I * (p.vector_sample(i) - m.vector_sample(i)) / (2.0 * h);
      worst = std::max(worst, (d - e.vector_sample(i)).norm());
      scale = std::max(scale, e.vector_sample(i).norm());
    }
    return worst / scale;
  };
  const double e1 = fd_error(1e-3), e2 = fd_error(5e-4);
  EXPECT_LT(e1, 1e-4);
  EXPECT_NEAR(e1 / e2, 4.0, 0.1);  // O(dt^2)
}

TEST(ConvertAlpha, ShellScaling) {
  // Place the outer radial node of a 2-point rule at |k| = 2.
  const double k_max = 2.0 / (0.5 * (1.0 + 1.0 / std::sqrt(3.0)));
  auto g = build_spherical_grid(2, 4, 4, k_max);
  auto wf = make_wavefunction(g, gauss0, gauss0, Form::landau_peierls);
  auto e = convert_alpha(wf, Form::electric_field);
  int checked = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (std::abs(g->node(i).omega() - 2.0) > 1e-12) continue;
    EXPECT_LT((e.vector_sample(i) - std::sqrt(2.0) * wf.vector_sample(i)).norm(), 1e-14);
    ++checked;
  }
  EXPECT_EQ(checked, 16);
}

TEST(Evolve, IdentityInverseAndNorms) {
  auto g = build_spherical_grid(16, 8, 16, 6.0);
  auto wf = states::random_superposition(g, 1);
  EXPECT_EQ(max_amp_diff(evolve(wf, 0.0), wf), 0.0);
  EXPECT_LT(max_amp_diff(evolve(evolve(wf, 1.3), -1.3), wf), 1e-14);
  const auto w = evolve(wf, 2.7);
  EXPECT_NEAR(w.time(), 2.7, 0.0);
  EXPECT_LT(std::abs(w.norm_squared() - wf.norm_squared()) / wf.norm_squared(), 1e-14);
  for (int s : {+1, -1})
    EXPECT_LT(std::abs(w.helicity_norm_squared(s) - wf.helicity_norm_squared(s)) / wf.helicity_norm_squared(s),
              1e-14);
}

TEST(Evolve, CommutesWithConvertAlpha) {
  auto g = build_spherical_grid(8, 6, 8, 4.0);
  auto wf = states::random_superposition(g, 2);
  auto a = evolve(convert_alpha(wf, Form::electric_field), 0.9);
  auto b = convert_alpha(evolve(wf, 0.9), Form::electric_field);
  EXPECT_EQ(max_sample_diff(a, b), 0.0);
}

TEST(Normalize, UnitNormAndZeroState) {
  auto g = build_spherical_grid(16, 8, 16, 6.0);
  EXPECT_NEAR(normalize(states::random_superposition(g, 4)).norm_squared(), 1.0, 1e-14);
  auto zero = make_wavefunction(g, {}, {}, Form::landau_peierls);
  EXPECT_THROW(normalize(zero), Error);
}

TEST(Synthesize, SingleNodePlaneWave) {
  auto g = build_cartesian_grid(8, 2.0);
  const std::size_t node = g->index(5, 2, 6);
  std::vector<cdouble> p(g->size()), m(g->size());
  p[node] = 1.0;
  const double t = 0.4;
  WaveFunctionK wf(g, p, m, Form::electric_field, 0.0);
  const auto r = synthesize_real_space(wf, t);
  const KNode& n = g->node(node);
  const CVec3 e = helicity_vector(n, +1) * std::sqrt(n.omega());
  for (std::size_t j = 0; j < g->size(); ++j) {
    const Vec3 x = g->r_point(j);
    const CVec3 expected =
        e * (g->cell_volume_k() * inv_two_pi_three_halves * std::exp(I * (n.k.dot(x) - n.omega() * t)));
    EXPECT_LT((r.at(j) - expected).norm(), 1e-15);
  }
}

TEST(Synthesize, Parseval) {
  auto g = build_cartesian_grid(16, 4.0);
  auto wf = states::random_superposition(g, 8);
  const auto r = synthesize_real_space(wf);
  double k2 = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) k2 += wf.vector_sample(i).squaredNorm() * g->cell_volume_k();
  EXPECT_LT(std::abs(r.norm_squared() - k2) / k2, 1e-12);
}

TEST(Synthesize, IsotropicGaussianScalar) {
  // (2 pi)^{-3/2} int exp(-k^2) exp(i k.r) d^3k = 2^{-3/2} exp(-r^2 / 4)
  auto g = build_cartesian_grid(64, 8.0);
  std::vector<cdouble> s(g->size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(-g->node(i).k.squaredNorm());
  const auto f = k_to_r(*g, s);
  double worst = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    worst = std::max(worst, std::abs(f[j] - std::pow(2.0, -1.5) * std::exp(-0.25 * g->r_point(j).squaredNorm())));
  EXPECT_LT(worst / std::pow(2.0, -1.5), 1e-9);
}

TEST(Synthesize, RejectsSphericalGrid) {
  auto wf = states::gaussian(build_spherical_grid(4, 4, 4, 2.0), Vec3::Zero(), 1.0, +1);
  try {
    synthesize_real_space(wf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::wrong_grid);
  }
}

TEST(Synthesize, VertexGridHitsPole) {
  auto wf = states::gaussian(build_cartesian_grid(8, 2.0, Centering::vertex), Vec3::Zero(), 1.0, +1);
  try {
    synthesize_real_space(wf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::pole_singularity);
  }
}

TEST(States, RandomSuperpositionIsSeeded) {
  auto g = build_spherical_grid(4, 4, 4, 2.0);
  EXPECT_EQ(max_amp_diff(states::random_superposition(g, 42), states::random_superposition(g, 42)), 0.0);
  EXPECT_GT(max_amp_diff(states::random_superposition(g, 42), states::random_superposition(g, 43)), 1e-3);
}

TEST(States, CsvSnapshot) {
  auto g = build_spherical_grid(2, 2, 2, 1.0);
  std::ostringstream os;
  write_state_csv(os, states::gaussian(g, Vec3::Zero(), 1.0, +1));
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "kx,ky,kz,weight,re_c_plus,im_c_plus,re_c_minus,im_c_minus");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
}
