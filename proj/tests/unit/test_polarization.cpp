#include "photon/polarization.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

using namespace photon;

namespace {

double max_abs(const CMat3& m) { return m.cwiseAbs().maxCoeff(); }

// Independent route: exponentiate the generators numerically.
CMat3 expm(const CMat3& a) { return a.exp(); }

CMat3 D_oracle(double theta, double phi, double chi) {
  const auto s = spin1_generators();
  const Vec3 k = k_hat({theta, phi});
  const CMat3 sk = k.x() * s[0] + k.y() * s[1] + k.z() * s[2];
  return expm(-I * chi * sk) * expm(-I * phi * s[2]) * expm(-I * theta * s[1]);
}

const std::vector<std::array<double, 3>> angles{
    {0.3, 1.1, 0.7}, {1.2, -2.0, 0.1}, {2.9, 0.4, -1.3}, {pi / 2, 0.0, 0.0}, {0.05, 3.0, 2.5}};

}  // namespace

TEST(Spin1, CommutationRelations) {
  const auto s = spin1_generators();
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    EXPECT_LT(max_abs(s[i] * s[j] - s[j] * s[i] - I * s[k]), 1e-15);
  }
}

TEST(Spin1, SzEigenvalues) {
  Eigen::SelfAdjointEigenSolver<CMat3> es(spin1_generators()[2]);
  EXPECT_NEAR(es.eigenvalues()[0], -1.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()[1], 0.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()[2], 1.0, 1e-14);
}

TEST(Spin1, QuarterTurnAboutZ) {
  const CVec3 y = expm(-I * (pi / 2) * spin1_generators()[2]) * Vec3::UnitX().cast<cdouble>();
  EXPECT_LT((y - Vec3::UnitY().cast<cdouble>()).norm(), 1e-14);
}

TEST(RotationD, IdentityAtZero) {
  EXPECT_LT(max_abs(rotation_D(0, 0, 0).matrix - CMat3::Identity()), 1e-15);
}

TEST(RotationD, MatchesMatrixExponentials) {
  for (const auto& a : angles)
    EXPECT_LT(max_abs(rotation_D(a[0], a[1], a[2]).matrix - D_oracle(a[0], a[1], a[2])), 1e-14);
  const CVec3 z_image = rotation_D(pi / 2, 0.0, 0.0).matrix * Vec3::UnitZ().cast<cdouble>();
  EXPECT_LT((z_image - Vec3::UnitX().cast<cdouble>()).norm(), 1e-15);
}

TEST(RotationD, UnitaryWithUnitDeterminant) {
  for (const auto& a : angles) {
    const CMat3 d = rotation_D(a[0], a[1], a[2]).matrix;
    EXPECT_LT(max_abs(d.adjoint() * d - CMat3::Identity()), 1e-14);
    EXPECT_LT(std::abs(d.determinant() - 1.0), 1e-14);
  }
}

TEST(RotationD, ColumnsAreTheRotatedFrame) {
  for (const auto& a : angles) {
    const Direction dir{a[0], a[1]};
    const CMat3 d = rotation_D(a[0], a[1], a[2]).matrix;
    const Vec3 th = theta_hat(dir), ph = phi_hat(dir);
    const Vec3 e1 = th * std::cos(a[2]) + ph * std::sin(a[2]);
    const Vec3 e2 = -th * std::sin(a[2]) + ph * std::cos(a[2]);
    EXPECT_LT((d.col(0) - e1.cast<cdouble>()).norm(), 1e-14);
    EXPECT_LT((d.col(1) - e2.cast<cdouble>()).norm(), 1e-14);
    EXPECT_LT((d.col(2) - k_hat(dir).cast<cdouble>()).norm(), 1e-14);
  }
}

TEST(Triad, EquatorialDirection) {
  const auto t = polarization_vectors({pi / 2, 0.0}, 0.0);
  EXPECT_LT((theta_hat({pi / 2, 0.0}) - Vec3(0, 0, -1)).norm(), 1e-15);
  EXPECT_LT((phi_hat({pi / 2, 0.0}) - Vec3(0, 1, 0)).norm(), 1e-15);
  const CVec3 expected = (Vec3(0, 0, -1).cast<cdouble>() + I * Vec3(0, 1, 0).cast<cdouble>()) / std::sqrt(2.0);
  EXPECT_LT((t.e_plus - expected).norm(), 1e-15);
}

TEST(Triad, Orthonormality) {
  for (const auto& a : angles) {
    const auto t = polarization_vectors({a[0], a[1]}, a[2]);
    for (int s : {+1, -1}) {
      for (int s2 : {+1, -1})
        EXPECT_LT(std::abs(t.e(s).dot(t.e(s2)) - (s == s2 ? 1.0 : 0.0)), 1e-14);  // dot conjugates lhs
      EXPECT_LT(std::abs(t.e_long.cast<cdouble>().dot(t.e(s))), 1e-14);
    }
    EXPECT_EQ(t.e_long, k_hat({a[0], a[1]}));
  }
}

TEST(Triad, ConjugateRelation) {
  for (const auto& a : angles) {
    const auto t = polarization_vectors({a[0], a[1]}, a[2]);
    EXPECT_LT((t.e_minus - t.e_plus.conjugate()).norm(), 1e-15);
  }
}

TEST(Triad, ParaxialLimitWithMinusPhi) {
  for (double phi : {0.0, 0.8, -2.2}) {
    const auto t = polarization_vectors({1e-6, phi}, -phi);
    for (int s : {+1, -1}) {
      const CVec3 expected = (Vec3::UnitX().cast<cdouble>() + (I * double(s)) * Vec3::UnitY().cast<cdouble>()) /
                             std::sqrt(2.0);
      EXPECT_LT((t.e(s) - expected).norm(), 1e-5);
    }
  }
}

TEST(Triad, PoleRaisesWithRemedy) {
  for (double th : {0.0, pi}) {
    try {
      polarization_vectors({th, 0.3}, 0.0);
      FAIL() << "no error at theta = " << th;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::pole_singularity);
      EXPECT_NE(std::string(e.what()).find("chi = -phi"), std::string::npos);
    }
  }
}

TEST(Triad, ChiShiftCovariance) {
  const double c1 = 0.4, c2 = -1.7;
  for (const auto& a : angles) {
    const auto t12 = polarization_vectors({a[0], a[1]}, c1 + c2);
    const auto t1 = polarization_vectors({a[0], a[1]}, c1);
    for (int s : {+1, -1}) EXPECT_LT((t12.e(s) - std::exp(-I * (s * c2)) * t1.e(s)).norm(), 1e-14);
  }
}

TEST(Triad, Completeness) {
  for (const auto& a : angles) {
    const auto t = polarization_vectors({a[0], a[1]}, a[2]);
    CMat3 sum = t.e_long.cast<cdouble>() * t.e_long.cast<cdouble>().transpose();
    for (int s : {+1, -1}) sum += t.e(s) * t.e(s).adjoint();
    EXPECT_LT(max_abs(sum - CMat3::Identity()), 1e-14);
  }
}

TEST(Triad, DFrameReproducesHelicityVectors) {
  // D(chi) applied to (x + i sigma y)/sqrt 2 gives e_sigma^(chi).
  for (const auto& a : angles) {
    const CMat3 d = rotation_D(a[0], a[1], a[2]).matrix;
    const auto t = polarization_vectors({a[0], a[1]}, a[2]);
    for (int s : {+1, -1}) {
      const CVec3 base = (Vec3::UnitX().cast<cdouble>() + (I * double(s)) * Vec3::UnitY().cast<cdouble>()) /
                         std::sqrt(2.0);
      EXPECT_LT((d * base - t.e(s)).norm(), 1e-14);
    }
  }
}

TEST(LinearPolarization, ChiZeroGivesFrame) {
  const Direction d{0.8, 2.1};
  const auto [r1, r2] = linear_polarization_vectors(d, 0.0);
  EXPECT_LT((r1 - theta_hat(d)).norm(), 1e-15);
  EXPECT_LT((r2 - phi_hat(d)).norm(), 1e-15);
}

TEST(LinearPolarization, QuarterTurn) {
  const Direction d{1.3, -0.6};
  EXPECT_LT((linear_polarization_vectors(d, pi / 2).first - phi_hat(d)).norm(), 1e-15);
}

TEST(LinearPolarization, ClosedFormAndOrthonormality) {
  for (const auto& a : angles) {
    const Direction d{a[0], a[1]};
    // Direct complex-vector composition as oracle.
    const auto t = polarization_vectors(d, a[2]);
    const CVec3 c1 = (t.e_plus + t.e_minus) / std::sqrt(2.0);
    const CVec3 c2 = (t.e_plus - t.e_minus) / (I * std::sqrt(2.0));
    EXPECT_LT(c1.imag().norm(), 1e-14);
    EXPECT_LT(c2.imag().norm(), 1e-14);
    const auto [r1, r2] = linear_polarization_vectors(d, a[2]);
    EXPECT_LT((r1 - (theta_hat(d) * std::cos(a[2]) + phi_hat(d) * std::sin(a[2]))).norm(), 1e-14);
    EXPECT_LT((r2 - (-theta_hat(d) * std::sin(a[2]) + phi_hat(d) * std::cos(a[2]))).norm(), 1e-14);
    EXPECT_LT(std::abs(r1.dot(r2)), 1e-14);
    EXPECT_LT(std::abs(r1.norm() - 1.0), 1e-14);
    EXPECT_LT(std::abs(r2.norm() - 1.0), 1e-14);
  }
}

TEST(ChiSpec, Phases) {
  const KNode n = make_node(Vec3(0.3, 0.4, 1.2), 1.0);
  EXPECT_EQ(ChiSpec::zero().phase(n, 0, +1), cdouble(1.0));
  EXPECT_LT(std::abs(ChiSpec::minus_phi().phase(n, 0, +1) - std::exp(-I * n.phi)), 1e-15);
  const auto shifted = ChiSpec::zero().with_time_shift(0.7);
  for (int s : {+1, -1}) EXPECT_LT(std::abs(shifted.phase(n, 0, s) - std::exp(-I * n.omega() * 0.7)), 1e-15);
  const auto table = ChiSpec::from_table({0.25});
  EXPECT_FALSE(table.differentiable());
  EXPECT_LT(std::abs(table.phase(n, 0, -1) - std::exp(-I * 0.25)), 1e-15);
  EXPECT_THROW(table.phase(n, 1, +1), Error);
  EXPECT_THROW(parse_chi("sideways"), Error);
}
