#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rotwave/model.hpp"

using namespace rotwave;

namespace {

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Roots of the monic cubic x^3 + c2 x^2 + c1 x + c0 by Durand-Kerner iteration.
std::array<cplx, 3> cubic_roots(double c2, double c1, double c0) {
  auto poly = [&](cplx x) { return ((x + c2) * x + c1) * x + c0; };
  std::array<cplx, 3> z{cplx(0.4, 0.9), std::pow(cplx(0.4, 0.9), 2), std::pow(cplx(0.4, 0.9), 3)};
  for (int it = 0; it < 500; ++it) {
    for (int i = 0; i < 3; ++i) {
      cplx den = 1.0;
      for (int j = 0; j < 3; ++j)
        if (j != i) den *= z[i] - z[j];
      z[i] -= poly(z[i]) / den;
    }
  }
  return z;
}

ModelParams base_params() { return ModelParams{1.0, 1.0, 2.0, 1.0, 0.0, BoundaryCondition::neumann}; }

}  // namespace

TEST(ModelParams, ValidationRejectsBadValues) {
  ModelParams p = base_params();
  EXPECT_NO_THROW(p.validate());
  p.alpha = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = base_params();
  p.mu = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  EXPECT_NO_THROW(p.validate(Validation::test_mode));
  p.beta = 0.0;
  EXPECT_NO_THROW(p.validate(Validation::test_mode));
  p.gamma = -1.0;
  EXPECT_THROW(p.validate(Validation::test_mode), InvalidArgument);
  p = base_params();
  p.omega = std::nan("");
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(ModelParams, ConfigRoundTrip) {
  ModelParams p{42.633161, 61.596148, 2.0, 1.0, 5.0, BoundaryCondition::dirichlet};
  const ModelParams q = ModelParams::from_config(p.to_config());
  EXPECT_EQ(q.mu, p.mu);
  EXPECT_EQ(q.beta, p.beta);
  EXPECT_EQ(q.alpha, p.alpha);
  EXPECT_EQ(q.gamma, p.gamma);
  EXPECT_EQ(q.omega, p.omega);
  EXPECT_EQ(q.bc, p.bc);
  EXPECT_THROW((void)ModelParams::from_config("zeta = 1"), InvalidArgument);
  EXPECT_THROW((void)ModelParams::from_config("mu = abc"), InvalidArgument);
  EXPECT_THROW((void)parse_bc("periodic"), InvalidArgument);
}

TEST(ConstantSolution, MatchesSubstitution) {
  EXPECT_DOUBLE_EQ(constant_solution(base_params()), 0.25);
  const ModelParams bp{42.6331, 61.60, 2.0, 1.0, 5.0, BoundaryCondition::neumann};
  EXPECT_NEAR(constant_solution(bp), 0.1874, 1e-4);
}

TEST(ConstantSolution, ApproachesOneAsBetaVanishes) {
  ModelParams p = base_params();
  p.mu = 10.0;
  double prev = 0.0;
  for (double beta : {1.0, 0.1, 0.01, 1e-3, 1e-6}) {
    p.beta = beta;
    const double t = constant_solution(p);
    EXPECT_GT(t, prev);
    EXPECT_LT(t, 1.0);
    prev = t;
  }
  EXPECT_NEAR(prev, 1.0, 1e-6);
}

TEST(Reaction, KnownValues) {
  const ModelParams p = base_params();
  const Vec3 zero = reaction({0.0, 0.0, 0.0}, p);
  for (double v : zero) EXPECT_EQ(v, 0.0);
  const Vec3 ones = reaction({1.0, 1.0, 1.0}, p);
  for (double v : ones) EXPECT_DOUBLE_EQ(v, -3.0);
  const double t = constant_solution(p);
  for (double v : reaction({t, t, t}, p)) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Reaction, CyclicEquivariance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 2.0);
  const ModelParams p{3.0, 1.7, 2.5, 0.4, 0.0, BoundaryCondition::neumann};
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 u{d(rng), d(rng), d(rng)};
    const Vec3 r = reaction(u, p);
    const Vec3 rs = reaction({u[1], u[2], u[0]}, p);
    EXPECT_NEAR(rs[0], r[1], 1e-13);
    EXPECT_NEAR(rs[1], r[2], 1e-13);
    EXPECT_NEAR(rs[2], r[0], 1e-13);
  }
}

TEST(Reaction, JacobianMatchesCentralDifferences) {
  const ModelParams p{3.0, 1.7, 2.5, 0.4, 0.0, BoundaryCondition::neumann};
  const Vec3 u{0.3, 0.6, 0.1};
  const Mat3 j = reaction_jacobian(u, p);
  const double h = 1e-6;
  for (int c = 0; c < 3; ++c) {
    Vec3 up = u, um = u;
    up[c] += h;
    um[c] -= h;
    const Vec3 fp = reaction(up, p), fm = reaction(um, p);
    for (int r = 0; r < 3; ++r) EXPECT_NEAR(j[r][c], (fp[r] - fm[r]) / (2.0 * h), 1e-8);
  }
}

TEST(CyclicEigs, PermutationMatrixGivesCubeRootsOfUnity) {
  const CyclicEigs e = cyclic_eigs({0.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(e.row_sum, 1.0);
  EXPECT_NEAR(e.m.real(), -0.5, 1e-15);
  EXPECT_NEAR(e.m.imag(), sqrt3 / 2.0, 1e-15);
  EXPECT_EQ(e.m_conj, std::conj(e.m));
  EXPECT_FALSE(e.degenerate_pair);
}

TEST(CyclicEigs, EqualOffDiagonalsCollapseThePair) {
  const CyclicEigs e = cyclic_eigs({1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(e.row_sum, 3.0);
  EXPECT_EQ(e.m, cplx(0.0));
  EXPECT_TRUE(e.degenerate_pair);
}

TEST(CyclicEigs, AgreesWithCharacteristicPolynomialRoots) {
  const CyclicMatrix a{5.0, 3.0, 2.0};
  const Mat3 m = a.dense();
  const double tr = m[0][0] + m[1][1] + m[2][2];
  const double minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] +
                        m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const auto roots = cubic_roots(-tr, minors, -det3(m));
  const CyclicEigs e = cyclic_eigs(a);
  EXPECT_NEAR(e.m.real(), 2.5, 1e-15);
  EXPECT_NEAR(e.m.imag(), sqrt3 / 2.0, 1e-15);
  for (cplx expected : {cplx(e.row_sum), e.m, e.m_conj}) {
    double best = 1e300;
    for (cplx r : roots) best = std::min(best, std::abs(r - expected));
    EXPECT_LT(best, 1e-10);
  }
}

TEST(CyclicEigs, EigenvaluesSumToTrace) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const CyclicMatrix a{d(rng), d(rng), d(rng)};
    const CyclicEigs e = cyclic_eigs(a);
    const cplx sum = e.row_sum + e.m + e.m_conj;
    EXPECT_NEAR(sum.real(), 3.0 * a.mu_diag, 1e-12 * std::max(1.0, std::abs(3.0 * a.mu_diag)));
    EXPECT_NEAR(sum.imag(), 0.0, 1e-12);
  }
}

TEST(SMatrix, InverseIsExact) {
  const CMat3 prod = matmul(s_matrix(), s_inverse());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(prod[i][j] - cplx(i == j ? 1.0 : 0.0)), 1e-14);
  const CMat3 s = s_matrix();
  for (int i = 0; i < 3; ++i) EXPECT_EQ(s[i][0], cplx(1.0));
}

TEST(SMatrix, DiagonalisesEveryCyclicMatrix) {
  auto defect = [](const CyclicMatrix& a) {
    const CyclicEigs e = cyclic_eigs(a);
    const CMat3 s = s_matrix();
    const CMat3 as = matmul(to_complex(a.dense()), s);
    const cplx d[3] = {e.row_sum, e.m, e.m_conj};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(as[i][j] - s[i][j] * d[j]));
    return worst;
  };
  EXPECT_LT(defect({5.0, 3.0, 2.0}), 1e-13);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const CyclicMatrix a{d(rng), d(rng), d(rng)};
    const double norm = std::abs(a.mu_diag) + std::abs(a.tau) + std::abs(a.delta);
    EXPECT_LT(defect(a), 1e-12 * norm);
  }
}

TEST(CouplingDet, KnownValues) {
  const ModelParams p = base_params();
  EXPECT_DOUBLE_EQ(coupling_det(0.0, p), 1.0);
  EXPECT_NEAR(coupling_det(-p.mu / (p.alpha + p.gamma), p), 0.0, 1e-14);
}

TEST(CouplingDet, GridScanMinimumMatchesClosedForm) {
  const ModelParams p = base_params();
  double best_x = 0.0, best_f = 1e300;
  for (int i = 1; i < 300000; ++i) {
    const double x = i * 1e-5;
    const double f = coupling_det(x, p);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  const double a3 = 8.0, g3 = 1.0;
  const double closed = (a3 - g3) * (a3 - g3) / ((a3 + g3) * (a3 + g3));
  EXPECT_NEAR(best_x, 4.0 / 9.0, 1e-5);
  EXPECT_NEAR(best_f, closed, 1e-9);
  EXPECT_NEAR(closed, 49.0 / 81.0, 1e-15);
}

TEST(CouplingDet, PositiveForPositiveArguments) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.05, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double gamma = d(rng);
    const ModelParams p{d(rng), 1.0, gamma + d(rng), gamma, 0.0, BoundaryCondition::neumann};
    for (double x = 0.01; x <= 100.0; x *= 1.1) EXPECT_GT(coupling_det(x, p), 0.0);
  }
}

TEST(InverseInteraction, CofactorDeterminantAndIdentity) {
  const ModelParams p = base_params();
  for (double beta : {0.1, 1.0, 10.0}) {
    const Mat3 m = interaction_dense(beta, p);
    EXPECT_NEAR(det3(m), coupling_det(beta, p), 1e-12 * std::max(1.0, std::abs(det3(m))));
    const Mat3 prod = matmul(m, inverse_interaction(beta, p));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(prod[i][j], i == j ? 1.0 : 0.0, 1e-13);
  }
}

TEST(InverseInteraction, ZeroBetaIsScaledIdentity) {
  ModelParams p = base_params();
  p.mu = 4.0;
  const Mat3 inv = inverse_interaction(0.0, p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(inv[i][j], i == j ? 0.25 : 0.0);
}

TEST(InverseInteraction, RejectsNegativeBetaAndDegenerateMatrix) {
  ModelParams p = base_params();
  EXPECT_THROW((void)inverse_interaction(-1.0, p), InvalidArgument);
  p.mu = 0.0;
  try {
    (void)inverse_interaction(0.0, p);
    FAIL() << "expected a degeneracy error";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::degenerate);
  }
}
