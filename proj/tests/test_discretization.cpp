#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rotwave/discretization.hpp"
#include "rotwave/disk_spectrum.hpp"

using namespace rotwave;

namespace {

constexpr auto neumann = BoundaryCondition::neumann;
constexpr auto dirichlet = BoundaryCondition::dirichlet;

std::vector<double> random_values(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(BuildGrid, ValidAndInvalidShapes) {
  const PolarGrid g = build_grid(64, 96);
  EXPECT_DOUBLE_EQ(g.radii[0], 1.0 / 128.0);
  EXPECT_DOUBLE_EQ(g.radii.back(), 1.0 - 1.0 / 128.0);
  EXPECT_EQ(g.third_turn(), 32);
  EXPECT_NO_THROW((void)build_grid(8, 12));
  EXPECT_THROW((void)build_grid(64, 100), InvalidArgument);
  EXPECT_THROW((void)build_grid(64, 15), InvalidArgument);
  EXPECT_THROW((void)build_grid(7, 12), InvalidArgument);
  EXPECT_THROW((void)build_grid(8, 6), InvalidArgument);
}

TEST(AngularTransform, ConstantFieldHasOnlyMeanMode) {
  const PolarGrid g = build_grid(8, 24);
  const std::vector<double> u(g.size(), 3.5);
  const ModeCoefficients c = angular_transform(g, u);
  for (int s = 0; s < g.n_theta; ++s)
    for (int j = 0; j < g.n_r; ++j) {
      const cplx v = c.values[static_cast<std::size_t>(s) * g.n_r + j];
      EXPECT_NEAR(std::abs(v - (s == 0 ? cplx(3.5) : cplx(0.0))), 0.0, 1e-13);
    }
}

TEST(AngularTransform, CosineTwoTheta) {
  const PolarGrid g = build_grid(8, 24);
  std::vector<double> u(g.size());
  for (int j = 0; j < g.n_r; ++j)
    for (int m = 0; m < g.n_theta; ++m) u[g.index(j, m)] = std::cos(2.0 * g.thetas[m]);
  const ModeCoefficients c = angular_transform(g, u);
  for (int k = -g.n_theta / 2; k < g.n_theta / 2; ++k)
    for (int j = 0; j < g.n_r; ++j) {
      const double expected = std::abs(k) == 2 ? 0.5 : 0.0;
      EXPECT_NEAR(std::abs(c.mode(k)[j] - cplx(expected)), 0.0, 1e-13);
    }
}

TEST(AngularTransform, RoundTripAndConjugateSymmetry) {
  const PolarGrid g = build_grid(16, 36);
  const auto u = random_values(g.size(), 1);
  const ModeCoefficients c = angular_transform(g, u);
  for (int k = 1; k < g.n_theta / 2; ++k)
    for (int j = 0; j < g.n_r; ++j) EXPECT_NEAR(std::abs(c.mode(-k)[j] - std::conj(c.mode(k)[j])), 0.0, 1e-14);
  const auto back = angular_inverse(g, c);
  for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(back[i], u[i], 1e-12);
}

TEST(RadialOperator, NeumannRowsAnnihilateConstants) {
  const PolarGrid g = build_grid(64, 12);
  const Tridiagonal op = radial_operator(0, neumann, g);
  const std::vector<double> ones(g.n_r, 1.0);
  for (double v : op.apply<double>(ones)) EXPECT_NEAR(v, 0.0, 1e-13 * g.n_r * g.n_r);
}

TEST(RadialOperator, NeumannFluxConservation) {
  const PolarGrid g = build_grid(48, 12);
  const Tridiagonal op = radial_operator(0, neumann, g);
  const auto u = random_values(g.n_r, 2);
  const auto lu = op.apply<double>(u);
  double s = 0.0, scale = 0.0;
  for (int j = 0; j < g.n_r; ++j) {
    s += lu[j] * g.radii[j] * g.h;
    scale += std::abs(lu[j]) * g.radii[j] * g.h;
  }
  EXPECT_LT(std::abs(s), 1e-12 * scale);
}

TEST(RadialOperator, RejectsUnresolvedWavenumber) {
  const PolarGrid g = build_grid(8, 12);
  EXPECT_NO_THROW((void)radial_operator(6, neumann, g));
  EXPECT_THROW((void)radial_operator(7, neumann, g), InvalidArgument);
}

TEST(ApplyLOmega, ConstantFieldVanishes) {
  const PolarGrid g = build_grid(32, 24);
  const std::vector<double> u(g.size(), 0.7);
  for (double v : apply_l_omega(g, u, 4.0, neumann)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(ApplyLOmega, LinearInOmega) {
  const PolarGrid g = build_grid(16, 24);
  const auto u = random_values(g.size(), 3);
  const auto a = apply_l_omega(g, u, 1.3, neumann);
  const auto b = apply_l_omega(g, u, 2.1, neumann);
  const auto ab = apply_l_omega(g, u, 3.4, neumann);
  const auto z = apply_l_omega(g, u, 0.0, neumann);
  double scale = 0.0;
  for (double v : ab) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(ab[i], a[i] + b[i] - z[i], 1e-12 * scale);
}

TEST(ApplyLOmega, EigenfunctionKTwo) {
  const DiskMode mode = disk_mode(2, 1, neumann);
  const double coarse = eigen_residual(mode, 1.5, build_grid(64, 24));
  const double fine = eigen_residual(mode, 1.5, build_grid(128, 24));
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine, 0.1);
}

TEST(ApplyLOmega, DirichletBoundaryDataEntersLinearly) {
  const PolarGrid g = build_grid(32, 12);
  // u = 1 with boundary value 1 is harmonic; the ghost closure reproduces that exactly.
  const std::vector<double> u(g.size(), 1.0), b(g.n_theta, 1.0);
  for (double v : apply_l_omega(g, u, 2.0, dirichlet, std::span<const double>(b))) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(HelmholtzSolve, ZeroRhsGivesZero) {
  const PolarGrid g = build_grid(32, 12);
  const std::vector<cplx> rhs(g.n_r, 0.0);
  for (auto bc : {neumann, dirichlet})
    for (cplx v : helmholtz_solve(0, 1.0, rhs, bc, 0.0, g)) EXPECT_EQ(v, cplx(0.0));
}

TEST(HelmholtzSolve, ResidualIsRoundoff) {
  const PolarGrid g = build_grid(64, 12);
  const auto re = random_values(g.n_r, 4), im = random_values(g.n_r, 5);
  std::vector<cplx> rhs(g.n_r);
  for (int j = 0; j < g.n_r; ++j) rhs[j] = cplx(re[j], im[j]);
  const Tridiagonal op = radial_operator(3, neumann, g);
  const cplx shift(0.5, 2.0);
  const auto u = helmholtz_solve(op, shift, rhs);
  auto lu = op.apply<cplx>(u);
  for (int j = 0; j < g.n_r; ++j) EXPECT_LT(std::abs(lu[j] + shift * u[j] - rhs[j]), 1e-12 * g.n_r * g.n_r);
}

TEST(HelmholtzSolve, ManufacturedBesselProfileConvergesAtSecondOrder) {
  auto error_at = [](int n_r) {
    const PolarGrid g = build_grid(n_r, 12);
    const DiskMode mode = disk_mode(1, 2, neumann);
    const double shift = 1.0;
    std::vector<cplx> rhs(n_r);
    for (int j = 0; j < n_r; ++j) rhs[j] = (mode.lambda + shift) * mode.profile(g.radii[j]);
    const auto u = helmholtz_solve(1, shift, rhs, neumann, 0.0, g);
    double err = 0.0;
    for (int j = 0; j < n_r; ++j) err = std::max(err, std::abs(u[j] - mode.profile(g.radii[j])));
    return err;
  };
  const double e1 = error_at(64), e2 = error_at(128);
  EXPECT_LT(e2, 1e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.6);
}

TEST(HelmholtzSolve, DirichletBoundaryValue) {
  const PolarGrid g = build_grid(64, 12);
  const std::vector<cplx> rhs(g.n_r, 0.0);
  // Solution of -Lap u = 0 with u(1) = 2 is the constant 2.
  for (cplx v : helmholtz_solve(0, 0.0, rhs, dirichlet, 2.0, g)) EXPECT_NEAR(std::abs(v - cplx(2.0)), 0.0, 1e-10);
}

TEST(HelmholtzSolve, SingularAndInvalidShifts) {
  const PolarGrid g = build_grid(16, 12);
  const std::vector<cplx> rhs(g.n_r, 1.0);
  try {
    (void)helmholtz_solve(0, 0.0, rhs, neumann, 0.0, g);
    FAIL() << "expected a singular system error";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::singular_system);
  }
  EXPECT_NO_THROW((void)helmholtz_solve(1, 0.0, rhs, neumann, 0.0, g));
  EXPECT_THROW((void)helmholtz_solve(1, -1.0, rhs, neumann, 0.0, g), InvalidArgument);
  const std::vector<cplx> short_rhs(3, 1.0);
  EXPECT_THROW((void)helmholtz_solve(1, 1.0, short_rhs, neumann, 0.0, g), InvalidArgument);
}

TEST(Rotation, ThirdTurnThreeTimesIsIdentity) {
  const PolarGrid g = build_grid(8, 36);
  const auto u = random_values(g.size(), 6);
  auto v = u;
  for (int i = 0; i < 3; ++i) v = rotate_indices(g, v, g.third_turn());
  EXPECT_EQ(v, u);
}

TEST(Rotation, SpectralRotationMatchesIndexShift) {
  const PolarGrid g = build_grid(8, 36);
  std::vector<double> u(g.size());
  for (int j = 0; j < g.n_r; ++j)
    for (int m = 0; m < g.n_theta; ++m)
      u[g.index(j, m)] = std::cos(g.thetas[m]) + 0.3 * std::sin(5.0 * g.thetas[m]) * g.radii[j];
  const auto a = rotate_by_angle(g, u, 2.0 * pi / 3.0);
  const auto b = rotate_indices(g, u, g.third_turn());
  for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-13);
}

TEST(SymmetryError, ConstantAndShiftedFields) {
  const PolarGrid g = build_grid(8, 24);
  TriField f(g, 0.4);
  EXPECT_EQ(symmetry_error(f), 0.0);
  for (int j = 0; j < g.n_r; ++j)
    for (int m = 0; m < g.n_theta; ++m) f.at(0, j, m) = std::cos(g.thetas[m]);
  EXPECT_GT(symmetry_error(f), 0.5);
  const TriField s = cyclic_shift_rotate(cyclic_shift_rotate(cyclic_shift_rotate(f)));
  for (int c = 0; c < 3; ++c) EXPECT_EQ(s.data[c], f.data[c]);
}

TEST(Inner, AreaWeightedIntegralOfOneIsPi) {
  const PolarGrid g = build_grid(40, 12);
  const TriField one(g, 1.0);
  EXPECT_NEAR(inner(one, one), 3.0 * pi, 1e-12);
}
