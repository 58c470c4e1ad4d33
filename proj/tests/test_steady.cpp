#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rotwave/steady.hpp"

using namespace rotwave;

namespace {

constexpr auto neumann = BoundaryCondition::neumann;
constexpr auto dirichlet = BoundaryCondition::dirichlet;

BifurcationPoint reference_point() { return bifurcation_point_mu(2, 1, 5.0, 2.0, 1.0); }

ModelParams dirichlet_params() { return ModelParams{1.0, 1.0, 2.0, 1.0, 1.0, dirichlet}; }

}  // namespace

TEST(RotatingResidual, ConstantStateIsExact) {
  const PolarGrid g = build_grid(24, 36);
  const ModelParams p = reference_point().params;
  EXPECT_LT(max_norm(rotating_residual(constant_field(g, p), p)), 1e-12);
}

TEST(RotatingResidual, KernelPerturbationIsSecondOrder) {
  const BifurcationPoint bp = reference_point();
  const PolarGrid g = build_grid(128, 36);
  const TriField c = constant_field(g, bp.params);
  const TriField h = kernel_direction(bp.mode, 1.0, 0.0, g).field;
  const double r3 = max_norm(rotating_residual(c + 1e-3 * h, bp.params));
  const double r4 = max_norm(rotating_residual(c + 1e-4 * h, bp.params));
  EXPECT_NEAR(r3 / r4, 100.0, 10.0);
  // The even part of the expansion has no discretisation-dependent linear term at all.
  auto even = [&](double e) {
    return max_norm(rotating_residual(c + e * h, bp.params) + rotating_residual(c + (-e) * h, bp.params));
  };
  EXPECT_NEAR(even(1e-3) / even(1e-4), 100.0, 0.5);
}

TEST(RotatingResidual, RandomFieldIsFiniteAndDirichletNeedsData) {
  const PolarGrid g = build_grid(12, 24);
  const TriField u = random_field(g, 0.0, 1.0, 3);
  EXPECT_TRUE(rotating_residual(u, reference_point().params).all_finite());
  EXPECT_THROW((void)rotating_residual(u, dirichlet_params()), InvalidArgument);
}

TEST(Jacobian, MatchesDirectionalDifferences) {
  const PolarGrid g = build_grid(16, 24);
  for (BoundaryCondition bc : {neumann, dirichlet}) {
    ModelParams p{3.0, 2.0, 2.0, 1.0, 1.7, bc};
    std::optional<DirichletData> data;
    if (bc == dirichlet) data = DirichletData::cosine(g, 0.2);
    const TriField u = random_field(g, 0.05, 0.95, 21);
    const TriField dir = random_field(g, -1.0, 1.0, 22);
    const double h = 1e-6;
    const TriField fd = (1.0 / (2.0 * h)) * (rotating_residual(u + h * dir, p, data) - rotating_residual(u + (-h) * dir, p, data));
    const TriField ja = jacobian_action(u, p, dir);
    EXPECT_LT(max_norm(fd - ja), 1e-6 * max_norm(ja));
  }
}

TEST(RotatingNewton, ReturnsIsolatedConstantState) {
  const PolarGrid g = build_grid(16, 24);
  const ModelParams p{1.0, 0.5, 2.0, 1.0, 1.0, neumann};
  const TriField guess = constant_field(g, p) + random_field(g, -1e-3, 1e-3, 4);
  const NewtonResult r = rotating_newton(p, guess);
  EXPECT_LT(r.residual_norm, newton_tolerance);
  EXPECT_LT(max_norm(r.field - constant_field(g, p)), 1e-9);
}

TEST(RotatingNewton, DegenerateAtBifurcationPoint) {
  const BifurcationPoint bp = reference_point();
  const PolarGrid g = build_grid(24, 36);
  const TriField c = constant_field(g, bp.params);
  const TriField guess = c + 1e-2 * kernel_direction(bp.mode, 1.0, 0.0, g).field;
  try {
    const NewtonResult r = rotating_newton(bp.params, guess);
    EXPECT_LT(max_norm(r.field - c), 1e-6);
  } catch (const SolverError& e) {
    EXPECT_TRUE(e.kind() == SolverError::Kind::singular_jacobian || e.kind() == SolverError::Kind::max_iterations);
  }
}

TEST(RotatingNewton, RecoversManufacturedSolution) {
  const PolarGrid g = build_grid(16, 24);
  const ModelParams p{2.0, 1.5, 2.0, 1.0, 2.0, neumann};
  TriField target = constant_field(g, p);
  for (int j = 0; j < g.n_r; ++j)
    for (int m = 0; m < g.n_theta; ++m) {
      const double r = g.radii[j], th = g.thetas[m];
      target.at(0, j, m) += 0.1 * r * r * std::cos(th);
      target.at(1, j, m) += 0.05 * std::cos(pi * r);
      target.at(2, j, m) += 0.08 * r * std::sin(2.0 * th);
    }
  NewtonOptions opt;
  opt.source = rotating_residual(target, p);
  const TriField guess = target + 0.1 * (target - constant_field(g, p)) + random_field(g, -1e-3, 1e-3, 8);
  const NewtonResult r = rotating_newton(p, guess, opt);
  EXPECT_LT(r.residual_norm, 1e-9);
  EXPECT_LT(max_norm(r.field - target), 1e-9);
  EXPECT_GT(r.iterations, 0);
}

TEST(RotatingNewton, ReportsIterationLimit) {
  const PolarGrid g = build_grid(8, 12);
  const ModelParams p{2.0, 1.5, 2.0, 1.0, 2.0, neumann};
  NewtonOptions opt;
  opt.max_iterations = 0;
  try {
    (void)rotating_newton(p, random_field(g, 0.1, 0.9, 1), opt);
    FAIL() << "expected max iterations";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::max_iterations);
  }
}

TEST(BranchContinue, OriginIsTheConstantState) {
  const BifurcationPoint bp = reference_point();
  const auto pts = branch_continue(bp, {0.0});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].params.beta, bp.params.beta);
  EXPECT_EQ(pts[0].params.mu, bp.params.mu);
  EXPECT_LT(max_norm(pts[0].field - constant_field(pts[0].field.grid, bp.params)), 1e-10);
}

TEST(BranchContinue, TangentToKernelAndAuthenticRotatingWaves) {
  const BifurcationPoint bp = reference_point();
  const std::vector<double> s_values{1e-2, 5e-3, 2.5e-3, -2.5e-3};
  BranchOptions opt;
  const auto pts = branch_continue(bp, s_values, opt);
  ASSERT_EQ(pts.size(), s_values.size());
  const PolarGrid g = build_grid(opt.n_r, opt.n_theta);
  const TriField h0 = kernel_direction(bp.mode, 1.0, 0.0, g).field;
  std::vector<double> err;
  for (const auto& pt : pts) {
    EXPECT_LT(pt.residual_norm, 1e-9);
    EXPECT_LT(pt.symmetry_error, 1e-8);
    EXPECT_GT(pt.k_energy_fraction, 0.5);
    EXPECT_TRUE(range_check(pt.field).pass);
    TriField slope = pt.field - constant_field(g, pt.params);
    slope *= 1.0 / pt.s;
    err.push_back(norm(slope - h0));
  }
  EXPECT_NEAR(err[0] / err[1], 2.0, 0.3);
  EXPECT_NEAR(err[1] / err[2], 2.0, 0.3);
  EXPECT_LT(err[2], 0.1 * norm(h0));
  EXPECT_EQ(pts[3].s, -2.5e-3);
}

TEST(BranchContinue, FreeRotationStrategy) {
  const BifurcationPoint bp = bifurcation_point_omega(2, 1, 30.0, 2.0, 1.0);
  BranchOptions opt;
  opt.strategy = BranchStrategy::fix_mu_free_beta_omega;
  const auto pts = branch_continue(bp, {5e-3}, opt);
  EXPECT_EQ(pts[0].params.mu, 30.0);
  EXPECT_LT(pts[0].residual_norm, 1e-9);
  EXPECT_NE(pts[0].params.omega, bp.params.omega);
}

TEST(BranchContinue, RejectsBadInputs) {
  BifurcationPoint bp = reference_point();
  const double t = constant_solution(bp.params);
  EXPECT_THROW((void)branch_continue(bp, {0.3 * t}), InvalidArgument);
  bp.params.beta *= 1.01;
  EXPECT_THROW((void)branch_continue(bp, {1e-3}), InvalidArgument);
  EXPECT_THROW((void)parse_strategy("fix_nothing"), InvalidArgument);
}

TEST(DirichletData, ValidationAndRotation) {
  const PolarGrid g = build_grid(8, 24);
  EXPECT_THROW((void)DirichletData::uniform(g, 0.0), InvalidArgument);
  EXPECT_THROW((void)DirichletData::uniform(g, 1.0), InvalidArgument);
  EXPECT_THROW((void)DirichletData::from_trace(std::vector<double>(20, 0.1)), InvalidArgument);
  const DirichletData d = DirichletData::cosine(g, 0.2);
  for (int m = 0; m < g.n_theta; ++m) {
    EXPECT_EQ(d.phi[1][m], d.phi[0][(m + 8) % 24]);
    EXPECT_EQ(d.phi[2][m], d.phi[1][(m + 8) % 24]);
  }
  EXPECT_THROW(d.check_grid(build_grid(8, 12)), InvalidArgument);
}

TEST(DirichletMap, PositiveFromZeroAndBoundedByTwo) {
  const PolarGrid g = build_grid(24, 24);
  const ModelParams p = dirichlet_params();
  const DirichletData data = DirichletData::cosine(g, 0.2);
  const TriField z = dirichlet_map_phi(TriField(g, 0.0), p, data);
  for (const auto& c : z.data)
    for (double v : c) EXPECT_GT(v, 0.0);
  const TriField top = dirichlet_map_phi(TriField(g, 2.0), p, data);
  for (const auto& c : top.data)
    for (double v : c) {
      EXPECT_LE(v, 2.0);
      EXPECT_GT(v, 0.0);
    }
  EXPECT_THROW((void)dirichlet_map_phi(TriField(g, 2.5), p, data), InvalidArgument);
}

TEST(DirichletMap, InvariantOnRandomInputs) {
  const PolarGrid g = build_grid(16, 24);
  const ModelParams p = dirichlet_params();
  const DirichletData data = DirichletData::cosine(g, 0.2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TriField z = dirichlet_map_phi(random_field(g, 0.0, 2.0, seed), p, data);
    for (const auto& c : z.data)
      for (double v : c) {
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 2.0);
      }
  }
}

TEST(DirichletSolve, ConvergesToSymmetricPositiveSolution) {
  const ModelParams p = dirichlet_params();
  const DirichletOptions opt;
  const PolarGrid g = build_grid(opt.n_r, opt.n_theta);
  const DirichletData data = DirichletData::cosine(g, 0.2);
  const DirichletResult r = dirichlet_solve(p, data, opt);
  EXPECT_LT(r.residual_norm, 1e-8);
  EXPECT_LT(max_norm(rotating_residual(r.field, p, data)), 1e-8);
  const RangeReport rr = range_check(r.field);
  for (int c = 0; c < 3; ++c) {
    EXPECT_GT(rr.min[c], 0.0);
    EXPECT_LT(rr.max[c], 1.0);
  }
  EXPECT_LT(symmetry_error(r.field), 1e-8);
  EXPECT_LT(max_norm(dirichlet_map_phi(r.field, p, data) - r.field), 1e-9);
  const auto trace = boundary_trace(r.field, data);
  for (int c = 0; c < 3; ++c)
    for (int m = 0; m < g.n_theta; ++m) EXPECT_NEAR(trace[c][m], data.phi[c][m], 1e-14);

  ModelParams strong = p;
  strong.beta *= 2.0;
  const DirichletResult rs = dirichlet_solve(strong, data, opt);
  const RangeReport rrs = range_check(rs.field);
  for (int c = 0; c < 3; ++c)
    RecordProperty("interior_max_u" + std::to_string(c + 1) + (rrs.max[c] < rr.max[c] ? "_lowered" : "_not_lowered"),
                   std::to_string(rrs.max[c]));
}

TEST(DirichletSolve, RejectsNeumannParametersAndBadDamping) {
  const DirichletOptions opt;
  const PolarGrid g = build_grid(opt.n_r, opt.n_theta);
  const DirichletData data = DirichletData::cosine(g, 0.2);
  ModelParams p = dirichlet_params();
  DirichletOptions bad = opt;
  bad.damping = 0.0;
  EXPECT_THROW((void)dirichlet_solve(p, data, bad), InvalidArgument);
  p.bc = neumann;
  EXPECT_THROW((void)dirichlet_solve(p, data, opt), InvalidArgument);
}
