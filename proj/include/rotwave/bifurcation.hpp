#pragma once

// Closed-form bifurcation loci from the constant state, kernel directions and
// the linear growth rates of perturbations of the constant state.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "rotwave/discretization.hpp"
#include "rotwave/disk_spectrum.hpp"
#include "rotwave/error.hpp"
#include "rotwave/model.hpp"

namespace rotwave {

inline constexpr double consistency_tolerance = 1e-10;

/// True iff k = 3m - 1 for some m >= 1. Both forms of the condition are evaluated and must agree.
[[nodiscard]] inline bool admissible_wavenumber(int k) {
  if (k < 1) throw InvalidArgument("admissible_wavenumber: k must be positive");
  const bool three_m_minus_one = k % 3 == 2;
  const bool even_ratio = (2 * k + 2) % 6 == 0;  // (2k+2)/3 is an even integer
  if (three_m_minus_one != even_ratio)
    throw Error("admissible_wavenumber: the two admissibility conditions disagree");
  return three_m_minus_one;
}

/// Complex eigenvalue delta_beta = t * m of the linearised interaction matrix at the constant state.
[[nodiscard]] inline cplx delta_beta(const ModelParams& p) {
  return constant_solution(p) * cyclic_eigs(interaction_matrix(p)).m;
}

[[nodiscard]] inline double instability_threshold(double mu, double alpha, double gamma) {
  return 2.0 * mu / (alpha + gamma);
}

/// Angular speed of the neutral pattern of wavenumber k: Im(delta_beta) / k.
[[nodiscard]] inline double predicted_rotation_speed(const ModelParams& p, int k) {
  if (k < 1) throw InvalidArgument("predicted_rotation_speed: k must be positive");
  return sqrt3 / 2.0 * p.beta * (p.alpha - p.gamma) * constant_solution(p) / k;
}

struct BetaMu {
  double beta = 0.0;
  double mu = 0.0;
};

struct BetaOmega {
  double beta = 0.0;
  double omega = 0.0;
};

namespace detail {

inline void check_locus_inputs(double lambda_n, int k, double alpha, double gamma) {
  if (!(lambda_n > 0.0)) throw InvalidArgument("locus: lambda_n must be positive");
  if (!admissible_wavenumber(k)) throw InvalidArgument("locus: wavenumber " + std::to_string(k) + " is not of the form 3m-1");
  if (!(alpha > gamma && gamma > 0.0)) throw InvalidArgument("locus: alpha must exceed gamma > 0");
}

inline double locus_beta(double lambda_n, double mu, double alpha, double gamma) {
  return 2.0 * mu * (mu + lambda_n) / ((alpha + gamma) * (mu - 2.0 * lambda_n));
}

}  // namespace detail

/// Bifurcation point in the (beta, mu) plane for fixed omega.
[[nodiscard]] inline BetaMu locus_beta_mu(double lambda_n, int k, double omega, double alpha, double gamma) {
  detail::check_locus_inputs(lambda_n, k, alpha, gamma);
  const double mu = sqrt3 * k * omega * (alpha + gamma) / (alpha - gamma) - lambda_n;
  if (!(mu > 2.0 * lambda_n))
    throw SolverError(SolverError::Kind::locus_empty,
                      "locus empty: mu = " + std::to_string(mu) + " does not exceed 2 lambda_n");
  return {detail::locus_beta(lambda_n, mu, alpha, gamma), mu};
}

/// Bifurcation point in the (beta, omega) plane for fixed mu.
[[nodiscard]] inline BetaOmega locus_beta_omega(double lambda_n, int k, double mu, double alpha, double gamma) {
  detail::check_locus_inputs(lambda_n, k, alpha, gamma);
  if (!(mu > 2.0 * lambda_n)) throw SolverError(SolverError::Kind::locus_empty, "locus requires mu > 2 lambda_n");
  const double omega = sqrt3 / (3.0 * k) * (alpha - gamma) / (alpha + gamma) * (mu + lambda_n);
  return {detail::locus_beta(lambda_n, mu, alpha, gamma), omega};
}

enum class FreeParameter { mu, omega };

struct BifurcationPoint {
  DiskMode mode;
  ModelParams params;  ///< full parameter set at the point (beta = beta0)
  FreeParameter second = FreeParameter::mu;

  [[nodiscard]] double beta0() const noexcept { return params.beta; }
  [[nodiscard]] double second_value() const noexcept {
    return second == FreeParameter::mu ? params.mu : params.omega;
  }
};

/// Point of the (beta, mu) locus for Neumann mode (k, n) at fixed omega.
[[nodiscard]] inline BifurcationPoint bifurcation_point_mu(int k, int n, double omega, double alpha, double gamma) {
  const DiskMode mode = disk_mode(k, n, BoundaryCondition::neumann);
  const auto bm = locus_beta_mu(mode.lambda, k, omega, alpha, gamma);
  return {mode, ModelParams{bm.mu, bm.beta, alpha, gamma, omega, BoundaryCondition::neumann}, FreeParameter::mu};
}

/// Point of the (beta, omega) locus for Neumann mode (k, n) at fixed mu.
[[nodiscard]] inline BifurcationPoint bifurcation_point_omega(int k, int n, double mu, double alpha, double gamma) {
  const DiskMode mode = disk_mode(k, n, BoundaryCondition::neumann);
  const auto bo = locus_beta_omega(mode.lambda, k, mu, alpha, gamma);
  return {mode, ModelParams{mu, bo.beta, alpha, gamma, bo.omega, BoundaryCondition::neumann}, FreeParameter::omega};
}

struct ConsistencyReport {
  double eigenvalue_residual = 0.0;  ///< relative defect of Re condition vs lambda_n
  double frequency_residual = 0.0;   ///< relative defect of Im condition vs k omega (absolute if k omega = 0)
  bool pass = false;
};

/// Checks (beta(alpha+gamma) - 2mu)/2 t = lambda_n and (sqrt3/2) beta (alpha-gamma) t = k omega.
[[nodiscard]] inline ConsistencyReport check_consistency(const BifurcationPoint& bp) {
  const ModelParams& p = bp.params;
  const double t = constant_solution(p);
  const double re = (p.beta * (p.alpha + p.gamma) - 2.0 * p.mu) / 2.0 * t;
  const double im = sqrt3 / 2.0 * p.beta * (p.alpha - p.gamma) * t;
  const double kw = bp.mode.k * p.omega;
  ConsistencyReport r;
  r.eigenvalue_residual = std::abs(re - bp.mode.lambda) / bp.mode.lambda;
  r.frequency_residual = kw != 0.0 ? std::abs(im - kw) / std::abs(kw) : std::abs(im);
  r.pass = r.eigenvalue_residual < consistency_tolerance && r.frequency_residual < consistency_tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Kernel directions

struct KernelDirection {
  DiskMode mode;
  double a = 1.0;
  double b = 0.0;
  TriField field;
};

/// a f (-cos + sqrt3 sin, -cos - sqrt3 sin, 2 cos) + b k f (sin + sqrt3 cos, sin - sqrt3 cos, -2 sin), any k.
[[nodiscard]] inline TriField kernel_field(const DiskMode& mode, double a, double b, const PolarGrid& g) {
  TriField h(g);
  const double k = mode.k;
  for (int j = 0; j < g.n_r; ++j) {
    const double f = mode.profile(g.radii[j]);
    for (int m = 0; m < g.n_theta; ++m) {
      const double c = std::cos(k * g.thetas[m]);
      const double s = std::sin(k * g.thetas[m]);
      h.at(0, j, m) = f * (a * (-c + sqrt3 * s) + b * k * (s + sqrt3 * c));
      h.at(1, j, m) = f * (a * (-c - sqrt3 * s) + b * k * (s - sqrt3 * c));
      h.at(2, j, m) = f * (a * 2.0 * c - b * k * 2.0 * s);
    }
  }
  return h;
}

[[nodiscard]] inline KernelDirection kernel_direction(const DiskMode& mode, double a, double b, const PolarGrid& g) {
  if (mode.bc != BoundaryCondition::neumann) throw InvalidArgument("kernel_direction: mode must be Neumann");
  if (mode.k < 1 || !admissible_wavenumber(mode.k))
    throw InvalidArgument("kernel_direction: wavenumber " + std::to_string(mode.k) +
                          " leaves the symmetric space (need k = 3m - 1)");
  if (mode.k > g.k_resolved()) throw InvalidArgument("kernel_direction: wavenumber not resolved by the grid");
  return {mode, a, b, kernel_field(mode, a, b, g)};
}

// ---------------------------------------------------------------------------
// Linear stability of the constant state (lab frame)

struct GrowthRate {
  cplx rate;            ///< temporal growth rate -(lambda + d)
  double lambda = 0.0;  ///< spatial eigenvalue (0 for the constant mode)
  int k = 0;
  int n = 0;            ///< 0 for the constant mode
  int branch = 0;       ///< 0: d = mu, 1: d = delta_beta, 2: d = conj(delta_beta)
};

/// Growth rates of every (spatial mode) x (interaction eigenvalue) pair, sorted by descending real part.
[[nodiscard]] inline std::vector<GrowthRate> constant_state_spectrum(const ModelParams& p,
                                                                     const std::vector<DiskMode>& modes,
                                                                     bool include_constant_mode = true) {
  const cplx delta = delta_beta(p);
  const cplx d[3] = {cplx(p.mu), delta, std::conj(delta)};
  std::vector<GrowthRate> out;
  auto add = [&](double lambda, int k, int n) {
    for (int b = 0; b < 3; ++b) out.push_back(GrowthRate{-(lambda + d[b]), lambda, k, n, b});
  };
  if (include_constant_mode && p.bc == BoundaryCondition::neumann) add(0.0, 0, 0);
  for (const auto& m : modes) add(m.lambda, m.k, m.n);
  std::stable_sort(out.begin(), out.end(),
                   [](const GrowthRate& x, const GrowthRate& y) { return x.rate.real() > y.rate.real(); });
  return out;
}

}  // namespace rotwave
