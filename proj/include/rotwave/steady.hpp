#pragma once

// Rotating-frame steady states: residual and Jacobian of L_omega u - R(u),
// damped Newton, bordered continuation off a bifurcation point, and the
// Dirichlet fixed-point construction through the shifted map Phi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "rotwave/bifurcation.hpp"
#include "rotwave/dirichlet_data.hpp"
#include "rotwave/discretization.hpp"
#include "rotwave/dynamics.hpp"
#include "rotwave/error.hpp"
#include "rotwave/model.hpp"

namespace rotwave {

inline constexpr double newton_tolerance = 1e-9;

[[nodiscard]] inline double max_norm(const TriField& f) { return f.max_abs(); }

/// d u / d theta, spectrally, with the Nyquist slot dropped.
[[nodiscard]] inline std::vector<double> angular_derivative(const PolarGrid& g, std::span<const double> u) {
  ModeCoefficients c = angular_transform(g, u);
  for (int s = 0; s < g.n_theta; ++s) {
    const cplx f(0.0, drift_wavenumber(s, g.n_theta));
    for (auto& v : c.mode(ModeCoefficients::wavenumber_of_slot(s, g.n_theta))) v *= f;
  }
  return angular_inverse(g, c);
}

/// L_omega u_i - reaction_i(u) (- source_i). Dirichlet requires boundary data.
[[nodiscard]] inline TriField rotating_residual(const TriField& u, const ModelParams& p,
                                                const std::optional<DirichletData>& data = std::nullopt,
                                                const TriField* source = nullptr) {
  const PolarGrid& g = u.grid;
  if (p.bc == BoundaryCondition::dirichlet) {
    if (!data) throw InvalidArgument("rotating_residual: Dirichlet boundary requires boundary data");
    data->check_grid(g);
  }
  TriField out(g);
  for (int c = 0; c < 3; ++c) {
    std::optional<std::span<const double>> bdry;
    if (p.bc == BoundaryCondition::dirichlet) bdry = std::span<const double>(data->phi[c]);
    out.data[c] = apply_l_omega(g, u.data[c], p.omega, p.bc, bdry);
  }
  for (int i = 0; i < g.size(); ++i) {
    const Vec3 r = reaction({u.data[0][i], u.data[1][i], u.data[2][i]}, p);
    for (int c = 0; c < 3; ++c) out.data[c][i] -= r[c];
  }
  if (source) out -= *source;
  return out;
}

// ---------------------------------------------------------------------------
// Jacobian

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

namespace detail {

/// First column of the circulant matrix realising multiplication by `mult(slot)` in Fourier space.
template <class Mult>
std::vector<double> circulant_kernel(int n, Mult mult) {
  std::vector<double> kern(n);
  for (int d = 0; d < n; ++d) {
    cplx s = 0.0;
    for (int slot = 0; slot < n; ++slot) {
      const int k = ModeCoefficients::wavenumber_of_slot(slot, n);
      s += mult(slot) * std::polar(1.0, 2.0 * pi * k * d / n);
    }
    kern[d] = s.real() / n;
  }
  return kern;
}

inline int unknown(int node, int c) { return 3 * node + c; }

}  // namespace detail

/// Triplets of the scalar operator L_omega (without boundary data) in nodal form, unknowns interleaved by component.
inline void append_l_omega(std::vector<Triplet>& trip, const PolarGrid& g, double omega, BoundaryCondition bc) {
  const int n = g.n_theta;
  const auto k2 = detail::circulant_kernel(n, [n](int s) {
    const double k = ModeCoefficients::wavenumber_of_slot(s, n);
    return cplx(k * k);
  });
  const auto k1 = detail::circulant_kernel(n, [n](int s) { return cplx(0.0, drift_wavenumber(s, n)); });
  const Tridiagonal radial = radial_operator(0, bc, g);
  for (int j = 0; j < g.n_r; ++j) {
    const double inv_r2 = 1.0 / (g.radii[j] * g.radii[j]);
    for (int m = 0; m < n; ++m) {
      const int row = g.index(j, m);
      for (int c = 0; c < 3; ++c) {
        trip.emplace_back(detail::unknown(row, c), detail::unknown(row, c), radial.diag[j]);
        if (j > 0) trip.emplace_back(detail::unknown(row, c), detail::unknown(g.index(j - 1, m), c), radial.lower[j]);
        if (j + 1 < g.n_r)
          trip.emplace_back(detail::unknown(row, c), detail::unknown(g.index(j + 1, m), c), radial.upper[j]);
        for (int mp = 0; mp < n; ++mp) {
          const int d = ((m - mp) % n + n) % n;
          const double v = k2[d] * inv_r2 + omega * k1[d];
          if (v != 0.0) trip.emplace_back(detail::unknown(row, c), detail::unknown(g.index(j, mp), c), v);
        }
      }
    }
  }
}

inline void append_reaction_jacobian(std::vector<Triplet>& trip, const TriField& u, const ModelParams& p) {
  for (int i = 0; i < u.grid.size(); ++i) {
    const Mat3 jr = reaction_jacobian({u.data[0][i], u.data[1][i], u.data[2][i]}, p);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trip.emplace_back(detail::unknown(i, a), detail::unknown(i, b), -jr[a][b]);
  }
}

/// d(rotating_residual)/du at u, unknowns ordered 3*node + component.
[[nodiscard]] inline SparseMatrix assemble_jacobian(const TriField& u, const ModelParams& p) {
  std::vector<Triplet> trip;
  append_l_omega(trip, u.grid, p.omega, p.bc);
  append_reaction_jacobian(trip, u, p);
  const int n = 3 * u.grid.size();
  SparseMatrix j(n, n);
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

[[nodiscard]] inline Eigen::VectorXd pack(const TriField& f) {
  const int n = f.grid.size();
  Eigen::VectorXd x(3 * n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) x[detail::unknown(i, c)] = f.data[c][i];
  return x;
}

[[nodiscard]] inline TriField unpack(const PolarGrid& g, const Eigen::VectorXd& x) {
  TriField f(g);
  for (int i = 0; i < g.size(); ++i)
    for (int c = 0; c < 3; ++c) f.data[c][i] = x[detail::unknown(i, c)];
  return f;
}

/// Action of the assembled Jacobian on a direction field.
[[nodiscard]] inline TriField jacobian_action(const TriField& u, const ModelParams& p, const TriField& dir) {
  return unpack(u.grid, assemble_jacobian(u, p) * pack(dir));
}

namespace detail {

inline Eigen::VectorXd sparse_solve(const SparseMatrix& a, const Eigen::VectorXd& b, const char* who) {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw SolverError(SolverError::Kind::singular_jacobian, std::string(who) + ": singular Jacobian");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw SolverError(SolverError::Kind::singular_jacobian, std::string(who) + ": singular Jacobian");
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Newton

struct NewtonOptions {
  double tolerance = newton_tolerance;  ///< on the max-norm of the residual
  int max_iterations = 50;
  std::optional<DirichletData> boundary;
  std::optional<TriField> source;
};

struct NewtonResult {
  TriField field;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Damped Newton on rotating_residual with the assembled Jacobian; throws rather than return an unconverged field.
[[nodiscard]] inline NewtonResult rotating_newton(const ModelParams& p, const TriField& guess,
                                                  const NewtonOptions& opt = {}) {
  const TriField* src = opt.source ? &*opt.source : nullptr;
  TriField u = guess;
  TriField f = rotating_residual(u, p, opt.boundary, src);
  double res = max_norm(f);
  for (int it = 0; it <= opt.max_iterations; ++it) {
    if (res < opt.tolerance) return {u, it, res};
    if (it == opt.max_iterations) break;
    const Eigen::VectorXd step = detail::sparse_solve(assemble_jacobian(u, p), -pack(f), "rotating_newton");
    const TriField du = unpack(u.grid, step);
    double lambda = 1.0;
    for (;;) {
      TriField trial = u + lambda * du;
      TriField ft = rotating_residual(trial, p, opt.boundary, src);
      const double rt = max_norm(ft);
      if (rt < res || lambda < 1.0 / 64.0) {
        u = std::move(trial);
        f = std::move(ft);
        res = rt;
        break;
      }
      lambda *= 0.5;
    }
    if (!std::isfinite(res)) throw SolverError(SolverError::Kind::non_finite, "rotating_newton: non-finite residual");
  }
  throw SolverError(SolverError::Kind::max_iterations,
                    "rotating_newton: max iterations reached (residual " + std::to_string(res) + ")");
}

// ---------------------------------------------------------------------------
// Branch continuation

enum class BranchStrategy { fix_mu_free_beta_omega, fix_omega_free_beta_mu };

[[nodiscard]] inline BranchStrategy parse_strategy(std::string_view s) {
  if (s == "fix_mu_free_beta_omega") return BranchStrategy::fix_mu_free_beta_omega;
  if (s == "fix_omega_free_beta_mu") return BranchStrategy::fix_omega_free_beta_mu;
  throw InvalidArgument("unknown strategy '" + std::string(s) + "'");
}

struct BranchPoint {
  double s = 0.0;
  TriField field;
  ModelParams params;  ///< beta(s) and mu(s) or omega(s) on the branch
  double residual_norm = 0.0;
  double symmetry_error = 0.0;
  double amplitude = 0.0;          ///< area-weighted norm of field - constant state
  double k_energy_fraction = 0.0;  ///< share of the deviation energy in wavenumbers +-k
  int iterations = 0;
};

struct BranchOptions {
  int n_r = 32;
  int n_theta = 36;
  BranchStrategy strategy = BranchStrategy::fix_omega_free_beta_mu;
  double tolerance = 1e-10;  ///< max-norm of the PDE residual
  int max_iterations = 30;
  double s_max_factor = 0.2;  ///< |s| <= s_max_factor * t
};

/// Fraction of the area-weighted energy of `dev` carried by angular wavenumbers +-k.
[[nodiscard]] inline double angular_energy_fraction(const TriField& dev, int k) {
  const PolarGrid& g = dev.grid;
  double part = 0.0, total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const ModeCoefficients hat = angular_transform(g, dev.data[c]);
    for (int s = 0; s < g.n_theta; ++s) {
      const int ks = ModeCoefficients::wavenumber_of_slot(s, g.n_theta);
      const auto mode = hat.mode(ks);
      double e = 0.0;
      for (int j = 0; j < g.n_r; ++j) e += g.radii[j] * std::norm(mode[j]);
      total += e;
      if (std::abs(ks) == k) part += e;
    }
  }
  return total > 0.0 ? part / total : 0.0;
}

namespace detail {

inline double& free_param(ModelParams& p, int which, BranchStrategy st) {
  if (which == 0) return p.beta;
  return st == BranchStrategy::fix_omega_free_beta_mu ? p.mu : p.omega;
}

/// d t / d(free parameter).
inline double constant_derivative(const ModelParams& p, int which, BranchStrategy st) {
  const double den = p.mu + p.beta * (p.alpha + p.gamma);
  if (which == 0) return -p.mu * (p.alpha + p.gamma) / (den * den);
  return st == BranchStrategy::fix_omega_free_beta_mu ? p.beta * (p.alpha + p.gamma) / (den * den) : 0.0;
}

/// d(rotating_residual)/d(free parameter) at fixed u.
inline TriField residual_param_derivative(const TriField& u, const ModelParams& p, int which, BranchStrategy st) {
  const PolarGrid& g = u.grid;
  TriField d(g);
  if (which == 1 && st == BranchStrategy::fix_mu_free_beta_omega) {
    for (int c = 0; c < 3; ++c) d.data[c] = angular_derivative(g, u.data[c]);
    return d;
  }
  for (int i = 0; i < g.size(); ++i) {
    const double u1 = u.data[0][i], u2 = u.data[1][i], u3 = u.data[2][i];
    if (which == 0) {
      d.data[0][i] = p.alpha * u1 * u2 + p.gamma * u1 * u3;
      d.data[1][i] = p.gamma * u1 * u2 + p.alpha * u2 * u3;
      d.data[2][i] = p.alpha * u1 * u3 + p.gamma * u2 * u3;
    } else {
      d.data[0][i] = -u1 * (1.0 - u1);
      d.data[1][i] = -u2 * (1.0 - u2);
      d.data[2][i] = -u3 * (1.0 - u3);
    }
  }
  return d;
}

/// Pinning row w_i h_i / ||h||^2, rescaled to unit max entry; returns the scale applied.
inline Eigen::VectorXd pinning_row(const TriField& h, double& scale) {
  const PolarGrid& g = h.grid;
  const double hh = inner(h, h);
  Eigen::VectorXd row(3 * g.size());
  for (int j = 0; j < g.n_r; ++j)
    for (int m = 0; m < g.n_theta; ++m)
      for (int c = 0; c < 3; ++c)
        row[unknown(g.index(j, m), c)] = g.area_weight(j) * h.at(c, j, m) / hh;
  scale = 1.0 / row.cwiseAbs().maxCoeff();
  return row * scale;
}

}  // namespace detail

/// Corrector for a single s != 0: unknowns (v, two free parameters) with u = t(params) + s v,
/// equations F(u)/s = 0, <v, h0> = ||h0||^2, <v, h0perp> = 0.
[[nodiscard]] inline BranchPoint branch_correct(double s, TriField v, ModelParams p, const TriField& h0,
                                                const TriField& hp, int k, const BranchOptions& opt) {
  const PolarGrid& g = h0.grid;
  const int n = 3 * g.size();
  double sc0 = 1.0, sc1 = 1.0;
  const Eigen::VectorXd c0 = detail::pinning_row(h0, sc0);
  const Eigen::VectorXd c1 = detail::pinning_row(hp, sc1);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  auto field_of = [&](const TriField& vv, const ModelParams& pp) {
    TriField u = constant_field(g, pp);
    u += s * vv;
    return u;
  };
  for (int it = 0; it <= opt.max_iterations; ++it) {
    const TriField u = field_of(v, p);
    const TriField f = rotating_residual(u, p);
    const Eigen::VectorXd vx = pack(v);
    const double g0 = c0.dot(vx) - sc0;
    const double g1 = c1.dot(vx);
    const double res = max_norm(f);
    if (res < opt.tolerance && std::abs(g0) < 1e-12 && std::abs(g1) < 1e-12) {
      BranchPoint bp;
      bp.s = s;
      bp.field = u;
      bp.params = p;
      bp.residual_norm = res;
      bp.symmetry_error = symmetry_error(u);
      const TriField dev = u - constant_field(g, p);
      bp.amplitude = norm(dev);
      bp.k_energy_fraction = angular_energy_fraction(dev, k);
      bp.iterations = it;
      return bp;
    }
    if (it == opt.max_iterations) break;
    const SparseMatrix ju = assemble_jacobian(u, p);
    std::vector<Triplet> trip;
    trip.reserve(ju.nonZeros() + 4 * n);
    for (int col = 0; col < ju.outerSize(); ++col)
      for (SparseMatrix::InnerIterator itj(ju, col); itj; ++itj) trip.emplace_back(itj.row(), itj.col(), itj.value());
    const Eigen::VectorXd j_ones = ju * ones;
    for (int w = 0; w < 2; ++w) {
      const Eigen::VectorXd col = (pack(detail::residual_param_derivative(u, p, w, opt.strategy)) +
                                   detail::constant_derivative(p, w, opt.strategy) * j_ones) /
                                  s;
      for (int i = 0; i < n; ++i)
        if (col[i] != 0.0) trip.emplace_back(i, n + w, col[i]);
    }
    for (int i = 0; i < n; ++i) {
      if (c0[i] != 0.0) trip.emplace_back(n, i, c0[i]);
      if (c1[i] != 0.0) trip.emplace_back(n + 1, i, c1[i]);
    }
    SparseMatrix a(n + 2, n + 2);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd rhs(n + 2);
    rhs.head(n) = -pack(f) / s;
    rhs[n] = -g0;
    rhs[n + 1] = -g1;
    const Eigen::VectorXd dx = detail::sparse_solve(a, rhs, "branch_continue");
    v = unpack(g, vx + dx.head(n));
    detail::free_param(p, 0, opt.strategy) += dx[n];
    detail::free_param(p, 1, opt.strategy) += dx[n + 1];
    if (!std::isfinite(p.beta) || !std::isfinite(p.mu) || !std::isfinite(p.omega))
      throw SolverError(SolverError::Kind::non_finite, "branch_continue: non-finite parameters");
  }
  throw SolverError(SolverError::Kind::max_iterations, "branch_continue: corrector did not converge at s = " +
                                                           std::to_string(s));
}

/// Converged branch points for every requested s, returned in input order.
[[nodiscard]] inline std::vector<BranchPoint> branch_continue(const BifurcationPoint& bp,
                                                              const std::vector<double>& s_values,
                                                              const BranchOptions& opt = {}) {
  if (!check_consistency(bp).pass) throw InvalidArgument("branch_continue: bifurcation point is not consistent");
  const double t0 = constant_solution(bp.params);
  for (double s : s_values)
    if (!(std::abs(s) <= opt.s_max_factor * t0))
      throw InvalidArgument("branch_continue: |s| exceeds s_max = " + std::to_string(opt.s_max_factor * t0));
  const PolarGrid g = build_grid(opt.n_r, opt.n_theta);
  const int k = bp.mode.k;
  const TriField h0 = kernel_direction(bp.mode, 1.0, 0.0, g).field;
  const TriField hp = kernel_direction(bp.mode, 0.0, 1.0, g).field;

  std::vector<BranchPoint> out(s_values.size());
  BranchPoint origin;
  origin.s = 0.0;
  origin.field = constant_field(g, bp.params);
  origin.params = bp.params;
  origin.residual_norm = max_norm(rotating_residual(origin.field, bp.params));
  origin.symmetry_error = symmetry_error(origin.field);

  for (int sign : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s_values.size(); ++i)
      if ((sign > 0 && s_values[i] > 0.0) || (sign < 0 && s_values[i] < 0.0)) idx.push_back(i);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(s_values[a]) < std::abs(s_values[b]); });
    // (s, v, params) history for the secant predictor; v at s = 0 is h0
    std::vector<std::pair<double, std::pair<TriField, ModelParams>>> hist{{0.0, {h0, bp.params}}};
    double last_good = 0.0;
    for (std::size_t i : idx) {
      const double s = s_values[i];
      TriField v = hist.back().second.first;
      ModelParams p = hist.back().second.second;
      if (hist.size() >= 2) {
        const auto& [sa, a] = hist[hist.size() - 2];
        const auto& [sb, b] = hist.back();
        const double w = (s - sb) / (sb - sa);
        v = b.first + w * (b.first - a.first);
        p.beta = b.second.beta + w * (b.second.beta - a.second.beta);
        p.mu = b.second.mu + w * (b.second.mu - a.second.mu);
        p.omega = b.second.omega + w * (b.second.omega - a.second.omega);
      }
      try {
        out[i] = branch_correct(s, std::move(v), p, h0, hp, k, opt);
      } catch (const SolverError& e) {
        throw SolverError(e.kind(), std::string(e.what()) + " (last converged s = " + std::to_string(last_good) + ")");
      }
      TriField vs = out[i].field - constant_field(g, out[i].params);
      vs *= 1.0 / s;
      hist.push_back({s, {std::move(vs), out[i].params}});
      last_good = s;
    }
  }
  for (std::size_t i = 0; i < s_values.size(); ++i)
    if (s_values[i] == 0.0) out[i] = origin;
  return out;
}

// ---------------------------------------------------------------------------
// Dirichlet fixed point

/// Phi(u): solves (L_omega + mu + 2 beta (alpha + gamma)) z_i = rhs_i(u) with z_i = phi_i on r = 1.
[[nodiscard]] inline TriField dirichlet_map_phi(const TriField& u, const ModelParams& p, const DirichletData& data) {
  const PolarGrid& g = u.grid;
  data.check_grid(g);
  for (const auto& c : u.data)
    for (double v : c)
      if (!(v >= -range_slack && v <= 2.0 + range_slack))
        throw InvalidArgument("dirichlet_map_phi: input must lie in [0, 2]");
  const double ab = p.alpha + p.gamma;
  const double sigma = p.mu + 2.0 * p.beta * ab;
  TriField rhs(g);
  for (int i = 0; i < g.size(); ++i) {
    const double u1 = u.data[0][i], u2 = u.data[1][i], u3 = u.data[2][i];
    const double ba = p.beta * p.alpha, bg = p.beta * p.gamma;
    rhs.data[0][i] = p.mu * u1 * (2.0 - u1) + 2.0 * p.beta * ab * u1 - ba * u1 * u2 - bg * u1 * u3;
    rhs.data[1][i] = p.mu * u2 * (2.0 - u2) + 2.0 * p.beta * ab * u2 - bg * u1 * u2 - ba * u2 * u3;
    rhs.data[2][i] = p.mu * u3 * (2.0 - u3) + 2.0 * p.beta * ab * u3 - ba * u1 * u3 - bg * u2 * u3;
  }
  const auto phi_hat = data.transformed(g);
  const RadialOperators ops(g, BoundaryCondition::dirichlet);
  TriField z(g);
  for (int c = 0; c < 3; ++c) {
    ModeCoefficients hat = angular_transform(g, rhs.data[c]);
    for (int s = 0; s < g.n_theta; ++s) {
      auto mode = hat.mode(ModeCoefficients::wavenumber_of_slot(s, g.n_theta));
      const cplx shift(sigma, p.omega * drift_wavenumber(s, g.n_theta));
      const auto sol = helmholtz_solve(ops.slot(s), shift, mode, phi_hat[c].values[s]);
      std::copy(sol.begin(), sol.end(), mode.begin());
    }
    z.data[c] = angular_inverse(g, hat);
  }
  return z;
}

/// Boundary trace reconstructed from the ghost closure: (u_{n-1} + ghost) / 2 with ghost = 2 phi - u_{n-1}.
[[nodiscard]] inline std::array<std::vector<double>, 3> boundary_trace(const TriField& u, const DirichletData& data) {
  const PolarGrid& g = u.grid;
  std::array<std::vector<double>, 3> tr;
  for (int c = 0; c < 3; ++c) {
    tr[c].resize(g.n_theta);
    for (int m = 0; m < g.n_theta; ++m) {
      const double inner_v = u.at(c, g.n_r - 1, m);
      const double ghost = 2.0 * data.phi[c][m] - inner_v;
      tr[c][m] = 0.5 * (inner_v + ghost);
    }
  }
  return tr;
}

struct DirichletOptions {
  int n_r = 48;
  int n_theta = 48;
  double damping = 0.5;
  double tolerance = 1e-10;  ///< max-norm of the PDE residual
  int max_picard = 2000;
  int stagnation_window = 50;
};

struct DirichletResult {
  TriField field;
  double residual_norm = 0.0;
  int picard_iterations = 0;
  bool used_newton = false;
  int newton_iterations = 0;
};

/// Damped Picard on Phi from u = 0; on stagnation falls back to Newton on the Dirichlet residual.
[[nodiscard]] inline DirichletResult dirichlet_solve(const ModelParams& p, const DirichletData& data,
                                                     const DirichletOptions& opt = {}) {
  if (p.bc != BoundaryCondition::dirichlet) throw InvalidArgument("dirichlet_solve: parameters must use bc = dirichlet");
  p.validate();
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw InvalidArgument("dirichlet_solve: damping must lie in (0, 1]");
  const PolarGrid g = build_grid(opt.n_r, opt.n_theta);
  data.check_grid(g);
  DirichletResult result;
  TriField u(g, 0.0);
  std::vector<double> changes;
  double best_before = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_picard; ++it) {
    TriField z = dirichlet_map_phi(u, p, data);
    TriField next = (1.0 - opt.damping) * u + opt.damping * z;
    const double change = max_norm(next - u) / std::max(max_norm(next), 1e-300);
    u = std::move(next);
    result.picard_iterations = it;
    const double res = max_norm(rotating_residual(u, p, data));
    if (res < opt.tolerance) {
      result.field = u;
      result.residual_norm = res;
      return result;
    }
    changes.push_back(change);
    if (static_cast<int>(changes.size()) > opt.stagnation_window) {
      const double recent =
          *std::min_element(changes.end() - opt.stagnation_window, changes.end());
      best_before = std::min(best_before, changes[changes.size() - opt.stagnation_window - 1]);
      if (!(recent < best_before)) break;  // relative change stopped decreasing
    }
  }
  result.used_newton = true;
  NewtonOptions nopt;
  nopt.tolerance = opt.tolerance;
  nopt.boundary = data;
  try {
    NewtonResult nr = rotating_newton(p, u, nopt);
    result.field = std::move(nr.field);
    result.residual_norm = nr.residual_norm;
    result.newton_iterations = nr.iterations;
  } catch (const SolverError& e) {
    throw SolverError(SolverError::Kind::no_convergence,
                      std::string("dirichlet_solve: no convergence after Picard and Newton (") + e.what() + ")");
  }
  return result;
}

}  // namespace rotwave
