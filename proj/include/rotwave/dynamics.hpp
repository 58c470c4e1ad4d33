#pragma once

// First-order IMEX time stepping of the three-species system in the lab frame
// (diffusion implicit) or the rotating frame (diffusion and drift implicit),
// with reaction explicit, plus the diagnostics used to measure growth rates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rotwave/bifurcation.hpp"
#include "rotwave/dirichlet_data.hpp"
#include "rotwave/discretization.hpp"
#include "rotwave/disk_spectrum.hpp"
#include "rotwave/error.hpp"
#include "rotwave/model.hpp"

namespace rotwave {

enum class Frame { lab, rotating };

[[nodiscard]] inline std::string_view to_string(Frame f) { return f == Frame::lab ? "lab" : "rotating"; }

[[nodiscard]] inline Frame parse_frame(std::string_view s) {
  if (s == "lab") return Frame::lab;
  if (s == "rotating") return Frame::rotating;
  throw InvalidArgument("unknown frame '" + std::string(s) + "'");
}

inline constexpr double reaction_safety_factor = 0.5;
inline constexpr double range_slack = 1e-12;
inline constexpr double strict_range_limit = 1e-8;

/// Largest admissible step for the explicit reaction: C / (mu + beta (alpha + gamma)).
[[nodiscard]] inline double max_stable_dt(const ModelParams& p) {
  const double rate = p.mu + p.beta * (p.alpha + p.gamma);
  return rate > 0.0 ? reaction_safety_factor / rate : std::numeric_limits<double>::infinity();
}

/// Constant state t (1,1,1) on a grid.
[[nodiscard]] inline TriField constant_field(const PolarGrid& g, const ModelParams& p) {
  return TriField(g, constant_solution(p));
}

/// Independent uniform samples in [lo, hi] for every node and component.
[[nodiscard]] inline TriField random_field(const PolarGrid& g, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  TriField f(g);
  for (auto& c : f.data)
    for (double& v : c) v = dist(rng);
  return f;
}

class ImexStepper {
 public:
  ImexStepper(PolarGrid g, ModelParams p, double dt, Frame frame, std::optional<DirichletData> data = std::nullopt)
      : grid_(std::move(g)), p_(p), dt_(dt), frame_(frame), ops_(grid_, p.bc) {
    if (!(dt > 0.0)) throw InvalidArgument("step_imex: dt must be positive");
    if (dt >= max_stable_dt(p))
      throw InvalidArgument("step_imex: dt = " + std::to_string(dt) + " violates the reaction bound " +
                            std::to_string(max_stable_dt(p)));
    if (p.bc == BoundaryCondition::dirichlet) {
      if (!data) throw InvalidArgument("step_imex: Dirichlet boundary requires boundary data");
      boundary_hat_ = data->transformed(grid_);
    }
  }

  [[nodiscard]] const PolarGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double dt() const noexcept { return dt_; }

  [[nodiscard]] TriField step(const TriField& u) const {
    if (!(u.grid == grid_)) throw InvalidArgument("step_imex: field grid does not match the stepper");
    const int n = grid_.size();
    const double inv_dt = 1.0 / dt_;
    TriField rhs(grid_);
    for (int i = 0; i < n; ++i) {
      const Vec3 ui{u.data[0][i], u.data[1][i], u.data[2][i]};
      const Vec3 r = reaction(ui, p_);
      for (int c = 0; c < 3; ++c) rhs.data[c][i] = ui[c] * inv_dt + r[c];
    }
    TriField out(grid_);
    for (int c = 0; c < 3; ++c) {
      ModeCoefficients hat = angular_transform(grid_, rhs.data[c]);
      for (int s = 0; s < grid_.n_theta; ++s) {
        const int k = ModeCoefficients::wavenumber_of_slot(s, grid_.n_theta);
        const double drift = frame_ == Frame::rotating ? p_.omega * drift_wavenumber(s, grid_.n_theta) : 0.0;
        const cplx g = boundary_hat_ ? (*boundary_hat_)[c].values[s] : cplx(0.0);
        auto mode = hat.mode(k);
        const auto sol = helmholtz_solve(ops_.slot(s), cplx(inv_dt, drift), mode, g);
        std::copy(sol.begin(), sol.end(), mode.begin());
      }
      out.data[c] = angular_inverse(grid_, hat);
    }
    if (!out.all_finite()) throw SolverError(SolverError::Kind::non_finite, "step_imex: non-finite value (NaN) detected");
    return out;
  }

 private:
  PolarGrid grid_;
  ModelParams p_;
  double dt_;
  Frame frame_;
  RadialOperators ops_;
  std::optional<std::array<ModeCoefficients, 3>> boundary_hat_;
};

/// One IMEX step; builds the per-mode operators on every call (use ImexStepper in loops).
[[nodiscard]] inline TriField step_imex(const TriField& state, double dt, const ModelParams& p, Frame frame,
                                        const std::optional<DirichletData>& data = std::nullopt) {
  return ImexStepper(state.grid, p, dt, frame, data).step(state);
}

// ---------------------------------------------------------------------------
// Range and mode diagnostics

struct RangeReport {
  Vec3 min{};
  Vec3 max{};
  bool pass = true;
  double worst_violation = 0.0;  ///< distance outside [0, 1]; 0 when inside
  int component = -1;            ///< location of the worst entry (-1 if none)
  int j = -1;
  int m = -1;
};

/// Min/max per component; pass iff every entry lies in (0, 1) up to range_slack.
[[nodiscard]] inline RangeReport range_check(const TriField& f) {
  RangeReport r;
  for (int c = 0; c < 3; ++c) {
    r.min[c] = std::numeric_limits<double>::infinity();
    r.max[c] = -std::numeric_limits<double>::infinity();
  }
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < f.grid.n_r; ++j)
      for (int m = 0; m < f.grid.n_theta; ++m) {
        const double v = f.at(c, j, m);
        r.min[c] = std::min(r.min[c], v);
        r.max[c] = std::max(r.max[c], v);
        const bool ok = v > -range_slack && v < 1.0 + range_slack;
        if (ok) continue;
        const double out = std::isfinite(v) ? std::max(-v, v - 1.0) : std::numeric_limits<double>::infinity();
        if (r.pass || out > r.worst_violation) {
          r.worst_violation = std::max(out, 0.0);
          r.component = c;
          r.j = j;
          r.m = m;
        }
        r.pass = false;
      }
  return r;
}

/// Interaction-eigenvector index carried by angular wavenumber k in the symmetric space
/// (k = 1 mod 3 pairs with delta, k = 2 mod 3 with conj(delta)); the uniform mode k = 0 reports delta.
[[nodiscard]] inline int interaction_component(int k) {
  if (k == 0) return 1;
  return ((k % 3) + 3) % 3;
}

/// Complex amplitude of f(r) e^{i k theta} along S column `component`:
/// area-weighted projection of the angular coefficient onto f, then S^{-1}.
[[nodiscard]] inline cplx mode_amplitude(const TriField& u, int k, std::span<const double> profile, int component) {
  const PolarGrid& g = u.grid;
  if (static_cast<int>(profile.size()) != g.n_r) throw InvalidArgument("mode_amplitude: profile size mismatch");
  if (component < 0 || component > 2) throw InvalidArgument("mode_amplitude: component must be 0, 1 or 2");
  const CMat3 sinv = s_inverse();
  cplx proj[3];
  double denom = 0.0;
  for (int j = 0; j < g.n_r; ++j) denom += g.radii[j] * profile[j] * profile[j];
  for (int c = 0; c < 3; ++c) {
    const ModeCoefficients hat = angular_transform(g, u.data[c]);
    const auto mode = hat.mode(k);
    cplx s = 0.0;
    for (int j = 0; j < g.n_r; ++j) s += g.radii[j] * profile[j] * mode[j];
    proj[c] = s / denom;
  }
  return sinv[component][0] * proj[0] + sinv[component][1] * proj[1] + sinv[component][2] * proj[2];
}

// ---------------------------------------------------------------------------
// Simulation driver

enum class Perturbation { none, uniform_delta, kernel, random };

[[nodiscard]] inline Perturbation parse_perturbation(std::string_view s) {
  if (s == "none") return Perturbation::none;
  if (s == "uniform_delta") return Perturbation::uniform_delta;
  if (s == "kernel") return Perturbation::kernel;
  if (s == "random") return Perturbation::random;
  throw InvalidArgument("unknown perturbation '" + std::string(s) + "'");
}

struct SimConfig {
  ModelParams params;
  int n_r = 64;
  int n_theta = 96;
  double dt = 1e-3;
  double t_end = 1.0;
  Frame frame = Frame::lab;

  Perturbation perturbation = Perturbation::none;
  double epsilon = 1e-4;
  int mode_k = 0;  ///< tracked (and, for `kernel`, seeded) angular wavenumber
  int mode_n = 0;  ///< radial index; 0 tracks the uniform profile
  std::uint64_t seed = 0;

  std::optional<TriField> initial;  ///< replaces constant + perturbation when set
  std::optional<DirichletData> boundary;

  int diagnostics_every = 1;
  int snapshot_every = 0;  ///< 0: first and last state only
  bool strict_range = false;

  void validate() const {
    params.validate(Validation::test_mode);
    if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidArgument("simulate: dt and t_end must be positive");
    if (dt >= max_stable_dt(params)) throw InvalidArgument("simulate: dt violates the reaction bound");
    if (diagnostics_every < 1 || snapshot_every < 0) throw InvalidArgument("simulate: bad cadence");
    if (mode_k < 0 || mode_n < 0) throw InvalidArgument("simulate: mode indices must be non-negative");
    if (params.bc == BoundaryCondition::dirichlet && !boundary)
      throw InvalidArgument("simulate: Dirichlet boundary requires boundary data");
  }
};

struct Snapshot {
  double time = 0.0;
  TriField field;
};

struct DiagnosticRecord {
  int step = 0;
  double time = 0.0;
  cplx amplitude;               ///< tracked mode amplitude
  double deviation_norm = 0.0;  ///< area-weighted norm of u - constant state
  Vec3 min{};
  Vec3 max{};
  double symmetry_error = 0.0;
  bool in_range = true;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticRecord> diagnostics;

  [[nodiscard]] bool range_ok() const {
    return std::all_of(diagnostics.begin(), diagnostics.end(), [](const auto& d) { return d.in_range; });
  }

  /// (time, amplitude) pairs with time >= t_from.
  [[nodiscard]] std::vector<std::pair<double, cplx>> amplitude_series(double t_from = 0.0) const {
    std::vector<std::pair<double, cplx>> s;
    for (const auto& d : diagnostics)
      if (d.time >= t_from) s.emplace_back(d.time, d.amplitude);
    return s;
  }
};

/// Radial profile of the tracked mode sampled on the grid: 1 for mode_n = 0, else f_{n,k}.
[[nodiscard]] inline std::vector<double> tracked_profile(const PolarGrid& g, int k, int n) {
  std::vector<double> f(g.n_r, 1.0);
  if (n == 0) return f;
  const DiskMode mode = disk_mode(k, n, BoundaryCondition::neumann);
  for (int j = 0; j < g.n_r; ++j) f[j] = mode.profile(g.radii[j]);
  return f;
}

[[nodiscard]] inline TriField initial_state(const SimConfig& cfg, const PolarGrid& g) {
  if (cfg.initial) {
    if (!(cfg.initial->grid == g)) throw InvalidArgument("simulate: initial field grid mismatch");
    return *cfg.initial;
  }
  TriField u = constant_field(g, cfg.params);
  switch (cfg.perturbation) {
    case Perturbation::none:
      break;
    case Perturbation::uniform_delta:
      for (int i = 0; i < g.size(); ++i) {
        u.data[0][i] -= 0.5 * cfg.epsilon;
        u.data[1][i] -= 0.5 * cfg.epsilon;
        u.data[2][i] += cfg.epsilon;
      }
      break;
    case Perturbation::kernel: {
      if (cfg.mode_n < 1) throw InvalidArgument("simulate: kernel perturbation needs mode_n >= 1");
      const auto h = kernel_direction(disk_mode(cfg.mode_k, cfg.mode_n, BoundaryCondition::neumann), 1.0, 0.0, g);
      u += cfg.epsilon * h.field;
      break;
    }
    case Perturbation::random: {
      u += random_field(g, -cfg.epsilon, cfg.epsilon, cfg.seed);
      break;
    }
  }
  return u;
}

[[nodiscard]] inline Trajectory simulate(const SimConfig& cfg) {
  cfg.validate();
  const PolarGrid g = build_grid(cfg.n_r, cfg.n_theta);
  const ImexStepper stepper(g, cfg.params, cfg.dt, cfg.frame, cfg.boundary);
  const std::vector<double> profile = tracked_profile(g, cfg.mode_k, cfg.mode_n);
  const int component = interaction_component(cfg.mode_k);
  const TriField base = constant_field(g, cfg.params);
  const int n_steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));

  Trajectory traj;
  auto record = [&](int step, const TriField& u) {
    DiagnosticRecord d;
    d.step = step;
    d.time = step * cfg.dt;
    d.amplitude = mode_amplitude(u, cfg.mode_k, profile, component);
    d.deviation_norm = norm(u - base);
    const RangeReport rr = range_check(u);
    d.min = rr.min;
    d.max = rr.max;
    d.in_range = rr.pass;
    d.symmetry_error = symmetry_error(u);
    traj.diagnostics.push_back(d);
    if (cfg.strict_range && rr.worst_violation > strict_range_limit)
      throw SolverError(SolverError::Kind::range_violation,
                        "simulate: component " + std::to_string(rr.component + 1) + " left (0, 1) at step " +
                            std::to_string(step) + " (violation " + std::to_string(rr.worst_violation) + ")");
  };

  TriField u = initial_state(cfg, g);
  record(0, u);
  traj.snapshots.push_back({0.0, u});
  for (int step = 1; step <= n_steps; ++step) {
    u = stepper.step(u);
    if (step % cfg.diagnostics_every == 0 || step == n_steps) record(step, u);
    if ((cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) || step == n_steps) {
      if (traj.snapshots.back().time < step * cfg.dt) traj.snapshots.push_back({step * cfg.dt, u});
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Growth-rate fitting

struct GrowthFit {
  double rate = 0.0;
  double frequency = 0.0;
};

/// Least-squares slopes of log|A(t)| and of the unwrapped phase of A(t).
[[nodiscard]] inline GrowthFit fit_growth_rate(const std::vector<std::pair<double, cplx>>& series) {
  const std::size_t n = series.size();
  if (n < 10) throw InvalidArgument("fit_growth_rate: at least 10 samples required");
  std::vector<double> t(n), logamp(n), phase(n);
  double amp_min = std::numeric_limits<double>::infinity(), amp_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = series[i].first;
    const double a = std::abs(series[i].second);
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("fit_growth_rate: amplitudes must be finite and nonzero");
    if (i > 0 && !(t[i] > t[i - 1])) throw InvalidArgument("fit_growth_rate: times must increase");
    logamp[i] = std::log(a);
    amp_min = std::min(amp_min, a);
    amp_max = std::max(amp_max, a);
    const double raw = std::arg(series[i].second);
    if (i == 0) {
      phase[i] = raw;
    } else {
      const double d = std::remainder(raw - phase[i - 1], 2.0 * pi);
      phase[i] = phase[i - 1] + d;
    }
  }
  const double phase_advance = std::abs(phase.back() - phase.front());
  if (amp_max / amp_min < 1.01 && phase_advance < 4.0 * pi)
    throw SolverError(SolverError::Kind::insufficient_range, "fit_growth_rate: insufficient dynamic range");
  auto slope = [&](const std::vector<double>& y) {
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      tm += t[i];
      ym += y[i];
    }
    tm /= n;
    ym /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (t[i] - tm) * (y[i] - ym);
      sxx += (t[i] - tm) * (t[i] - tm);
    }
    return sxy / sxx;
  };
  return {slope(logamp), slope(phase)};
}

}  // namespace rotwave
