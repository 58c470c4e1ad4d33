#pragma once

// The ten acceptance criteria, each an independent experiment returning a
// pass/fail verdict plus the measured numbers. Shared by the acceptance test
// binary and `rotwave verify`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rotwave/bifurcation.hpp"
#include "rotwave/disk_spectrum.hpp"
#include "rotwave/dynamics.hpp"
#include "rotwave/io.hpp"
#include "rotwave/model.hpp"
#include "rotwave/steady.hpp"

namespace rotwave::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  json measurements = json::object();
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

[[nodiscard]] inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

[[nodiscard]] inline std::string format_line(const CriterionResult& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " (%.1f s of %.0f s)", r.seconds, r.budget_seconds);
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.detail + buf;
}

namespace detail {

inline double relative_error(double got, double want) { return std::abs(got - want) / std::abs(want); }

/// Least-squares line y = a + b x; returns (a, b, R^2).
inline std::array<double, 3> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i] / n;
    ym += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - xm) * (y[i] - ym);
    sxx += (x[i] - xm) * (x[i] - xm);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  const double b = sxy / sxx;
  return {ym - b * xm, b, syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0};
}

}  // namespace detail

// ---------------------------------------------------------------------------

[[nodiscard]] inline CriterionResult spectrum_agreement() {
  CriterionResult r{1, "spectrum agreement", false, {}, json::object(), 0.0, 30.0};
  double worst_rel = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
  const PolarGrid g256 = build_grid(256, 12), g512 = build_grid(512, 12);
  for (BoundaryCondition bc : {BoundaryCondition::neumann, BoundaryCondition::dirichlet})
    for (int k : {0, 1, 2, 5}) {
      const auto modes = eigenvalues(k, 5, bc);
      // the discrete Neumann k = 0 operator also carries the zero eigenvalue first
      const int skip = (bc == BoundaryCondition::neumann && k == 0) ? 1 : 0;
      const auto d256 = discrete_radial_eigenvalues(radial_operator(k, bc, g256), 5 + skip);
      const auto d512 = discrete_radial_eigenvalues(radial_operator(k, bc, g512), 5 + skip);
      for (int i = 0; i < 5; ++i) {
        const double e256 = detail::relative_error(d256[i + skip], modes[i].lambda);
        const double e512 = detail::relative_error(d512[i + skip], modes[i].lambda);
        worst_rel = std::max(worst_rel, e512);
        ratio_lo = std::min(ratio_lo, e256 / e512);
        ratio_hi = std::max(ratio_hi, e256 / e512);
      }
    }
  r.measurements = {{"max_relative_error_512", worst_rel}, {"ratio_min", ratio_lo}, {"ratio_max", ratio_hi}};
  r.pass = worst_rel < 1e-3 && ratio_lo > 3.5 && ratio_hi < 4.5;
  r.detail = "max rel err " + fmt("%.2e", worst_rel) + " at n_r=512, error ratio 256/512 in [" +
             fmt("%.3f", ratio_lo) + ", " + fmt("%.3f", ratio_hi) + "]";
  return r;
}

[[nodiscard]] inline CriterionResult eigenfunction_residual() {
  CriterionResult r{2, "eigenfunction residual", false, {}, json::object(), 0.0, 30.0};
  const PolarGrid g = build_grid(512, 24);
  double worst = 0.0;
  json per_mode = json::array();
  for (BoundaryCondition bc : {BoundaryCondition::neumann, BoundaryCondition::dirichlet})
    for (int k : {0, 1, 2, 5})
      for (const auto& mode : eigenvalues(k, 5, bc)) {
        const double res = eigen_residual(mode, 5.0, g);
        worst = std::max(worst, res);
        per_mode.push_back({{"bc", std::string(to_string(bc))}, {"k", k}, {"n", mode.n}, {"residual", res}});
      }
  r.measurements = {{"max_residual", worst}, {"modes", per_mode}};
  r.pass = worst < 1e-4;
  r.detail = "max residual " + fmt("%.3e", worst) + " (threshold 1e-4) at n_r=512, omega=5";
  return r;
}

[[nodiscard]] inline CriterionResult loci_identities() {
  CriterionResult r{3, "loci identities", false, {}, json::object(), 0.0, 5.0};
  const double alpha = 2.0, gamma = 1.0;
  double worst_consistency = 0.0, worst_roundtrip = 0.0;
  int points = 0;
  for (int k : {2, 5})
    for (int n : {1, 2}) {
      const DiskMode mode = disk_mode(k, n, BoundaryCondition::neumann);
      const double lam = mode.lambda;
      // omega sweep along the (beta, mu) locus; mu > 2 lambda needs omega > lambda (a - g) / (sqrt3 k (a + g))
      const double omega_min = 3.0 * lam * (alpha - gamma) / (sqrt3 * k * (alpha + gamma));
      for (int i = 0; i < 10; ++i) {
        const double omega = omega_min * (1.1 + 0.3 * i);
        const auto bm = locus_beta_mu(lam, k, omega, alpha, gamma);
        const BifurcationPoint bp{mode, ModelParams{bm.mu, bm.beta, alpha, gamma, omega, BoundaryCondition::neumann},
                                  FreeParameter::mu};
        const auto rep = check_consistency(bp);
        worst_consistency = std::max({worst_consistency, rep.eigenvalue_residual, rep.frequency_residual});
        const auto bo = locus_beta_omega(lam, k, bm.mu, alpha, gamma);
        worst_roundtrip = std::max({worst_roundtrip, detail::relative_error(bo.beta, bm.beta),
                                    detail::relative_error(bo.omega, omega)});
        ++points;
      }
      // mu sweep along the (beta, omega) locus
      for (int i = 0; i < 10; ++i) {
        const double mu = 2.0 * lam * (1.1 + 0.5 * i);
        const auto bo = locus_beta_omega(lam, k, mu, alpha, gamma);
        const BifurcationPoint bp{mode, ModelParams{mu, bo.beta, alpha, gamma, bo.omega, BoundaryCondition::neumann},
                                  FreeParameter::omega};
        const auto rep = check_consistency(bp);
        worst_consistency = std::max({worst_consistency, rep.eigenvalue_residual, rep.frequency_residual});
        const auto bm = locus_beta_mu(lam, k, bo.omega, alpha, gamma);
        worst_roundtrip = std::max(
            {worst_roundtrip, detail::relative_error(bm.beta, bo.beta), detail::relative_error(bm.mu, mu)});
        ++points;
      }
    }
  r.measurements = {{"points", points}, {"max_consistency_residual", worst_consistency},
                    {"max_roundtrip_error", worst_roundtrip}};
  r.pass = worst_consistency < 1e-10 && worst_roundtrip < 1e-10;
  r.detail = std::to_string(points) + " locus points, consistency " + fmt("%.2e", worst_consistency) +
             ", round trip " + fmt("%.2e", worst_roundtrip);
  return r;
}

[[nodiscard]] inline CriterionResult appendix_identities(std::uint64_t seed) {
  CriterionResult r{4, "matrix identities", false, {}, json::object(), 0.0, 5.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  const CMat3 s = s_matrix();
  double worst_diag = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const CyclicMatrix a{entry(rng), entry(rng), entry(rng)};
    const CyclicEigs e = cyclic_eigs(a);
    const CMat3 as = matmul(to_complex(a.dense()), s);
    const cplx d[3] = {e.row_sum, e.m, e.m_conj};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) worst_diag = std::max(worst_diag, std::abs(as[i][j] - s[i][j] * d[j]));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double min_det = 1e300;
  double worst_inverse = 0.0;
  for (int set = 0; set < 20; ++set) {
    ModelParams p;
    p.mu = 0.1 + 9.9 * unit(rng);
    p.gamma = 0.1 + 4.9 * unit(rng);
    p.alpha = p.gamma * (1.05 + 2.0 * unit(rng));
    for (int i = 1; i <= 10000; ++i) {
      const double x = 100.0 * i / 10000.0;
      min_det = std::min(min_det, coupling_det(x, p) / (p.mu * p.mu * p.mu));
    }
    for (int i = 0; i < 5; ++i) {
      const double beta = 100.0 * unit(rng);
      const Mat3 prod = matmul(interaction_dense(beta, p), inverse_interaction(beta, p));
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) worst_inverse = std::max(worst_inverse, std::abs(prod[a][b] - (a == b ? 1.0 : 0.0)));
    }
  }
  r.measurements = {{"max_AS_minus_SD", worst_diag}, {"min_scaled_det", min_det}, {"max_MMinv_error", worst_inverse}};
  r.pass = worst_diag < 1e-12 && min_det > 0.0 && worst_inverse < 1e-12;
  r.detail = "|AS - SD| " + fmt("%.2e", worst_diag) + ", min det/mu^3 on (0,100] " + fmt("%.3e", min_det) +
             ", |M Minv - I| " + fmt("%.2e", worst_inverse);
  return r;
}

[[nodiscard]] inline CriterionResult instability_threshold_check() {
  CriterionResult r{5, "instability threshold", false, {}, json::object(), 0.0, 180.0};
  const double threshold = instability_threshold(3.0, 2.0, 1.0);
  auto run = [&](double beta) {
    SimConfig c;
    c.params = ModelParams{3.0, beta, 2.0, 1.0, 0.0, BoundaryCondition::neumann};
    c.n_r = 96;
    c.n_theta = 96;
    c.dt = 2e-3;
    c.t_end = 15.0;
    c.perturbation = Perturbation::uniform_delta;
    c.epsilon = 1e-5;
    c.diagnostics_every = 10;
    const Trajectory tr = simulate(c);
    return std::make_pair(fit_growth_rate(tr.amplitude_series(2.0)),
                          std::abs(tr.diagnostics.back().amplitude) / std::abs(tr.diagnostics.front().amplitude));
  };
  const auto [below, below_gain] = run(0.9 * threshold);
  const auto [above, above_gain] = run(1.1 * threshold);
  const cplx d = delta_beta(ModelParams{3.0, 1.1 * threshold, 2.0, 1.0, 0.0, BoundaryCondition::neumann});
  const double rate_err = detail::relative_error(above.rate, -d.real());
  const double freq_err = detail::relative_error(std::abs(above.frequency), std::abs(d.imag()));
  r.measurements = {{"threshold", threshold},
                    {"rate_below", below.rate},
                    {"gain_below", below_gain},
                    {"rate_above", above.rate},
                    {"predicted_rate_above", -d.real()},
                    {"frequency_above", std::abs(above.frequency)},
                    {"predicted_frequency_above", std::abs(d.imag())}};
  r.pass = below.rate < 0.0 && below_gain < 1.0 && above.rate > 0.0 && above_gain > 1.0 && rate_err < 0.03 &&
           freq_err < 0.03;
  r.detail = "beta=1.8 rate " + fmt("%.4f", below.rate) + "; beta=2.2 rate " + fmt("%.5f", above.rate) + " vs " +
             fmt("%.5f", -d.real()) + " (" + fmt("%.2f", 100 * rate_err) + "%), freq " +
             fmt("%.5f", std::abs(above.frequency)) + " vs " + fmt("%.5f", std::abs(d.imag())) + " (" +
             fmt("%.2f", 100 * freq_err) + "%)";
  return r;
}

[[nodiscard]] inline CriterionResult neutral_rotating_mode() {
  CriterionResult r{6, "neutral rotating mode", false, {}, json::object(), 0.0, 300.0};
  const BifurcationPoint bp = bifurcation_point_mu(2, 1, 5.0, 2.0, 1.0);
  SimConfig c;
  c.params = bp.params;
  c.n_r = 64;
  c.n_theta = 48;
  c.dt = 5e-4;
  c.t_end = 2.5;
  c.perturbation = Perturbation::kernel;
  c.epsilon = 1e-4 * constant_solution(bp.params);
  c.mode_k = 2;
  c.mode_n = 1;
  const Trajectory tr = simulate(c);
  const GrowthFit fit = fit_growth_rate(tr.amplitude_series(0.2));
  const double kw = 2.0 * bp.params.omega;
  const double speed = fit.frequency / 2.0;
  const double speed_err = detail::relative_error(speed, bp.params.omega);
  r.measurements = {{"mu", bp.params.mu},  {"beta", bp.params.beta},    {"rate", fit.rate},
                    {"rate_bound", 0.02 * kw}, {"phase_speed", speed}, {"omega", bp.params.omega}};
  r.pass = std::abs(fit.rate) < 0.02 * kw && speed_err < 0.02;
  r.detail = "(mu, beta) = (" + fmt("%.4f", bp.params.mu) + ", " + fmt("%.3f", bp.params.beta) + "), rate " +
             fmt("%.4f", fit.rate) + " (bound " + fmt("%.2f", 0.02 * kw) + "), phase speed " + fmt("%.4f", speed) +
             " vs omega 5 (" + fmt("%.2f", 100 * speed_err) + "%)";
  return r;
}

[[nodiscard]] inline CriterionResult branch_tangency() {
  CriterionResult r{7, "branch tangency", false, {}, json::object(), 0.0, 300.0};
  const BifurcationPoint bp = bifurcation_point_mu(2, 1, 5.0, 2.0, 1.0);
  BranchOptions opt;
  const std::vector<double> s_values{2.5e-3, 5e-3, 1e-2, -2.5e-3, -5e-3, -1e-2};
  const auto pts = branch_continue(bp, s_values, opt);
  const PolarGrid g = build_grid(opt.n_r, opt.n_theta);
  const TriField h0 = kernel_direction(bp.mode, 1.0, 0.0, g).field;
  const double h0n = norm(h0);
  std::vector<double> xs, errs;
  double worst_res = 0.0, worst_sym = 0.0, min_frac = 1.0;
  bool range_ok = true;
  json rows = json::array();
  for (const auto& p : pts) {
    const double res = max_norm(rotating_residual(p.field, p.params));
    TriField slope = p.field - constant_field(g, p.params);
    slope *= 1.0 / p.s;
    const double err = norm(slope - h0) / h0n;
    const RangeReport rr = range_check(p.field);
    range_ok = range_ok && rr.pass && std::min({rr.min[0], rr.min[1], rr.min[2]}) > 0.0 &&
               std::max({rr.max[0], rr.max[1], rr.max[2]}) < 1.0;
    worst_res = std::max(worst_res, res);
    worst_sym = std::max(worst_sym, symmetry_error(p.field));
    min_frac = std::min(min_frac, angular_energy_fraction(p.field - constant_field(g, p.params), bp.mode.k));
    xs.push_back(std::abs(p.s));
    errs.push_back(err);
    rows.push_back({{"s", p.s}, {"beta", p.params.beta}, {"mu", p.params.mu}, {"residual", res}, {"tangency_error", err}});
  }
  const auto [intercept, c, r2] = detail::linear_fit(xs, errs);
  r.measurements = {{"points", rows},        {"max_residual", worst_res}, {"max_symmetry_error", worst_sym},
                    {"min_k_fraction", min_frac}, {"C", c},                {"intercept", intercept},
                    {"R2", r2}};
  r.pass = worst_res < 1e-9 && worst_sym < 1e-8 && range_ok && min_frac > 0.5 && std::isfinite(c) && r2 > 0.95;
  r.detail = "residual " + fmt("%.1e", worst_res) + ", symmetry " + fmt("%.1e", worst_sym) + ", k-fraction >= " +
             fmt("%.3f", min_frac) + ", range " + (range_ok ? "ok" : "violated") + ", C = " + fmt("%.3f", c) +
             " (R^2 " + fmt("%.4f", r2) + ")";
  return r;
}

[[nodiscard]] inline CriterionResult dirichlet_existence(std::uint64_t seed) {
  CriterionResult r{8, "Dirichlet existence", false, {}, json::object(), 0.0, 120.0};
  const ModelParams p{1.0, 1.0, 2.0, 1.0, 1.0, BoundaryCondition::dirichlet};
  DirichletOptions opt;
  const PolarGrid g = build_grid(opt.n_r, opt.n_theta);
  const DirichletData data = DirichletData::cosine(g, 0.2);
  const DirichletResult sol = dirichlet_solve(p, data, opt);
  const double res = max_norm(rotating_residual(sol.field, p, data));
  const auto trace = boundary_trace(sol.field, data);
  double trace_err = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int m = 0; m < g.n_theta; ++m) trace_err = std::max(trace_err, std::abs(trace[c][m] - data.phi[c][m]));
  const RangeReport rr = range_check(sol.field);
  const double lo = std::min({rr.min[0], rr.min[1], rr.min[2]});
  const double hi = std::max({rr.max[0], rr.max[1], rr.max[2]});
  const double sym = symmetry_error(sol.field);
  int bad = 0;
  double phi_min = 1e300, phi_max = -1e300;
  for (int i = 0; i < 100; ++i) {
    const TriField z = dirichlet_map_phi(random_field(g, 0.0, 2.0, seed + i), p, data);
    for (const auto& c : z.data)
      for (double v : c) {
        phi_min = std::min(phi_min, v);
        phi_max = std::max(phi_max, v);
        if (!(v > 0.0 && v <= 2.0)) ++bad;
      }
  }
  r.measurements = {{"residual", res},     {"trace_error", trace_err}, {"min", lo},
                    {"max", hi},           {"symmetry_error", sym},     {"picard_iterations", sol.picard_iterations},
                    {"used_newton", sol.used_newton}, {"phi_violations", bad}, {"phi_min", phi_min},
                    {"phi_max", phi_max}};
  r.pass = res < 1e-8 && trace_err < 1e-14 && lo > 0.0 && hi < 1.0 && sym < 1e-8 && bad == 0;
  r.detail = "residual " + fmt("%.1e", res) + ", trace " + fmt("%.1e", trace_err) + ", range [" + fmt("%.4f", lo) +
             ", " + fmt("%.4f", hi) + "], symmetry " + fmt("%.1e", sym) + ", Phi range [" + fmt("%.3e", phi_min) +
             ", " + fmt("%.4f", phi_max) + "] with " + std::to_string(bad) + " violations";
  return r;
}

[[nodiscard]] inline CriterionResult range_preservation(std::uint64_t seed) {
  CriterionResult r{9, "range preservation", false, {}, json::object(), 0.0, 180.0};
  SimConfig c;
  c.params = ModelParams{3.0, 3.0 * instability_threshold(3.0, 2.0, 1.0), 2.0, 1.0, 0.0, BoundaryCondition::neumann};
  c.n_r = 48;
  c.n_theta = 48;
  c.dt = 1e-3;
  c.t_end = 10.0;
  c.initial = random_field(build_grid(c.n_r, c.n_theta), 0.05, 0.95, seed);
  const Trajectory tr = simulate(c);
  double lo = 1e300, hi = -1e300;
  for (const auto& d : tr.diagnostics)
    for (int k = 0; k < 3; ++k) {
      lo = std::min(lo, d.min[k]);
      hi = std::max(hi, d.max[k]);
    }
  const int steps = tr.diagnostics.back().step;
  r.measurements = {{"steps", steps}, {"min", lo}, {"max", hi}, {"all_in_range", tr.range_ok()}};
  r.pass = steps == 10000 && tr.range_ok() && static_cast<int>(tr.diagnostics.size()) == steps + 1;
  r.detail = std::to_string(steps) + " steps at beta = 6, range [" + fmt("%.3e", lo) + ", " + fmt("%.6f", hi) + "]";
  return r;
}

[[nodiscard]] inline CriterionResult jacobian_check(std::uint64_t seed) {
  CriterionResult r{10, "Jacobian check", false, {}, json::object(), 0.0, 30.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const PolarGrid g = build_grid(16, 24);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p{1.0 + 4.0 * unit(rng), 1.0 + 4.0 * unit(rng), 2.0, 1.0, -5.0 + 10.0 * unit(rng),
                        BoundaryCondition::neumann};
    const TriField u = random_field(g, 0.0, 1.0, rng());
    const TriField d = random_field(g, -1.0, 1.0, rng());
    const TriField jd = jacobian_action(u, p, d);
    TriField fd = rotating_residual(u + h * d, p) - rotating_residual(u - h * d, p);
    fd *= 0.5 / h;
    worst = std::max(worst, max_norm(jd - fd) / max_norm(jd));
  }
  r.measurements = {{"pairs", 20}, {"max_relative_error", worst}};
  r.pass = worst < 1e-6;
  r.detail = "20 random pairs, max relative error " + fmt("%.2e", worst);
  return r;
}

// ---------------------------------------------------------------------------

[[nodiscard]] inline std::pair<std::string, double> criterion_label(int id) {
  static const std::pair<const char*, double> table[] = {
      {"spectrum agreement", 30.0},   {"eigenfunction residual", 30.0}, {"loci identities", 5.0},
      {"matrix identities", 5.0},     {"instability threshold", 180.0}, {"neutral rotating mode", 300.0},
      {"branch tangency", 300.0},     {"Dirichlet existence", 120.0},   {"range preservation", 180.0},
      {"Jacobian check", 30.0}};
  if (id < 1 || id > 10) throw InvalidArgument("unknown criterion " + std::to_string(id));
  return {table[id - 1].first, table[id - 1].second};
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "spectrum", "dynamics", "steady", "all"};
  return names;
}

[[nodiscard]] inline std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "algebra") return {3, 4};
  if (suite == "spectrum") return {1, 2};
  if (suite == "dynamics") return {5, 6, 9};
  if (suite == "steady") return {7, 8, 10};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  throw InvalidArgument("unknown suite '" + suite + "'");
}

/// Runs one criterion, timing it and folding the wall-clock budget into the verdict.
[[nodiscard]] inline CriterionResult run_criterion(int id, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = spectrum_agreement(); break;
      case 2: r = eigenfunction_residual(); break;
      case 3: r = loci_identities(); break;
      case 4: r = appendix_identities(seed); break;
      case 5: r = instability_threshold_check(); break;
      case 6: r = neutral_rotating_mode(); break;
      case 7: r = branch_tangency(); break;
      case 8: r = dirichlet_existence(seed); break;
      case 9: r = range_preservation(seed); break;
      case 10: r = jacobian_check(seed); break;
      default: throw InvalidArgument("unknown criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    r.id = id;
    std::tie(r.name, r.budget_seconds) = criterion_label(id);
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.budget_seconds > 0.0 && r.seconds > r.budget_seconds) {
    r.pass = false;
    r.detail += " [over time budget]";
  }
  return r;
}

}  // namespace rotwave::acceptance
