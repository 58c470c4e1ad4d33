// rotwave: command-line front end for the rotating-wave toolkit.
//
//   rotwave spectrum        --config run.cfg --out out/
//   rotwave bifurcate       --config run.cfg --out out/
//   rotwave simulate        --config run.cfg --out out/
//   rotwave rotate-solve    --config run.cfg --out out/
//   rotwave dirichlet-solve --config run.cfg --out out/
//   rotwave verify          --suite algebra --out out/

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rotwave/acceptance.hpp"
#include "rotwave/bifurcation.hpp"
#include "rotwave/config.hpp"
#include "rotwave/disk_spectrum.hpp"
#include "rotwave/dynamics.hpp"
#include "rotwave/io.hpp"
#include "rotwave/steady.hpp"

namespace fs = std::filesystem;
using namespace rotwave;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::string suite = "all";
};

/// Collects log lines for stdout and the run.log artifact.
class RunLog {
 public:
  void line(const std::string& s) {
    std::cout << s << '\n';
    text_ += s + '\n';
  }
  [[nodiscard]] const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
};

RunConfig load_config(const std::string& sub, const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config.empty()) {
    if (!fs::exists(flags.config)) throw InvalidArgument("config file '" + flags.config + "' does not exist");
    cfg = parse_config(read_file(flags.config));
  }
  cfg.subcommand = sub;
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.seed) cfg.seed = *flags.seed;
  return cfg;
}

void finish(const RunConfig& cfg, const RunLog& log, json summary, bool pass) {
  summary["subcommand"] = cfg.subcommand;
  summary["pass"] = pass;
  const fs::path out(cfg.out_dir);
  write_atomic(out / "summary.json", rounded(summary).dump(2) + "\n");
  write_atomic(out / "run.log", log.str());
}

int cmd_spectrum(const RunConfig& cfg) {
  RunLog log;
  const auto pts = l_omega_spectrum(cfg.params.omega, cfg.params.bc, cfg.k_max, cfg.n_max);
  CsvWriter csv({"k", "n", "bc", "root", "lambda", "re", "im"});
  for (const auto& p : pts)
    csv.add_row({cell(p.k), cell(p.n), cell(to_string(cfg.params.bc)), cell(p.root), cell(p.re), cell(p.re),
                 cell(p.im)});
  csv.save(fs::path(cfg.out_dir) / "spectrum.csv");
  log.line("spectrum: " + std::to_string(pts.size()) + " points written to spectrum.csv");
  json s{{"points", pts.size()}, {"omega", cfg.params.omega}, {"bc", std::string(to_string(cfg.params.bc))},
         {"k_max", cfg.k_max}, {"n_max", cfg.n_max}};
  finish(cfg, log, s, true);
  return 0;
}

int cmd_bifurcate(const RunConfig& cfg) {
  RunLog log;
  const ModelParams& p = cfg.params;
  const bool fix_omega = cfg.fixed == "omega";
  const BifurcationPoint bp = fix_omega ? bifurcation_point_mu(cfg.k, cfg.n, p.omega, p.alpha, p.gamma)
                                        : bifurcation_point_omega(cfg.k, cfg.n, p.mu, p.alpha, p.gamma);
  const auto rep = check_consistency(bp);
  const double threshold = instability_threshold(bp.params.mu, p.alpha, p.gamma);
  json rec{{"k", cfg.k},
           {"n", cfg.n},
           {"lambda_n", bp.mode.lambda},
           {"beta", bp.params.beta},
           {"mu", bp.params.mu},
           {"omega", bp.params.omega},
           {"fixed", cfg.fixed},
           {"threshold", threshold},
           {"constant_state", constant_solution(bp.params)},
           {"eigenvalue_residual", rep.eigenvalue_residual},
           {"frequency_residual", rep.frequency_residual},
           {"consistent", rep.pass}};
  write_atomic(fs::path(cfg.out_dir) / "bifurcation.json", rounded(rec).dump(2) + "\n");
  // locus traced over the swept input parameter (omega when fixed = omega, else mu)
  CsvWriter csv({fix_omega ? "omega" : "mu", "beta", fix_omega ? "mu" : "omega"});
  int traced = 0;
  for (int i = 0; i < cfg.sweep_count; ++i) {
    const double x = cfg.sweep_count == 1 ? cfg.sweep_min
                                          : cfg.sweep_min + (cfg.sweep_max - cfg.sweep_min) * i / (cfg.sweep_count - 1);
    try {
      if (fix_omega) {
        const auto bm = locus_beta_mu(bp.mode.lambda, cfg.k, x, p.alpha, p.gamma);
        csv.add_row({cell(x), cell(bm.beta), cell(bm.mu)});
      } else {
        const auto bo = locus_beta_omega(bp.mode.lambda, cfg.k, x, p.alpha, p.gamma);
        csv.add_row({cell(x), cell(bo.beta), cell(bo.omega)});
      }
      ++traced;
    } catch (const SolverError& e) {
      if (e.kind() != SolverError::Kind::locus_empty) throw;
    }
  }
  csv.save(fs::path(cfg.out_dir) / "locus.csv");
  char buf[160];
  std::snprintf(buf, sizeof buf, "bifurcate: lambda_n = %.10g, beta = %.10g, mu = %.10g, omega = %.10g", bp.mode.lambda,
                bp.params.beta, bp.params.mu, bp.params.omega);
  log.line(buf);
  log.line("locus points traced: " + std::to_string(traced));
  rec["locus_points"] = traced;
  finish(cfg, log, rec, rep.pass);
  return rep.pass ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg) {
  RunLog log;
  SimConfig sc;
  sc.params = cfg.params;
  sc.n_r = cfg.n_r;
  sc.n_theta = cfg.n_theta;
  sc.dt = cfg.dt;
  sc.t_end = cfg.t_end;
  sc.frame = parse_frame(cfg.frame);
  sc.perturbation = parse_perturbation(cfg.perturbation);
  sc.epsilon = cfg.epsilon;
  sc.mode_k = cfg.mode_k;
  sc.mode_n = cfg.mode_n;
  sc.seed = cfg.seed;
  sc.diagnostics_every = cfg.diagnostics_every;
  sc.snapshot_every = cfg.snapshot_every;
  sc.strict_range = cfg.strict_range;
  if (cfg.params.bc == BoundaryCondition::dirichlet)
    sc.boundary = DirichletData::uniform(build_grid(cfg.n_r, cfg.n_theta), constant_solution(cfg.params));
  const Trajectory tr = simulate(sc);

  const fs::path out(cfg.out_dir);
  CsvWriter diag({"step", "time", "amplitude_abs", "amplitude_phase", "deviation_norm", "min_u1", "min_u2", "min_u3",
                  "max_u1", "max_u2", "max_u3", "symmetry_error"});
  for (const auto& d : tr.diagnostics)
    diag.add_row({cell(d.step), cell(d.time), cell(std::abs(d.amplitude)), cell(std::arg(d.amplitude)),
                  cell(d.deviation_norm), cell(d.min[0]), cell(d.min[1]), cell(d.min[2]), cell(d.max[0]),
                  cell(d.max[1]), cell(d.max[2]), cell(d.symmetry_error)});
  diag.save(out / "diagnostics.csv");
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04zu.txt", i);
    write_snapshot(out / name, tr.snapshots[i].field, tr.snapshots[i].time, cfg.params);
  }
  json s{{"steps", tr.diagnostics.back().step}, {"snapshots", tr.snapshots.size()}, {"range_ok", tr.range_ok()}};
  // measured vs predicted growth of the tracked mode
  const double lambda = cfg.mode_n == 0 ? 0.0 : disk_mode(cfg.mode_k, cfg.mode_n, BoundaryCondition::neumann).lambda;
  const cplx d = delta_beta(cfg.params);
  const cplx branch = interaction_component(cfg.mode_k) == 2 ? std::conj(d) : d;
  const cplx predicted = -(lambda + branch) -
                         (sc.frame == Frame::rotating ? cplx(0.0, cfg.params.omega * cfg.mode_k) : cplx(0.0));
  s["predicted_rate"] = predicted.real();
  s["predicted_frequency"] = predicted.imag();
  try {
    const GrowthFit fit = fit_growth_rate(tr.amplitude_series(cfg.fit_from));
    s["fitted_rate"] = fit.rate;
    s["fitted_frequency"] = fit.frequency;
  } catch (const Error& e) {
    s["fit_error"] = e.what();
  }
  log.line("simulate: " + std::to_string(tr.diagnostics.back().step) + " steps, range " +
           (tr.range_ok() ? "ok" : "violated"));
  finish(cfg, log, s, tr.range_ok());
  return tr.range_ok() ? 0 : 1;
}

int cmd_rotate_solve(const RunConfig& cfg) {
  RunLog log;
  const ModelParams& p = cfg.params;
  const BifurcationPoint bp = cfg.fixed == "omega" ? bifurcation_point_mu(cfg.k, cfg.n, p.omega, p.alpha, p.gamma)
                                                   : bifurcation_point_omega(cfg.k, cfg.n, p.mu, p.alpha, p.gamma);
  BranchOptions opt;
  opt.n_r = cfg.n_r;
  opt.n_theta = cfg.n_theta;
  opt.strategy = parse_strategy(cfg.strategy);
  const auto pts = branch_continue(bp, cfg.s_values, opt);
  const fs::path out(cfg.out_dir);
  CsvWriter csv({"s", "beta", "mu", "omega", "residual_norm", "symmetry_error", "amplitude", "k_energy_fraction"});
  bool pass = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& b = pts[i];
    csv.add_row({cell(b.s), cell(b.params.beta), cell(b.params.mu), cell(b.params.omega), cell(b.residual_norm),
                 cell(b.symmetry_error), cell(b.amplitude), cell(b.k_energy_fraction)});
    char name[64];
    std::snprintf(name, sizeof name, "branch_%03zu.txt", i);
    write_snapshot(out / name, b.field, 0.0, b.params);
    pass = pass && b.residual_norm < 1e-9 && b.symmetry_error < 1e-8 && range_check(b.field).pass;
  }
  csv.save(out / "branch.csv");
  log.line("rotate-solve: " + std::to_string(pts.size()) + " branch points from beta0 = " +
           std::to_string(bp.params.beta));
  json s{{"beta0", bp.params.beta}, {"mu0", bp.params.mu}, {"omega0", bp.params.omega}, {"points", pts.size()}};
  finish(cfg, log, s, pass);
  return pass ? 0 : 1;
}

int cmd_dirichlet_solve(const RunConfig& cfg) {
  RunLog log;
  ModelParams p = cfg.params;
  p.bc = BoundaryCondition::dirichlet;
  const PolarGrid g = build_grid(cfg.n_r, cfg.n_theta);
  DirichletData data;
  if (cfg.phi_family == "csv") {
    if (cfg.phi_csv.empty() || !fs::exists(cfg.phi_csv))
      throw InvalidArgument("phi_csv file '" + cfg.phi_csv + "' does not exist");
    std::vector<double> phi;
    std::istringstream is(read_file(cfg.phi_csv));
    std::string tok;
    while (is >> tok) {
      std::istringstream row(tok);
      std::string v;
      while (std::getline(row, v, ','))
        if (!v.empty()) phi.push_back(std::stod(v));
    }
    data = DirichletData::from_trace(std::move(phi));
  } else {
    data = DirichletData::cosine(g, cfg.phi_amplitude);
  }
  DirichletOptions opt;
  opt.n_r = cfg.n_r;
  opt.n_theta = cfg.n_theta;
  opt.damping = cfg.damping;
  opt.tolerance = cfg.tolerance;
  const DirichletResult sol = dirichlet_solve(p, data, opt);
  const RangeReport rr = range_check(sol.field);
  const double sym = symmetry_error(sol.field);
  const bool pass = sol.residual_norm < 1e-8 && rr.pass && sym < 1e-8;
  write_snapshot(fs::path(cfg.out_dir) / "solution.txt", sol.field, 0.0, p);
  json s{{"residual_norm", sol.residual_norm}, {"picard_iterations", sol.picard_iterations},
         {"used_newton", sol.used_newton},      {"newton_iterations", sol.newton_iterations},
         {"symmetry_error", sym},               {"min", rr.min},
         {"max", rr.max},                       {"range_ok", rr.pass}};
  log.line("dirichlet-solve: residual " + std::to_string(sol.residual_norm) + " after " +
           std::to_string(sol.picard_iterations) + " Picard iterations");
  finish(cfg, log, s, pass);
  return pass ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  RunLog log;
  json results = json::array();
  bool all = true;
  for (int id : acceptance::suite_criteria(suite)) {
    const auto r = acceptance::run_criterion(id, cfg.seed);
    log.line(acceptance::format_line(r));
    results.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"measurements", r.measurements}});
    all = all && r.pass;
  }
  json s{{"suite", suite}, {"seed", cfg.seed}, {"criteria", results}};
  finish(cfg, log, s, all);
  return all ? 0 : 1;
}

void write_error(const RunConfig* cfg, const std::string& kind, const std::vector<std::string>& messages) {
  json rec{{"error", {{"kind", kind}, {"messages", messages}}}};
  std::cerr << rec.dump() << '\n';
  if (cfg) {
    try {
      write_atomic(fs::path(cfg->out_dir) / "error.json", rec.dump(2) + "\n");
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating spiral waves of three-species cyclic competition on the unit disk"};
  app.require_subcommand(1);
  CommonFlags flags;
  const std::vector<std::pair<std::string, std::string>> subs{
      {"spectrum", "Bessel eigenvalues of the disk Laplacian and the rotating-frame spectrum"},
      {"bifurcate", "Neutral loci, threshold and kernel of the linearised rotating-frame operator"},
      {"simulate", "IMEX time integration in the lab or rotating frame"},
      {"rotate-solve", "Continue the rotating-wave branch away from a bifurcation point"},
      {"dirichlet-solve", "Steady state for inhomogeneous Dirichlet data"},
      {"verify", "Run an acceptance suite"}};
  for (const auto& [name, description] : subs) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", flags.config, "key = value configuration file");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "seed for randomized checks");
    if (name == "verify")
      sub->add_option("--suite", flags.suite, "acceptance suite")->check(CLI::IsMember(acceptance::suite_names()));
  }
  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  std::optional<RunConfig> cfg;
  try {
    cfg = load_config(sub, flags);
    if (sub == "spectrum") return cmd_spectrum(*cfg);
    if (sub == "bifurcate") return cmd_bifurcate(*cfg);
    if (sub == "simulate") return cmd_simulate(*cfg);
    if (sub == "rotate-solve") return cmd_rotate_solve(*cfg);
    if (sub == "dirichlet-solve") return cmd_dirichlet_solve(*cfg);
    return cmd_verify(*cfg, flags.suite);
  } catch (const ConfigError& e) {
    write_error(nullptr, "config", e.errors());
  } catch (const SolverError& e) {
    write_error(cfg ? &*cfg : nullptr, "solver", {e.what()});
  } catch (const std::exception& e) {
    write_error(cfg ? &*cfg : nullptr, "error", {e.what()});
  }
  return 2;
}
