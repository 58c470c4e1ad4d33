#pragma once

// Flat `key = value` run configuration with `#` comments. Parsing collects
// every problem (unknown key, unparsable value, violated constraint) with its
// line number instead of stopping at the first.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "rotwave/dynamics.hpp"
#include "rotwave/error.hpp"
#include "rotwave/model.hpp"
#include "rotwave/steady.hpp"

namespace rotwave {

class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : InvalidArgument(join(errors)), errors_(std::move(errors)) {}

  [[nodiscard]] const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s;
    for (const auto& x : e) s += (s.empty() ? "" : "; ") + x;
    return s;
  }
  std::vector<std::string> errors_;
};

struct RunConfig {
  std::string subcommand;
  ModelParams params;
  int n_r = 32;
  int n_theta = 36;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  // spectrum
  int k_max = 5;
  int n_max = 5;
  // bifurcate and rotate-solve
  int k = 2;
  int n = 1;
  std::string fixed = "omega";  ///< which of mu / omega is an input of the locus
  double sweep_min = 0.0;
  double sweep_max = 0.0;
  int sweep_count = 0;
  std::vector<double> s_values{2.5e-3, 5e-3, 1e-2, -2.5e-3, -5e-3, -1e-2};
  std::string strategy = "fix_omega_free_beta_mu";
  // simulate
  double dt = 1e-3;
  double t_end = 1.0;
  std::string frame = "lab";
  std::string perturbation = "none";
  double epsilon = 1e-4;
  int mode_k = 0;
  int mode_n = 0;
  int diagnostics_every = 1;
  int snapshot_every = 0;
  bool strict_range = false;
  double fit_from = 0.0;
  // dirichlet-solve
  std::string phi_family = "cosine";
  double phi_amplitude = 0.2;
  std::string phi_csv;
  double damping = 0.5;
  double tolerance = 1e-10;

  std::map<std::string, int> lines;  ///< line number of each key that was set
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& v, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(v, &used);
    return used == v.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

inline bool parse_int(const std::string& v, long long& out) {
  try {
    std::size_t used = 0;
    out = std::stoll(v, &used);
    return used == v.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

[[nodiscard]] inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::vector<std::string> errors;
  std::istringstream is{std::string(text)};
  std::string raw;
  int lineno = 0;
  auto err = [&](int line, const std::string& msg) { errors.push_back("line " + std::to_string(line) + ": " + msg); };

  while (std::getline(is, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (detail::trim(raw).empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) {
      err(lineno, "expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(raw.substr(0, eq));
    const std::string val = detail::trim(raw.substr(eq + 1));
    auto num = [&](double& dst) {
      if (!detail::parse_double(val, dst)) err(lineno, "cannot parse value '" + val + "' for " + key);
    };
    auto integer = [&](auto& dst) {
      long long v = 0;
      if (!detail::parse_int(val, v)) err(lineno, "cannot parse integer '" + val + "' for " + key);
      else dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    };
    auto word = [&](std::string& dst, std::initializer_list<const char*> allowed) {
      for (const char* a : allowed)
        if (val == a) {
          dst = val;
          return;
        }
      err(lineno, "unknown " + key + " '" + val + "'");
    };
    cfg.lines[key] = lineno;

    if (key == "mu") num(cfg.params.mu);
    else if (key == "beta") num(cfg.params.beta);
    else if (key == "alpha") num(cfg.params.alpha);
    else if (key == "gamma") num(cfg.params.gamma);
    else if (key == "omega") num(cfg.params.omega);
    else if (key == "bc") {
      try {
        cfg.params.bc = parse_bc(val);
      } catch (const InvalidArgument&) {
        err(lineno, "unknown bc '" + val + "'");
      }
    } else if (key == "n_r") integer(cfg.n_r);
    else if (key == "n_theta") integer(cfg.n_theta);
    else if (key == "out") cfg.out_dir = val;
    else if (key == "seed") integer(cfg.seed);
    else if (key == "k_max") integer(cfg.k_max);
    else if (key == "n_max") integer(cfg.n_max);
    else if (key == "k") integer(cfg.k);
    else if (key == "n") integer(cfg.n);
    else if (key == "fixed") word(cfg.fixed, {"mu", "omega"});
    else if (key == "sweep_min") num(cfg.sweep_min);
    else if (key == "sweep_max") num(cfg.sweep_max);
    else if (key == "sweep_count") integer(cfg.sweep_count);
    else if (key == "s_values") {
      cfg.s_values.clear();
      std::istringstream list(val);
      std::string item;
      while (std::getline(list, item, ',')) {
        double v = 0.0;
        if (!detail::parse_double(detail::trim(item), v)) err(lineno, "cannot parse s value '" + item + "'");
        else cfg.s_values.push_back(v);
      }
    } else if (key == "strategy") word(cfg.strategy, {"fix_mu_free_beta_omega", "fix_omega_free_beta_mu"});
    else if (key == "dt") num(cfg.dt);
    else if (key == "t_end") num(cfg.t_end);
    else if (key == "frame") word(cfg.frame, {"lab", "rotating"});
    else if (key == "perturbation") word(cfg.perturbation, {"none", "uniform_delta", "kernel", "random"});
    else if (key == "epsilon") num(cfg.epsilon);
    else if (key == "mode_k") integer(cfg.mode_k);
    else if (key == "mode_n") integer(cfg.mode_n);
    else if (key == "diagnostics_every") integer(cfg.diagnostics_every);
    else if (key == "snapshot_every") integer(cfg.snapshot_every);
    else if (key == "strict_range") {
      if (val == "true" || val == "1") cfg.strict_range = true;
      else if (val == "false" || val == "0") cfg.strict_range = false;
      else err(lineno, "cannot parse boolean '" + val + "' for strict_range");
    } else if (key == "fit_from") num(cfg.fit_from);
    else if (key == "phi_family") word(cfg.phi_family, {"cosine", "csv"});
    else if (key == "phi_amplitude") num(cfg.phi_amplitude);
    else if (key == "phi_csv") cfg.phi_csv = val;
    else if (key == "damping") num(cfg.damping);
    else if (key == "tolerance") num(cfg.tolerance);
    else {
      cfg.lines.erase(key);
      err(lineno, "unknown key '" + key + "'");
    }
  }

  auto line_of = [&](std::initializer_list<const char*> keys) {
    int l = 0;
    for (const char* k : keys)
      if (auto it = cfg.lines.find(k); it != cfg.lines.end()) l = std::max(l, it->second);
    return l;
  };
  const ModelParams& p = cfg.params;
  if (!(p.mu > 0.0)) err(line_of({"mu"}), "mu must be positive");
  if (!(p.beta > 0.0)) err(line_of({"beta"}), "beta must be positive");
  if (!(p.gamma > 0.0)) err(line_of({"gamma"}), "gamma must be positive");
  if (!(p.alpha > p.gamma)) err(line_of({"alpha", "gamma"}), "alpha must exceed gamma");
  if (cfg.n_r < 8) err(line_of({"n_r"}), "n_r must be at least 8");
  if (cfg.n_theta < 12 || cfg.n_theta % 6 != 0) err(line_of({"n_theta"}), "n_theta must be a multiple of 6, >= 12");
  if (!(cfg.dt > 0.0)) err(line_of({"dt"}), "dt must be positive");
  if (!(cfg.t_end > 0.0)) err(line_of({"t_end"}), "t_end must be positive");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) err(line_of({"damping"}), "damping must lie in (0, 1]");
  if (!(cfg.tolerance > 0.0)) err(line_of({"tolerance"}), "tolerance must be positive");
  if (cfg.k < 1) err(line_of({"k"}), "k must be positive");
  if (cfg.n < 1) err(line_of({"n"}), "n must be positive");
  if (cfg.diagnostics_every < 1) err(line_of({"diagnostics_every"}), "diagnostics_every must be positive");
  if (cfg.snapshot_every < 0) err(line_of({"snapshot_every"}), "snapshot_every must be non-negative");
  if (cfg.sweep_count < 0) err(line_of({"sweep_count"}), "sweep_count must be non-negative");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

}  // namespace rotwave
