#pragma once

// Parameters, cyclic reaction terms and the 3x3 interaction-matrix identities
// of the three-species cyclic competition model
//
//   du_1/dt - Lap u_1 = mu u_1 (1 - u_1) - beta alpha u_1 u_2 - beta gamma u_1 u_3
//
// (and its cyclic shifts u_1 -> u_2 -> u_3 -> u_1).

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "rotwave/error.hpp"

namespace rotwave {

using cplx = std::complex<double>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using CMat3 = std::array<std::array<cplx, 3>, 3>;
using Vec3 = std::array<double, 3>;

inline constexpr double sqrt3 = 1.7320508075688772935;
inline constexpr double pi = 3.14159265358979323846;

enum class BoundaryCondition { neumann, dirichlet };

[[nodiscard]] inline std::string_view to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::neumann ? "neumann" : "dirichlet";
}

[[nodiscard]] inline BoundaryCondition parse_bc(std::string_view s) {
  if (s == "neumann" || s == "Neumann" || s == "N") return BoundaryCondition::neumann;
  if (s == "dirichlet" || s == "Dirichlet" || s == "D") return BoundaryCondition::dirichlet;
  throw InvalidArgument("unknown bc '" + std::string(s) + "'");
}

/// How strictly ModelParams::validate treats degenerate values.
enum class Validation {
  strict,     ///< mu > 0, beta > 0, alpha > gamma > 0
  test_mode,  ///< additionally allows mu = 0 and beta = 0 (pure diffusion checks)
};

struct ModelParams {
  double mu = 1.0;
  double beta = 1.0;
  double alpha = 2.0;
  double gamma = 1.0;
  double omega = 0.0;
  BoundaryCondition bc = BoundaryCondition::neumann;

  void validate(Validation mode = Validation::strict) const {
    const bool relaxed = mode == Validation::test_mode;
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(mu) || !finite(beta) || !finite(alpha) || !finite(gamma) || !finite(omega))
      throw InvalidArgument("model parameters must be finite");
    if (relaxed ? mu < 0.0 : mu <= 0.0) throw InvalidArgument("mu must be positive");
    if (relaxed ? beta < 0.0 : beta <= 0.0) throw InvalidArgument("beta must be positive");
    if (gamma <= 0.0) throw InvalidArgument("gamma must be positive");
    if (alpha <= gamma) throw InvalidArgument("alpha must exceed gamma");
  }

  /// Flat `key = value` text, one parameter per line.
  [[nodiscard]] std::string to_config() const {
    std::ostringstream os;
    os.precision(17);
    os << "mu = " << mu << "\nbeta = " << beta << "\nalpha = " << alpha << "\ngamma = " << gamma
       << "\nomega = " << omega << "\nbc = " << to_string(bc) << "\n";
    return os.str();
  }

  /// Inverse of to_config. Unknown keys are rejected; missing keys keep defaults.
  [[nodiscard]] static ModelParams from_config(std::string_view text) {
    ModelParams p;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos)
        throw InvalidArgument("line " + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (key == "bc") {
        p.bc = parse_bc(val);
        continue;
      }
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::exception&) {
        throw InvalidArgument("line " + std::to_string(lineno) + ": cannot parse '" + val + "'");
      }
      if (key == "mu") p.mu = v;
      else if (key == "beta") p.beta = v;
      else if (key == "alpha") p.alpha = v;
      else if (key == "gamma") p.gamma = v;
      else if (key == "omega") p.omega = v;
      else throw InvalidArgument("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return p;
  }
};

/// Positive coexistence state t (1,1,1), t = mu / (mu + beta (alpha + gamma)).
[[nodiscard]] inline double constant_solution(const ModelParams& p) {
  return p.mu / (p.mu + p.beta * (p.alpha + p.gamma));
}

/// Cyclic reaction terms at a single point.
[[nodiscard]] inline Vec3 reaction(const Vec3& u, const ModelParams& p) {
  const double ba = p.beta * p.alpha;
  const double bg = p.beta * p.gamma;
  return {u[0] * (p.mu * (1.0 - u[0]) - ba * u[1] - bg * u[2]),
          u[1] * (p.mu * (1.0 - u[1]) - bg * u[0] - ba * u[2]),
          u[2] * (p.mu * (1.0 - u[2]) - ba * u[0] - bg * u[1])};
}

/// d reaction_i / d u_j at a single point.
[[nodiscard]] inline Mat3 reaction_jacobian(const Vec3& u, const ModelParams& p) {
  const double ba = p.beta * p.alpha;
  const double bg = p.beta * p.gamma;
  Mat3 j{};
  j[0] = {p.mu * (1.0 - 2.0 * u[0]) - ba * u[1] - bg * u[2], -ba * u[0], -bg * u[0]};
  j[1] = {-bg * u[1], p.mu * (1.0 - 2.0 * u[1]) - bg * u[0] - ba * u[2], -ba * u[1]};
  j[2] = {-ba * u[2], -bg * u[2], p.mu * (1.0 - 2.0 * u[2]) - ba * u[0] - bg * u[1]};
  return j;
}

/// The circulant matrix with rows (mu, tau, delta), (delta, mu, tau), (tau, delta, mu).
struct CyclicMatrix {
  double mu_diag = 0.0;
  double tau = 0.0;
  double delta = 0.0;

  [[nodiscard]] Mat3 dense() const {
    return Mat3{{{mu_diag, tau, delta}, {delta, mu_diag, tau}, {tau, delta, mu_diag}}};
  }
};

/// Linearised interaction matrix at the constant state is t * interaction_matrix(p).
[[nodiscard]] inline CyclicMatrix interaction_matrix(const ModelParams& p) {
  return {p.mu, p.beta * p.alpha, p.beta * p.gamma};
}

struct CyclicEigs {
  double row_sum = 0.0;  ///< eigenvalue of (1,1,1)
  cplx m;                ///< (2mu - tau - delta)/2 + i sqrt(3)(tau - delta)/2
  cplx m_conj;
  /// tau == delta: the pair collapses to the real value mu - tau.
  bool degenerate_pair = false;
};

[[nodiscard]] inline CyclicEigs cyclic_eigs(const CyclicMatrix& a) {
  CyclicEigs e;
  e.row_sum = a.mu_diag + a.tau + a.delta;
  e.m = cplx((2.0 * a.mu_diag - a.tau - a.delta) / 2.0, sqrt3 * (a.tau - a.delta) / 2.0);
  e.m_conj = std::conj(e.m);
  e.degenerate_pair = a.tau == a.delta;
  return e;
}

/// Columns are eigenvectors of every CyclicMatrix: (1,1,1), then the m and conj(m) vectors.
[[nodiscard]] inline CMat3 s_matrix() {
  const cplx w(-0.5, sqrt3 / 2.0);
  const cplx wb = std::conj(w);
  return CMat3{{{cplx(1.0), w, wb}, {cplx(1.0), wb, w}, {cplx(1.0), cplx(1.0), cplx(1.0)}}};
}

[[nodiscard]] inline CMat3 s_inverse() {
  const cplx a(-1.0, -sqrt3);
  const cplx b(-1.0, sqrt3);
  const double s = 1.0 / 6.0;
  return CMat3{{{cplx(2.0 * s), cplx(2.0 * s), cplx(2.0 * s)},
                {a * s, b * s, cplx(2.0 * s)},
                {b * s, a * s, cplx(2.0 * s)}}};
}

/// Determinant of M(x): (alpha^3 + gamma^3) x^3 - 3 alpha gamma mu x^2 + mu^3.
[[nodiscard]] inline double coupling_det(double x, const ModelParams& p) {
  const double a3g3 = p.alpha * p.alpha * p.alpha + p.gamma * p.gamma * p.gamma;
  return ((a3g3 * x - 3.0 * p.alpha * p.gamma * p.mu) * x) * x + p.mu * p.mu * p.mu;
}

/// M(beta) = CyclicMatrix{mu, beta alpha, beta gamma} as a dense matrix.
[[nodiscard]] inline Mat3 interaction_dense(double beta, const ModelParams& p) {
  return CyclicMatrix{p.mu, beta * p.alpha, beta * p.gamma}.dense();
}

/// M(beta)^{-1} from the closed cofactor formula.
[[nodiscard]] inline Mat3 inverse_interaction(double beta, const ModelParams& p) {
  if (!(beta >= 0.0)) throw InvalidArgument("inverse_interaction: beta must be non-negative");
  const double mu = p.mu, a = p.alpha, g = p.gamma;
  const double det = coupling_det(beta, p);
  const Mat3 m = interaction_dense(beta, p);
  double norm = 0.0;
  for (const auto& row : m)
    norm = std::max(norm, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
  if (std::abs(det) <= 1e-12 * norm * norm * norm)
    throw SolverError(SolverError::Kind::degenerate, "inverse_interaction: M(beta) is numerically singular");
  const double d = mu * mu - a * g * beta * beta;
  const double e = g * g * beta * beta - a * mu * beta;
  const double f = a * a * beta * beta - g * mu * beta;
  Mat3 inv{{{d, e, f}, {f, d, e}, {e, f, d}}};
  for (auto& row : inv)
    for (auto& v : row) v /= det;
  return inv;
}

[[nodiscard]] inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

[[nodiscard]] inline CMat3 matmul(const CMat3& a, const CMat3& b) {
  CMat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

[[nodiscard]] inline CMat3 to_complex(const Mat3& a) {
  CMat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[i][j] = a[i][j];
  return c;
}

}  // namespace rotwave
