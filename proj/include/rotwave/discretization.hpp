#pragma once

// Polar grid on the unit disk: cell-centred finite volumes in r, Fourier
// collocation in theta. Fields are stored row-major, one row per radius.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rotwave/error.hpp"
#include "rotwave/model.hpp"

namespace rotwave {

struct PolarGrid {
  int n_r = 0;
  int n_theta = 0;
  double h = 0.0;
  std::vector<double> radii;   ///< r_j = (j + 1/2) h
  std::vector<double> thetas;  ///< 2 pi m / n_theta

  [[nodiscard]] int size() const noexcept { return n_r * n_theta; }
  [[nodiscard]] int index(int j, int m) const noexcept { return j * n_theta + m; }
  [[nodiscard]] double dtheta() const noexcept { return 2.0 * pi / n_theta; }
  /// Quadrature weight of the cell around (r_j, theta_m).
  [[nodiscard]] double area_weight(int j) const noexcept { return radii[j] * h * dtheta(); }
  /// Index shift realising the rotation by 2 pi / 3.
  [[nodiscard]] int third_turn() const noexcept { return n_theta / 3; }
  /// Largest wavenumber represented without aliasing.
  [[nodiscard]] int k_resolved() const noexcept { return n_theta / 2 - 1; }

  friend bool operator==(const PolarGrid& a, const PolarGrid& b) {
    return a.n_r == b.n_r && a.n_theta == b.n_theta;
  }
};

[[nodiscard]] inline PolarGrid build_grid(int n_r, int n_theta) {
  if (n_r < 8) throw InvalidArgument("build_grid: n_r must be at least 8");
  if (n_theta < 12) throw InvalidArgument("build_grid: n_theta must be at least 12");
  if (n_theta % 3 != 0)
    throw InvalidArgument("build_grid: n_theta = " + std::to_string(n_theta) + " not divisible by 3");
  if (n_theta % 2 != 0)
    throw InvalidArgument("build_grid: n_theta = " + std::to_string(n_theta) + " must be even");
  PolarGrid g;
  g.n_r = n_r;
  g.n_theta = n_theta;
  g.h = 1.0 / n_r;
  g.radii.resize(n_r);
  g.thetas.resize(n_theta);
  for (int j = 0; j < n_r; ++j) g.radii[j] = (j + 0.5) * g.h;
  for (int m = 0; m < n_theta; ++m) g.thetas[m] = 2.0 * pi * m / n_theta;
  return g;
}

/// Three scalar fields (u_1, u_2, u_3) on a common grid.
struct TriField {
  PolarGrid grid;
  std::array<std::vector<double>, 3> data;

  TriField() = default;
  explicit TriField(PolarGrid g, double value = 0.0) : grid(std::move(g)) {
    for (auto& c : data) c.assign(grid.size(), value);
  }

  [[nodiscard]] double& at(int c, int j, int m) { return data[c][grid.index(j, m)]; }
  [[nodiscard]] double at(int c, int j, int m) const { return data[c][grid.index(j, m)]; }

  [[nodiscard]] bool all_finite() const {
    for (const auto& c : data)
      for (double v : c)
        if (!std::isfinite(v)) return false;
    return true;
  }

  TriField& operator+=(const TriField& o) {
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < data[c].size(); ++i) data[c][i] += o.data[c][i];
    return *this;
  }
  TriField& operator-=(const TriField& o) {
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < data[c].size(); ++i) data[c][i] -= o.data[c][i];
    return *this;
  }
  TriField& operator*=(double s) {
    for (auto& c : data)
      for (double& v : c) v *= s;
    return *this;
  }
  friend TriField operator+(TriField a, const TriField& b) { return a += b; }
  friend TriField operator-(TriField a, const TriField& b) { return a -= b; }
  friend TriField operator*(double s, TriField a) { return a *= s; }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (const auto& c : data)
      for (double v : c) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Area-weighted L2 inner product of two scalar fields.
[[nodiscard]] inline double inner(const PolarGrid& g, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (int j = 0; j < g.n_r; ++j) {
    double row = 0.0;
    for (int m = 0; m < g.n_theta; ++m) row += a[g.index(j, m)] * b[g.index(j, m)];
    s += row * g.area_weight(j);
  }
  return s;
}

[[nodiscard]] inline double inner(const TriField& a, const TriField& b) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += inner(a.grid, a.data[c], b.data[c]);
  return s;
}

[[nodiscard]] inline double norm(const TriField& a) { return std::sqrt(inner(a, a)); }

// ---------------------------------------------------------------------------
// Angular Fourier decomposition

/// Per signed wavenumber k in [-n_theta/2, n_theta/2), a complex radial vector.
struct ModeCoefficients {
  int n_r = 0;
  int n_theta = 0;
  std::vector<cplx> values;  ///< slot-major: values[slot * n_r + j]

  ModeCoefficients() = default;
  ModeCoefficients(int nr, int nt) : n_r(nr), n_theta(nt), values(static_cast<std::size_t>(nr) * nt) {}

  [[nodiscard]] static int wavenumber_of_slot(int slot, int n_theta) noexcept {
    return slot < n_theta / 2 ? slot : slot - n_theta;
  }
  [[nodiscard]] int slot_of(int k) const noexcept { return ((k % n_theta) + n_theta) % n_theta; }
  [[nodiscard]] bool is_nyquist(int k) const noexcept { return slot_of(k) == n_theta / 2; }

  [[nodiscard]] std::span<cplx> mode(int k) {
    return {values.data() + static_cast<std::size_t>(slot_of(k)) * n_r, static_cast<std::size_t>(n_r)};
  }
  [[nodiscard]] std::span<const cplx> mode(int k) const {
    return {values.data() + static_cast<std::size_t>(slot_of(k)) * n_r, static_cast<std::size_t>(n_r)};
  }
};

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> e;
    e.SetFlag(Eigen::FFT<double>::Unscaled);
    return e;
  }();
  return engine;
}

}  // namespace detail

/// c_k(r_j) = (1/n_theta) sum_m u(r_j, theta_m) e^{-i k theta_m}.
[[nodiscard]] inline ModeCoefficients angular_transform(const PolarGrid& g, std::span<const double> u) {
  ModeCoefficients out(g.n_r, g.n_theta);
  auto& fft = detail::fft_engine();
  std::vector<cplx> ring(g.n_theta), spec(g.n_theta);
  const double scale = 1.0 / g.n_theta;
  for (int j = 0; j < g.n_r; ++j) {
    for (int m = 0; m < g.n_theta; ++m) ring[m] = u[g.index(j, m)];
    fft.fwd(spec, ring);
    for (int s = 0; s < g.n_theta; ++s) out.values[static_cast<std::size_t>(s) * g.n_r + j] = spec[s] * scale;
  }
  return out;
}

/// Inverse of angular_transform; returns the real part (exact for conjugate-symmetric input).
[[nodiscard]] inline std::vector<double> angular_inverse(const PolarGrid& g, const ModeCoefficients& c) {
  std::vector<double> u(g.size());
  auto& fft = detail::fft_engine();
  std::vector<cplx> ring(g.n_theta), spec(g.n_theta);
  for (int j = 0; j < g.n_r; ++j) {
    for (int s = 0; s < g.n_theta; ++s) spec[s] = c.values[static_cast<std::size_t>(s) * g.n_r + j];
    fft.inv(ring, spec);
    for (int m = 0; m < g.n_theta; ++m) u[g.index(j, m)] = ring[m].real();
  }
  return u;
}

// ---------------------------------------------------------------------------
// Radial operator

/// Tridiagonal discretisation of -(1/r)(r u')' + (k^2/r^2) u on cell centres.
struct Tridiagonal {
  int k = 0;
  BoundaryCondition bc = BoundaryCondition::neumann;
  std::vector<double> lower, diag, upper;
  /// Dirichlet: coefficient b of the boundary value in the last row, L u = A u - b g.
  double boundary_weight = 0.0;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(diag.size()); }

  template <class T>
  [[nodiscard]] std::vector<T> apply(std::span<const T> u) const {
    const int n = size();
    std::vector<T> out(n);
    for (int j = 0; j < n; ++j) {
      T v = diag[j] * u[j];
      if (j > 0) v += lower[j] * u[j - 1];
      if (j + 1 < n) v += upper[j] * u[j + 1];
      out[j] = v;
    }
    return out;
  }
};

[[nodiscard]] inline Tridiagonal radial_operator(int k, BoundaryCondition bc, const PolarGrid& g) {
  if (std::abs(k) > g.n_theta / 2)
    throw InvalidArgument("radial_operator: |k| exceeds n_theta/2");
  Tridiagonal t;
  t.k = k;
  t.bc = bc;
  const int n = g.n_r;
  const double h2 = g.h * g.h;
  t.lower.assign(n, 0.0);
  t.diag.assign(n, 0.0);
  t.upper.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double r = g.radii[j];
    const double r_in = j * g.h;         // face r_{j-1/2}; zero flux at the origin face
    const double r_out = (j + 1) * g.h;  // face r_{j+1/2}
    if (j > 0) {
      t.lower[j] = -r_in / (r * h2);
      t.diag[j] += r_in / (r * h2);
    }
    if (j + 1 < n) {
      t.upper[j] = -r_out / (r * h2);
      t.diag[j] += r_out / (r * h2);
    } else if (bc == BoundaryCondition::dirichlet) {
      // ghost u_n = 2 g - u_{n-1}
      t.diag[j] += 2.0 * r_out / (r * h2);
      t.boundary_weight = 2.0 * r_out / (r * h2);
    }
    t.diag[j] += static_cast<double>(k) * k / (r * r);
  }
  return t;
}

/// Solves (op + shift) u = rhs + boundary_weight * g by Thomas elimination.
[[nodiscard]] inline std::vector<cplx> helmholtz_solve(const Tridiagonal& op, cplx shift, std::span<const cplx> rhs,
                                                       cplx boundary_value = 0.0) {
  const int n = op.size();
  if (static_cast<int>(rhs.size()) != n) throw InvalidArgument("helmholtz_solve: size mismatch");
  if (op.k == 0 && op.bc == BoundaryCondition::neumann && shift == cplx(0.0))
    throw SolverError(SolverError::Kind::singular_system, "helmholtz_solve: singular system (Neumann, k = 0, shift = 0)");
  if (shift.real() < 0.0) throw InvalidArgument("helmholtz_solve: shift must have non-negative real part");
  std::vector<cplx> c(n), d(n);
  cplx b0 = op.diag[0] + shift;
  cplx r_last = (n - 1 == 0) ? rhs[0] + op.boundary_weight * boundary_value : rhs[0];
  c[0] = op.upper[0] / b0;
  d[0] = r_last / b0;
  for (int j = 1; j < n; ++j) {
    cplx r = rhs[j];
    if (j == n - 1) r += op.boundary_weight * boundary_value;
    const cplx m = op.diag[j] + shift - op.lower[j] * c[j - 1];
    if (std::abs(m) < 1e-300) throw SolverError(SolverError::Kind::singular_system, "helmholtz_solve: zero pivot");
    c[j] = op.upper[j] / m;
    d[j] = (r - op.lower[j] * d[j - 1]) / m;
  }
  std::vector<cplx> u(n);
  u[n - 1] = d[n - 1];
  for (int j = n - 2; j >= 0; --j) u[j] = d[j] - c[j] * u[j + 1];
  return u;
}

[[nodiscard]] inline std::vector<cplx> helmholtz_solve(int k, cplx shift, std::span<const cplx> rhs, BoundaryCondition bc,
                                                       cplx boundary_value, const PolarGrid& g) {
  return helmholtz_solve(radial_operator(k, bc, g), shift, rhs, boundary_value);
}

/// Precomputed radial operators for every wavenumber slot of a grid.
class RadialOperators {
 public:
  RadialOperators(const PolarGrid& g, BoundaryCondition bc) : bc_(bc) {
    ops_.reserve(g.n_theta);
    for (int s = 0; s < g.n_theta; ++s)
      ops_.push_back(radial_operator(ModeCoefficients::wavenumber_of_slot(s, g.n_theta), bc, g));
  }
  [[nodiscard]] const Tridiagonal& slot(int s) const { return ops_[s]; }
  [[nodiscard]] BoundaryCondition bc() const noexcept { return bc_; }

 private:
  BoundaryCondition bc_;
  std::vector<Tridiagonal> ops_;
};

/// Angular drift eigenvalue i k for slot s; zero at the Nyquist slot so real fields stay real.
[[nodiscard]] inline double drift_wavenumber(int slot, int n_theta) noexcept {
  return slot == n_theta / 2 ? 0.0 : static_cast<double>(ModeCoefficients::wavenumber_of_slot(slot, n_theta));
}

/// L_omega u = -Lap u + omega d_theta u. For Dirichlet, `boundary` holds u(1, theta_m).
[[nodiscard]] inline std::vector<double> apply_l_omega(const PolarGrid& g, std::span<const double> u, double omega,
                                                       BoundaryCondition bc,
                                                       std::optional<std::span<const double>> boundary = std::nullopt) {
  ModeCoefficients c = angular_transform(g, u);
  std::optional<ModeCoefficients> gb;
  if (bc == BoundaryCondition::dirichlet && boundary) {
    PolarGrid ring = g;
    ring.n_r = 1;
    gb = angular_transform(ring, *boundary);
  }
  for (int s = 0; s < g.n_theta; ++s) {
    const int k = ModeCoefficients::wavenumber_of_slot(s, g.n_theta);
    const Tridiagonal op = radial_operator(k, bc, g);
    auto mode = c.mode(k);
    std::vector<cplx> out = op.apply<cplx>(mode);
    const cplx drift(0.0, omega * drift_wavenumber(s, g.n_theta));
    for (int j = 0; j < g.n_r; ++j) out[j] += drift * mode[j];
    if (gb) out[g.n_r - 1] -= op.boundary_weight * gb->values[s];
    std::copy(out.begin(), out.end(), mode.begin());
  }
  return angular_inverse(g, c);
}

// ---------------------------------------------------------------------------
// Rotations

/// v(r, theta_m) = u(r, theta_{m + shift}).
[[nodiscard]] inline std::vector<double> rotate_indices(const PolarGrid& g, std::span<const double> u, int shift) {
  std::vector<double> v(u.size());
  const int n = g.n_theta;
  for (int j = 0; j < g.n_r; ++j)
    for (int m = 0; m < n; ++m) v[g.index(j, m)] = u[g.index(j, (((m + shift) % n) + n) % n)];
  return v;
}

/// v(r, theta) = u(r, theta + angle) by spectral interpolation.
[[nodiscard]] inline std::vector<double> rotate_by_angle(const PolarGrid& g, std::span<const double> u, double angle) {
  ModeCoefficients c = angular_transform(g, u);
  for (int s = 0; s < g.n_theta; ++s) {
    const double k = drift_wavenumber(s, g.n_theta);
    const cplx f = std::polar(1.0, k * angle);
    for (auto& v : c.mode(ModeCoefficients::wavenumber_of_slot(s, g.n_theta))) v *= f;
  }
  return angular_inverse(g, c);
}

/// Maximum defect of u_2(x) = u_1(R x), u_3(x) = u_2(R x), R the third turn.
[[nodiscard]] inline double symmetry_error(const TriField& f) {
  const PolarGrid& g = f.grid;
  if (g.n_theta % 3 != 0) throw InvalidArgument("symmetry_error: n_theta must be divisible by 3");
  const int s = g.third_turn();
  double err = 0.0;
  for (int j = 0; j < g.n_r; ++j)
    for (int m = 0; m < g.n_theta; ++m) {
      const int mr = (m + s) % g.n_theta;
      err = std::max(err, std::abs(f.at(1, j, m) - f.at(0, j, mr)));
      err = std::max(err, std::abs(f.at(2, j, m) - f.at(1, j, mr)));
    }
  return err;
}

/// Cyclic shift (u_1, u_2, u_3) -> (u_2, u_3, u_1) combined with the third-turn rotation.
[[nodiscard]] inline TriField cyclic_shift_rotate(const TriField& f) {
  TriField out(f.grid);
  const int s = f.grid.third_turn();
  for (int c = 0; c < 3; ++c) out.data[c] = rotate_indices(f.grid, f.data[(c + 1) % 3], -s);
  return out;
}

}  // namespace rotwave
