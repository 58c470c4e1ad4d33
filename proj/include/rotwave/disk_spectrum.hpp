#pragma once

// Spectrum of L_omega = -Lap + omega d_theta on the unit disk.
//
// Eigenfunctions are f_{n,k}(r) e^{i k theta} with f_{n,k}(r) = J_k(root r),
// where root is the n-th positive zero of J_k' (Neumann) or J_k (Dirichlet);
// the eigenvalue is root^2 + i omega k. The Neumann constant mode (eigenvalue 0)
// is kept out of band.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rotwave/bessel.hpp"
#include "rotwave/discretization.hpp"
#include "rotwave/error.hpp"
#include "rotwave/model.hpp"

namespace rotwave {

inline constexpr int max_radial_count = 50;
inline constexpr double root_scan_step = 0.1;
inline constexpr double root_tolerance = 1e-13;

struct DiskMode {
  int k = 0;  ///< angular wavenumber, >= 0
  int n = 1;  ///< radial index, 1-based
  double lambda = 0.0;
  BoundaryCondition bc = BoundaryCondition::neumann;
  double root = 0.0;
  double scale = 1.0;  ///< max |J_k(root r)| over r in [0, 1]

  /// J_k(root r) / scale; max |profile| on [0, 1] is 1.
  [[nodiscard]] double profile(double r) const { return bessel_j(k, root * r) / scale; }
  [[nodiscard]] double profile_prime(double r) const { return root * bessel_j_prime(k, root * r) / scale; }
  [[nodiscard]] double profile_second(double r) const {
    return root * root * bessel_j_second(k, root * r) / scale;
  }
};

namespace detail {

inline double radial_condition(int k, double x, BoundaryCondition bc) {
  return bc == BoundaryCondition::neumann ? bessel_j_prime(k, x) : bessel_j(k, x);
}

inline double bisect_root(int k, double lo, double hi, BoundaryCondition bc) {
  double flo = radial_condition(k, lo, bc);
  while (hi - lo > root_tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double fm = radial_condition(k, mid, bc);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> positive_roots(int k, int count, BoundaryCondition bc) {
  // McMahon: roots approach (n + k/2 - 1/4) pi; the bound leaves room for the first-root offset at large k.
  const double bound = std::min(bessel_max_arg, (count + 0.5 * k + 2.0) * pi + 10.0);
  std::vector<double> roots;
  roots.reserve(count);
  double x0 = root_scan_step;
  double f0 = radial_condition(k, x0, bc);
  while (static_cast<int>(roots.size()) < count) {
    const double x1 = x0 + root_scan_step;
    if (x1 > bound)
      throw SolverError(SolverError::Kind::scan_exhausted,
                        "eigenvalues: scan window exhausted before " + std::to_string(count) + " roots (k = " +
                            std::to_string(k) + ")");
    const double f1 = radial_condition(k, x1, bc);
    if (f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) roots.push_back(bisect_root(k, x0, x1, bc));
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

inline double profile_scale(int k) {
  if (k == 0) return 1.0;  // J_0 peaks at the origin
  // For k >= 1 the global max of |J_k| on [0, inf) is at the first zero of J_k'.
  const double first = positive_roots(k, 1, BoundaryCondition::neumann).front();
  return std::abs(bessel_j(k, first));
}

}  // namespace detail

/// The first `count` radial modes of wavenumber k.
[[nodiscard]] inline std::vector<DiskMode> eigenvalues(int k, int count, BoundaryCondition bc) {
  if (k < 0 || k > bessel_max_order) throw InvalidArgument("eigenvalues: k outside [0, 60]");
  if (count < 1 || count > max_radial_count) throw InvalidArgument("eigenvalues: count outside [1, 50]");
  const auto roots = detail::positive_roots(k, count, bc);
  const double scale = detail::profile_scale(k);
  std::vector<DiskMode> modes;
  modes.reserve(count);
  for (int i = 0; i < count; ++i)
    modes.push_back(DiskMode{k, i + 1, roots[i] * roots[i], bc, roots[i], scale});
  return modes;
}

[[nodiscard]] inline DiskMode disk_mode(int k, int n, BoundaryCondition bc) { return eigenvalues(k, n, bc).back(); }

[[nodiscard]] inline double radial_profile(const DiskMode& mode, double r) { return mode.profile(r); }

/// Residual of f'' + f'/r + (lambda - k^2/r^2) f from the Bessel identities.
[[nodiscard]] inline double radial_ode_residual(const DiskMode& mode, double r) {
  const double f = mode.profile(r);
  return mode.profile_second(r) + mode.profile_prime(r) / r + (mode.lambda - double(mode.k) * mode.k / (r * r)) * f;
}

struct SpectrumPoint {
  double re = 0.0;
  double im = 0.0;
  int k = 0;       ///< signed wavenumber
  int n = 0;       ///< radial index; 0 marks the Neumann zero mode
  double root = 0.0;
  [[nodiscard]] bool is_zero_mode() const noexcept { return n == 0; }
};

/// {lambda_n(|k|) + i omega k : |k| <= k_max, n <= n_max}, plus 0 for Neumann.
[[nodiscard]] inline std::vector<SpectrumPoint> l_omega_spectrum(double omega, BoundaryCondition bc, int k_max,
                                                                 int n_max) {
  if (k_max < 0 || k_max > max_radial_count || n_max < 1 || n_max > max_radial_count)
    throw InvalidArgument("l_omega_spectrum: k_max and n_max must lie in [0, 50] and [1, 50]");
  std::vector<SpectrumPoint> pts;
  if (bc == BoundaryCondition::neumann) pts.push_back(SpectrumPoint{0.0, 0.0, 0, 0, 0.0});
  for (int ak = 0; ak <= k_max; ++ak) {
    const auto modes = eigenvalues(ak, n_max, bc);
    for (const auto& md : modes) {
      pts.push_back(SpectrumPoint{md.lambda, omega * ak, ak, md.n, md.root});
      if (ak > 0) pts.push_back(SpectrumPoint{md.lambda, -omega * ak, -ak, md.n, md.root});
    }
  }
  return pts;
}

/// max |(L_omega - lambda - i omega k)(f_{n,k} e^{i k theta})| with L_omega discretised on `grid`.
[[nodiscard]] inline double eigen_residual(const DiskMode& mode, double omega, const PolarGrid& grid) {
  std::vector<double> re(grid.size()), im(grid.size());
  for (int j = 0; j < grid.n_r; ++j) {
    const double f = mode.profile(grid.radii[j]);
    for (int m = 0; m < grid.n_theta; ++m) {
      re[grid.index(j, m)] = f * std::cos(mode.k * grid.thetas[m]);
      im[grid.index(j, m)] = f * std::sin(mode.k * grid.thetas[m]);
    }
  }
  const auto lre = apply_l_omega(grid, re, omega, mode.bc);
  const auto lim = apply_l_omega(grid, im, omega, mode.bc);
  const cplx eig(mode.lambda, omega * mode.k);
  double res = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const cplx v(re[i], im[i]);
    const cplx lv(lre[i], lim[i]);
    res = std::max(res, std::abs(lv - eig * v));
  }
  return res;
}

/// Smallest `count` eigenvalues of the symmetrisable radial tridiagonal (Sturm bisection).
[[nodiscard]] inline std::vector<double> discrete_radial_eigenvalues(const Tridiagonal& op, int count) {
  const int n = op.size();
  if (count < 1 || count > n) throw InvalidArgument("discrete_radial_eigenvalues: bad count");
  // D^{1/2} A D^{-1/2} is symmetric with off-diagonal sqrt(lower[j+1] * upper[j]).
  std::vector<double> off2(n, 0.0);
  for (int j = 0; j + 1 < n; ++j) off2[j] = op.lower[j + 1] * op.upper[j];
  auto count_below = [&](double x) {
    int c = 0;
    double q = op.diag[0] - x;
    if (q < 0.0) ++c;
    for (int j = 1; j < n; ++j) {
      if (q == 0.0) q = 1e-300;
      q = op.diag[j] - x - off2[j - 1] / q;
      if (q < 0.0) ++c;
    }
    return c;
  };
  double hi = 0.0;
  for (int j = 0; j < n; ++j)
    hi = std::max(hi, op.diag[j] + std::abs(op.lower[j]) + std::abs(op.upper[j]));
  const double lo0 = -1.0;
  std::vector<double> ev(count);
  for (int i = 0; i < count; ++i) {
    double lo = lo0, up = hi;
    for (int it = 0; it < 200 && up - lo > 1e-14 * std::max(1.0, std::abs(up)); ++it) {
      const double mid = 0.5 * (lo + up);
      if (count_below(mid) > i) up = mid;
      else lo = mid;
    }
    ev[i] = 0.5 * (lo + up);
  }
  return ev;
}

}  // namespace rotwave
