#pragma once

// Angular boundary traces phi_1, phi_2, phi_3 on r = 1. Partners are built by
// exact index rotation: phi_2(theta) = phi_1(theta + 2pi/3), phi_3 likewise.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rotwave/discretization.hpp"
#include "rotwave/error.hpp"

namespace rotwave {

struct DirichletData {
  int n_theta = 0;
  std::array<std::vector<double>, 3> phi;

  /// Builds the three traces from phi_1 sampled at the grid angles.
  [[nodiscard]] static DirichletData from_trace(std::vector<double> phi1) {
    const int n = static_cast<int>(phi1.size());
    if (n < 12 || n % 3 != 0) throw InvalidArgument("DirichletData: trace length must be a multiple of 3, >= 12");
    bool nonzero = false;
    for (double v : phi1) {
      if (!std::isfinite(v) || v < 0.0 || v >= 1.0)
        throw InvalidArgument("DirichletData: boundary values must lie in [0, 1)");
      nonzero = nonzero || v != 0.0;
    }
    if (!nonzero) throw InvalidArgument("DirichletData: phi_1 must not vanish identically");
    DirichletData d;
    d.n_theta = n;
    d.phi[0] = std::move(phi1);
    for (int c = 1; c < 3; ++c) {
      d.phi[c].resize(n);
      for (int m = 0; m < n; ++m) d.phi[c][m] = d.phi[c - 1][(m + n / 3) % n];
    }
    return d;
  }

  /// phi_1(theta) = amplitude (1 + cos theta).
  [[nodiscard]] static DirichletData cosine(const PolarGrid& g, double amplitude) {
    std::vector<double> p(g.n_theta);
    for (int m = 0; m < g.n_theta; ++m) p[m] = amplitude * (1.0 + std::cos(g.thetas[m]));
    return from_trace(std::move(p));
  }

  /// phi_i = value for all i; the constant state t is an equilibrium with this data when value = t.
  [[nodiscard]] static DirichletData uniform(const PolarGrid& g, double value) {
    return from_trace(std::vector<double>(g.n_theta, value));
  }

  void check_grid(const PolarGrid& g) const {
    if (n_theta != g.n_theta) throw InvalidArgument("DirichletData: trace length does not match the grid");
  }

  /// Angular Fourier coefficients of each trace (one ring, n_r = 1).
  [[nodiscard]] std::array<ModeCoefficients, 3> transformed(const PolarGrid& g) const {
    check_grid(g);
    PolarGrid ring = g;
    ring.n_r = 1;
    return {angular_transform(ring, phi[0]), angular_transform(ring, phi[1]), angular_transform(ring, phi[2])};
  }
};

}  // namespace rotwave
