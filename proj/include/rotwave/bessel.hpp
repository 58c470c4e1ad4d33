#pragma once

// Bessel functions of the first kind J_k for integer k >= 0.
//
// Small arguments use the ascending power series; larger ones use Miller's
// downward recurrence normalised by J_0 + 2 sum_{m>=1} J_{2m} = 1.

#include <algorithm>
#include <cmath>
#include <string>

#include "rotwave/error.hpp"

namespace rotwave {

inline constexpr int bessel_max_order = 60;
/// Inputs are accepted on [0, bessel_max_arg]; 1e-12 absolute accuracy is held on [0, 100].
inline constexpr double bessel_max_arg = 500.0;

namespace detail {

inline constexpr double bessel_series_crossover = 8.0;

inline double bessel_series(int k, double x) {
  const double half = 0.5 * x;
  const double q = half * half;
  double term = 1.0;
  for (int i = 1; i <= k; ++i) term *= half / i;
  double sum = term;
  for (int m = 0; m < 300; ++m) {
    term *= -q / ((m + 1.0) * (m + 1.0 + k));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum) && m > 2) break;
  }
  return sum;
}

inline double bessel_miller(int k, double x) {
  const int top = std::max(k, static_cast<int>(std::ceil(x)));
  const int start = 2 * ((top + static_cast<int>(std::sqrt(160.0 * top)) + 30) / 2);
  constexpr double big = 1e250;
  constexpr double small = 1e-250;
  double next = 0.0;  // a_{j+1}
  double cur = 1.0;   // a_j, unnormalised
  double even_sum = (start % 2 == 0) ? cur : 0.0;
  double target = (start == k) ? cur : 0.0;
  for (int j = start; j >= 1; --j) {
    const double prev = (2.0 * j / x) * cur - next;
    next = cur;
    cur = prev;
    const int idx = j - 1;
    if (idx == k) target = cur;
    if (idx >= 2 && idx % 2 == 0) even_sum += cur;
    if (std::abs(cur) > big) {
      cur *= small;
      next *= small;
      target *= small;
      even_sum *= small;
    }
  }
  return target / (cur + 2.0 * even_sum);
}

/// J_k for any integer order (negative orders via J_{-m} = (-1)^m J_m), no window checks.
inline double bessel_j_any(int k, double x) {
  if (k < 0) return (k % 2 == 0 ? 1.0 : -1.0) * bessel_j_any(-k, x);
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  return x <= bessel_series_crossover ? bessel_series(k, x) : bessel_miller(k, x);
}

inline void check_window(int k, double x) {
  if (k < 0 || k > bessel_max_order)
    throw InvalidArgument("bessel_j: order " + std::to_string(k) + " outside [0, 60]");
  if (!(x >= 0.0) || x > bessel_max_arg)
    throw InvalidArgument("bessel_j: argument " + std::to_string(x) + " outside supported window");
}

}  // namespace detail

[[nodiscard]] inline double bessel_j(int k, double x) {
  detail::check_window(k, x);
  return detail::bessel_j_any(k, x);
}

/// J_k'(x) = (J_{k-1}(x) - J_{k+1}(x)) / 2.
[[nodiscard]] inline double bessel_j_prime(int k, double x) {
  detail::check_window(k, x);
  return 0.5 * (detail::bessel_j_any(k - 1, x) - detail::bessel_j_any(k + 1, x));
}

/// J_k''(x) = (J_{k-2}(x) - 2 J_k(x) + J_{k+2}(x)) / 4.
[[nodiscard]] inline double bessel_j_second(int k, double x) {
  detail::check_window(k, x);
  return 0.25 * (detail::bessel_j_any(k - 2, x) - 2.0 * detail::bessel_j_any(k, x) +
                 detail::bessel_j_any(k + 2, x));
}

}  // namespace rotwave
