#pragma once

#include <stdexcept>
#include <string>

namespace rotwave {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter, grid or precondition was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not produce an acceptable answer.
class SolverError : public Error {
 public:
  enum class Kind { singular_system, max_iterations, singular_jacobian, no_convergence, non_finite, locus_empty, scan_exhausted, degenerate, insufficient_range, range_violation };

  SolverError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace rotwave
