#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cstraj {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A trajectory coordinate became inf/nan during integration.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// An iterative search exhausted its budget. Carries best-so-far state.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double best_x1, double best_p1,
                     double best_distance, int iterations)
      : Error(what),
        best_x1_(best_x1),
        best_p1_(best_p1),
        best_distance_(best_distance),
        iterations_(iterations) {}
  explicit NoConvergenceError(const std::string& what) : Error(what) {}

  double best_x1() const { return best_x1_; }
  double best_p1() const { return best_p1_; }
  double best_distance() const { return best_distance_; }
  int iterations() const { return iterations_; }

 private:
  double best_x1_ = 0.0;
  double best_p1_ = 0.0;
  double best_distance_ = -1.0;
  int iterations_ = 0;
};

// |d2S/du'dv''| is too small: the semiclassical prefactor diverges.
class CausticError : public Error {
 public:
  using Error::Error;
};

// Adjacent phases along a sweep jump by more than pi/2; the T grid is too
// coarse to track the branch.
class DiscontinuityError : public Error {
 public:
  using Error::Error;
};

// Degenerate input to a phase computation (a = b = 0).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Coherent width does not match the closed-form oscillator width.
class WidthMismatchError : public Error {
 public:
  using Error::Error;
};

// Invalid argument to a constructor or operation.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace cstraj
