#pragma once

#include <stdexcept>
#include <string>

namespace hypermane {

/// Raised when an operation receives arguments outside its domain.
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a potential is evaluated at (or too close to) a collision.
class SingularEvaluationError : public std::runtime_error {
 public:
  SingularEvaluationError(int i, int j, double separation);
  int first() const { return i_; }
  int second() const { return j_; }
  double separation() const { return separation_; }

 private:
  int i_;
  int j_;
  double separation_;
};

/// Raised when no collision-free path could be set up between two endpoints.
class CollisionObstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an integration is stopped by a near-collision where the caller required a full run.
class CollisionStopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an analytic bound does not apply (e.g. the segment meets a collision).
class BoundUnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an envelope series or integral diverges.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when adaptive quadrature cannot reach its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hypermane
