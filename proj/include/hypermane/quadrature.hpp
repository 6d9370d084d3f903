#pragma once

#include <functional>

namespace hypermane {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

/// Adaptive Simpson rule on [a, b] targeting |error| <= rel_tol * |value|.
/// Throws QuadratureError if the recursion depth is exhausted before the target is met.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-10, int max_depth = 48);

/// Integral of a function on [a, b] with 0 < a, where b/a may be huge. Integrates in the
/// logarithmic variable over dyadic blocks so each block is resolved independently.
QuadratureResult integrate_dyadic(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-10);

}  // namespace hypermane
