#pragma once

#include <optional>

#include "hypermane/geodesic_solver.hpp"

namespace hypermane {

/// One-sided estimate of the Mane potential m_lambda(x, y) with analytic certificates.
struct ManeEstimate {
  double upper = 0.0;
  double analytic_lower = 0.0;
  std::optional<double> segment_bound;
  std::optional<double> far_field_bound;
  /// Tolerance used when comparing against the bounds.
  double tolerance = 0.0;
  bool lower_satisfied = true;
  std::optional<bool> segment_satisfied;
  std::optional<bool> far_field_satisfied;
  std::optional<GeodesicResult> geodesic;

  bool satisfied() const;
};

ManeEstimate mane_potential(const Vec& x, const Vec& y, const PotentialSpec& F, double lambda,
                            const SolveOptions& opts = {});

/// Integral of the clamped potential along the straight segment from x to y (mass-norm arclength).
double segment_potential_integral(const Vec& x, const Vec& y, const PotentialSpec& F);

/// sqrt(2 lambda)|y-x| + (1/sqrt(2 lambda)) * integral of F along [x, y], in action units.
/// Throws BoundUnavailableError when the closed segment meets a collision.
double segment_upper_bound(const Vec& x, const Vec& y, const PotentialSpec& F, double lambda);

struct FarFieldBound {
  /// Total bound in length units.
  double value = 0.0;
  double travel = 0.0;         // T
  double base_term = 0.0;      // m(x, x+sa) / sqrt(2 lambda)
  double envelope_term = 0.0;  // N^2 / (lambda a_flat) * integral of f
};

/// T + m(x,x+sa)/sqrt(2 lambda) + N^2/(lambda a_flat) * integral of f over [(x+sa)_flat, 2T+2|x+sa|],
/// with m(x, x+sa) replaced by the supplied upper estimate.
FarFieldBound far_field_upper_bound(const Vec& x, const Vec& a, double s, const Vec& b, double T,
                                    const PotentialSpec& F, double lambda, double mane_x_to_base);
/// Same, estimating m(x, x+sa) with the solver.
FarFieldBound far_field_upper_bound(const Vec& x, const Vec& a, double s, const Vec& b, double T,
                                    const PotentialSpec& F, double lambda, const SolveOptions& opts);

/// Integral of the clamped potential along the ray z + s b for s in [0, T].
double ray_potential_integral(const Vec& z, const Vec& b, double T, const PotentialSpec& F);

/// (N^2 / (2 cos theta)) (1/b_flat) * integral of f over [z_flat, 2T + 2|z|], valid when z_flat >= 2 and
/// every pair angle between b_i - b_j and z_i - z_j is at most theta < pi/2.
double ray_integral_bound(const Vec& z, const Vec& b, double T, double theta, const PotentialSpec& F);

/// 2 N^2 (1/a_flat) * integral of f over [z_flat, 2T + 2|z|], valid when z_flat >= 2,
/// |z/|z| - a| <= a_flat/20 and |a - b| <= a_flat/20.
double cap_integral_bound(const Vec& z, const Vec& a, const Vec& b, double T, const PotentialSpec& F);

}  // namespace hypermane
