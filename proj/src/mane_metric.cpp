#include "hypermane/mane_metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypermane/quadrature.hpp"

namespace hypermane {

namespace {

constexpr double kBoundRelTol = 1e-10;

void require_unit(const Layout& L, const Vec& v, const char* what) {
  if (std::abs(norm(L, v) - 1.0) > 1e-12) throw InputDomainError(std::string(what) + " must have unit norm");
}

}  // namespace

bool ManeEstimate::satisfied() const {
  return lower_satisfied && segment_satisfied.value_or(true) && far_field_satisfied.value_or(true);
}

double segment_potential_integral(const Vec& x, const Vec& y, const PotentialSpec& F) {
  const Layout& L = F.layout();
  const double len = norm(L, y - x);
  if (len == 0.0 || F.is_free()) return 0.0;
  const SegmentClearance c = segment_clearance(L, x, y, false, &F.singular_mask());
  if (c.separation < kNearCollisionCutoff) throw BoundUnavailableError("segment meets a collision");
  const Vec u = (y - x) / len;
  return adaptive_simpson([&](double s) { return F.evaluate(x + s * u, Branch::clamped); }, 0.0, len, kBoundRelTol)
      .value;
}

double segment_upper_bound(const Vec& x, const Vec& y, const PotentialSpec& F, double lambda) {
  if (!(lambda > 0.0)) throw InputDomainError("lambda must be positive");
  const double r = std::sqrt(2.0 * lambda);
  return r * norm(F.layout(), y - x) + segment_potential_integral(x, y, F) / r;
}

ManeEstimate mane_potential(const Vec& x, const Vec& y, const PotentialSpec& F, double lambda,
                            const SolveOptions& opts) {
  if (!(lambda > 0.0)) throw InputDomainError("lambda must be positive");
  const Layout& L = F.layout();
  ManeEstimate est;
  const double gap = norm(L, y - x);
  if (gap == 0.0) return est;
  est.analytic_lower = std::sqrt(2.0 * lambda) * gap;
  est.geodesic = solve_geodesic(x, y, F, lambda, opts);
  est.upper = est.geodesic->action.value;
  est.tolerance = std::max(est.geodesic->action.quadrature_error_estimate, opts.optimizer_tolerance * est.upper);
  est.lower_satisfied = est.upper >= est.analytic_lower - est.tolerance;
  try {
    est.segment_bound = segment_upper_bound(x, y, F, lambda);
    est.segment_satisfied = est.upper <= *est.segment_bound + est.tolerance;
  } catch (const BoundUnavailableError&) {
  }
  return est;
}

FarFieldBound far_field_upper_bound(const Vec& x, const Vec& a, double s, const Vec& b, double T,
                                    const PotentialSpec& F, double lambda, double mane_x_to_base) {
  const Layout& L = F.layout();
  if (!(lambda > 0.0)) throw InputDomainError("lambda must be positive");
  require_unit(L, a, "a");
  require_unit(L, b, "b");
  const double af = min_separation(L, a);
  if (!(af > 0.0)) throw InputDomainError("a must be collision-free");
  if (norm(L, a - b) > af / 20.0 + 1e-12) throw InputDomainError("b lies outside the direction cap");
  if (s < 50.0 * (1.0 + norm(L, x)) / af * (1.0 - 1e-12)) throw InputDomainError("s is below 50(1+|x|)/a_flat");
  if (!(T >= 0.0)) throw InputDomainError("T must be nonnegative");
  const Vec z = x + s * a;
  const double n = L.bodies();
  FarFieldBound out;
  out.travel = T;
  out.base_term = mane_x_to_base / std::sqrt(2.0 * lambda);
  out.envelope_term =
      n * n / (lambda * af) * F.envelope().integral(min_separation(L, z), 2.0 * T + 2.0 * norm(L, z));
  out.value = out.travel + out.base_term + out.envelope_term;
  return out;
}

FarFieldBound far_field_upper_bound(const Vec& x, const Vec& a, double s, const Vec& b, double T,
                                    const PotentialSpec& F, double lambda, const SolveOptions& opts) {
  const Vec z = x + s * a;
  const GeodesicResult g = solve_geodesic(x, z, F, lambda, opts);
  return far_field_upper_bound(x, a, s, b, T, F, lambda, g.action.value);
}

double ray_potential_integral(const Vec& z, const Vec& b, double T, const PotentialSpec& F) {
  if (T <= 0.0 || F.is_free()) return 0.0;
  return adaptive_simpson([&](double s) { return F.evaluate(z + s * b, Branch::clamped); }, 0.0, T, kBoundRelTol)
      .value;
}

double ray_integral_bound(const Vec& z, const Vec& b, double T, double theta, const PotentialSpec& F) {
  const Layout& L = F.layout();
  if (!(theta > 0.0 && theta < M_PI / 2.0)) throw InputDomainError("theta must lie in (0, pi/2)");
  require_unit(L, b, "b");
  const double zf = min_separation(L, z);
  if (zf < 2.0) throw InputDomainError("z_flat must be at least 2");
  const double bf = min_separation(L, b);
  if (!(bf > 0.0)) throw InputDomainError("b must be collision-free");
  const int d = L.dim;
  for (int i = 0; i < L.bodies(); ++i)
    for (int j = i + 1; j < L.bodies(); ++j) {
      const Eigen::VectorXd e = b.segment(i * d, d) - b.segment(j * d, d);
      const Eigen::VectorXd q = z.segment(i * d, d) - z.segment(j * d, d);
      const double c = std::clamp(e.dot(q) / (e.norm() * q.norm()), -1.0, 1.0);
      if (std::acos(c) > theta + 1e-12) throw InputDomainError("pair angle exceeds theta");
    }
  const double n = L.bodies();
  return n * n / (2.0 * std::cos(theta)) / bf * F.envelope().integral(zf, 2.0 * T + 2.0 * norm(L, z));
}

double cap_integral_bound(const Vec& z, const Vec& a, const Vec& b, double T, const PotentialSpec& F) {
  const Layout& L = F.layout();
  require_unit(L, a, "a");
  require_unit(L, b, "b");
  const double af = min_separation(L, a);
  if (!(af > 0.0)) throw InputDomainError("a must be collision-free");
  const double zf = min_separation(L, z);
  if (zf < 2.0) throw InputDomainError("z_flat must be at least 2");
  if (norm(L, z / norm(L, z) - a) > af / 20.0 + 1e-12) throw InputDomainError("z lies outside the direction cap");
  if (norm(L, a - b) > af / 20.0 + 1e-12) throw InputDomainError("b lies outside the direction cap");
  const double n = L.bodies();
  return 2.0 * n * n / af * F.envelope().integral(zf, 2.0 * T + 2.0 * norm(L, z));
}

}  // namespace hypermane
