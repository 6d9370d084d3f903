#include "hypermane/config_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hypermane {

SingularEvaluationError::SingularEvaluationError(int i, int j, double separation)
    : std::runtime_error("singular evaluation: bodies " + std::to_string(i) + " and " +
                         std::to_string(j) + " at separation " + std::to_string(separation)),
      i_(i),
      j_(j),
      separation_(separation) {}

double Layout::total_mass() const {
  double m = 0.0;
  for (double v : masses) m += v;
  return m;
}

bool Layout::unit_masses() const {
  return std::all_of(masses.begin(), masses.end(), [](double m) { return m == 1.0; });
}

void Layout::validate() const {
  if (dim < 2) throw InputDomainError("dimension must be at least 2");
  if (bodies() < 2) throw InputDomainError("at least two bodies are required");
  for (double m : masses)
    if (!(m > 0.0) || !std::isfinite(m)) throw InputDomainError("masses must be positive and finite");
}

double inner(const Layout& layout, const Vec& a, const Vec& b) {
  const int d = layout.dim;
  double s = 0.0;
  for (int i = 0; i < layout.bodies(); ++i)
    s += layout.masses[i] * a.segment(i * d, d).dot(b.segment(i * d, d));
  return s;
}

double norm(const Layout& layout, const Vec& a) { return std::sqrt(inner(layout, a, a)); }

double angle_between(const Layout& layout, const Vec& a, const Vec& b) {
  const double na = norm(layout, a);
  const double nb = norm(layout, b);
  if (na == 0.0 || nb == 0.0) throw InputDomainError("angle with a zero configuration is undefined");
  const double c = std::clamp(inner(layout, a, b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

double pair_distance(const Layout& layout, const Vec& x, int i, int j) {
  const int d = layout.dim;
  return (x.segment(i * d, d) - x.segment(j * d, d)).norm();
}

double min_separation(const Layout& layout, const Vec& x, int& bi, int& bj) {
  double best = std::numeric_limits<double>::infinity();
  bi = bj = -1;
  for (int i = 0; i < layout.bodies(); ++i)
    for (int j = i + 1; j < layout.bodies(); ++j) {
      const double r = pair_distance(layout, x, i, j);
      if (r < best) {
        best = r;
        bi = i;
        bj = j;
      }
    }
  return best;
}

double min_separation(const Layout& layout, const Vec& x) {
  int i, j;
  return min_separation(layout, x, i, j);
}

Configuration::Configuration(Layout layout, Vec coords) : layout_(std::move(layout)), coords_(std::move(coords)) {
  layout_.validate();
  if (coords_.size() != layout_.size()) throw InputDomainError("coordinate vector has the wrong length");
  if (!coords_.allFinite()) throw InputDomainError("coordinates must be finite");
}

Configuration Configuration::from_bodies(int dim, std::vector<double> masses,
                                         const std::vector<std::vector<double>>& bodies) {
  if (bodies.size() != masses.size()) throw InputDomainError("body count does not match mass count");
  Vec c(static_cast<Eigen::Index>(dim * bodies.size()));
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (static_cast<int>(bodies[i].size()) != dim) throw InputDomainError("body has the wrong dimension");
    for (int k = 0; k < dim; ++k) c[static_cast<Eigen::Index>(i) * dim + k] = bodies[i][k];
  }
  return Configuration(Layout{dim, std::move(masses)}, std::move(c));
}

Configuration Configuration::operator+(const Configuration& o) const {
  if (!(layout_ == o.layout_)) throw InputDomainError("layout mismatch");
  return Configuration(layout_, coords_ + o.coords_);
}

Configuration Configuration::operator-(const Configuration& o) const {
  if (!(layout_ == o.layout_)) throw InputDomainError("layout mismatch");
  return Configuration(layout_, coords_ - o.coords_);
}

Configuration Configuration::operator*(double s) const { return Configuration(layout_, coords_ * s); }

bool Configuration::approx_equal(const Configuration& o, double tol) const {
  return layout_ == o.layout_ && hypermane::norm(layout_, coords_ - o.coords_) <= tol;
}

RayProjection dist_to_ray(const Layout& layout, const Vec& point, const Vec& base, const Vec& a) {
  const double aa = inner(layout, a, a);
  if (aa == 0.0) throw InputDomainError("ray direction must be nonzero");
  const Vec rel = point - base;
  const double s = std::max(0.0, inner(layout, rel, a) / aa);
  return {norm(layout, rel - s * a), s};
}

namespace {

void require_unit_direction(const Layout& layout, const Vec& a) {
  if (std::abs(norm(layout, a) - 1.0) > 1e-12) throw InputDomainError("direction must have unit norm");
  if (!(min_separation(layout, a) > 0.0)) throw InputDomainError("direction must be collision-free");
}

}  // namespace

Vec base_point(const Layout& layout, const Vec& x, const Vec& a) {
  require_unit_direction(layout, a);
  const double s = 50.0 * (1.0 + norm(layout, x)) / min_separation(layout, a);
  return x + s * a;
}

DirectionCapResult separation_drift_check(const Layout& layout, const Vec& a, const Vec& b, double delta) {
  require_unit_direction(layout, a);
  if (!(delta > 0.0 && delta < 0.2)) throw InputDomainError("delta must lie in (0, 1/5)");
  if (std::abs(norm(layout, b) - 1.0) > 1e-12) throw InputDomainError("b must have unit norm");
  const double af = min_separation(layout, a);
  if (norm(layout, a - b) > delta * af * (1.0 + 1e-12))
    throw InputDomainError("b lies outside the direction cap");
  DirectionCapResult r;
  r.flat.measured = min_separation(layout, b);
  r.flat.bound = (1.0 - 2.0 * delta) * af;
  r.flat.admissible = r.flat.measured >= r.flat.bound;
  r.inner.measured = inner(layout, a, b);
  r.inner.bound = 1.0 - 2.0 * delta * delta;
  r.inner.admissible = r.inner.measured >= r.inner.bound;
  return r;
}

DriftCheck ray_drift_check(const Layout& layout, const Vec& x, const Vec& a, double s) {
  require_unit_direction(layout, a);
  const double af = min_separation(layout, a);
  DriftCheck r;
  r.threshold = 50.0 * (1.0 + norm(layout, x)) / af;
  if (s < r.threshold * (1.0 - 1e-12)) throw InputDomainError("s is below 50(1+|x|)/a_flat");
  const Vec p = x + s * a;
  r.drift.measured = norm(layout, p / norm(layout, p) - a);
  r.drift.bound = af / 20.0;
  r.drift.admissible = r.drift.measured <= r.drift.bound;
  r.separation.measured = min_separation(layout, p);
  r.separation.bound = 24.0 / 25.0 * s * af;
  r.separation.admissible = r.separation.measured >= r.separation.bound;
  return r;
}

ConeSeparationResult cone_separation_check(const Layout& layout, const Vec& x, const Vec& a, const Vec& b,
                                           double s, double t) {
  require_unit_direction(layout, a);
  if (std::abs(norm(layout, b) - 1.0) > 1e-12) throw InputDomainError("b must have unit norm");
  const double af = min_separation(layout, a);
  if (norm(layout, a - b) > af / 20.0 + 1e-12) throw InputDomainError("b lies outside the direction cap");
  if (s < 50.0 * (1.0 + norm(layout, x)) / af * (1.0 - 1e-12)) throw InputDomainError("s is below 50(1+|x|)/a_flat");
  if (t < 0.0) throw InputDomainError("t must be nonnegative");
  ConeSeparationResult r;
  const Vec base = x + s * a;
  r.middle = min_separation(layout, base);
  r.outer = min_separation(layout, base + t * b);
  r.lower = 24.0 / 25.0 * s * af;
  return r;
}

SegmentClearance segment_clearance(const Layout& layout, const Vec& p, const Vec& q, bool open,
                                   const std::vector<char>* pair_mask) {
  const int d = layout.dim;
  const int n = layout.bodies();
  SegmentClearance best;
  best.separation = std::numeric_limits<double>::infinity();
  auto consider = [&](double sep, double s, int i, int j) {
    if (sep < best.separation) best = {sep, s, i, j};
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (pair_mask && !(*pair_mask)[static_cast<std::size_t>(i * n + j)]) continue;
      const Eigen::VectorXd r0 = p.segment(i * d, d) - p.segment(j * d, d);
      const Eigen::VectorXd r1 = q.segment(i * d, d) - q.segment(j * d, d);
      const Eigen::VectorXd dr = r1 - r0;
      const double dd = dr.squaredNorm();
      double s = dd > 0.0 ? -r0.dot(dr) / dd : 0.0;
      if (open) {
        if (s > 0.0 && s < 1.0) consider((r0 + s * dr).norm(), s, i, j);
      } else {
        s = std::clamp(s, 0.0, 1.0);
        consider((r0 + s * dr).norm(), s, i, j);
      }
    }
  return best;
}

}  // namespace hypermane
