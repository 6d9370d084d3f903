#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hypermane/errors.hpp"

namespace hypermane {

using Vec = Eigen::VectorXd;

/// Shape of the configuration space: N bodies in R^d with positive masses.
struct Layout {
  int dim = 0;
  std::vector<double> masses;

  int bodies() const { return static_cast<int>(masses.size()); }
  int size() const { return dim * bodies(); }
  double total_mass() const;
  bool unit_masses() const;
  void validate() const;
  bool operator==(const Layout& other) const = default;
};

/// Mass scalar product sum_i m_i <a_i, b_i>.
double inner(const Layout& layout, const Vec& a, const Vec& b);
/// Norm induced by the mass scalar product.
double norm(const Layout& layout, const Vec& a);
/// Angle in [0, pi] under the mass scalar product; the cosine is clamped to [-1, 1].
double angle_between(const Layout& layout, const Vec& a, const Vec& b);

/// Minimum pairwise Euclidean distance between bodies; zero means a collision.
double min_separation(const Layout& layout, const Vec& x);
/// Same as min_separation, also returning the indices of the closest pair.
double min_separation(const Layout& layout, const Vec& x, int& i, int& j);
/// Euclidean distance between bodies i and j.
double pair_distance(const Layout& layout, const Vec& x, int i, int j);

/// A configuration: flat coordinate vector (body-major) plus its layout.
class Configuration {
 public:
  Configuration() = default;
  Configuration(Layout layout, Vec coords);
  /// Builds from per-body coordinate lists; every body must have `dim` entries.
  static Configuration from_bodies(int dim, std::vector<double> masses,
                                   const std::vector<std::vector<double>>& bodies);

  const Layout& layout() const { return layout_; }
  const Vec& coords() const { return coords_; }
  Vec& coords() { return coords_; }
  int dim() const { return layout_.dim; }
  int bodies() const { return layout_.bodies(); }
  Eigen::Vector<double, Eigen::Dynamic> body(int i) const { return coords_.segment(i * dim(), dim()); }

  double norm() const { return hypermane::norm(layout_, coords_); }
  double flat() const { return min_separation(layout_, coords_); }
  bool is_collision() const { return flat() == 0.0; }

  Configuration operator+(const Configuration& o) const;
  Configuration operator-(const Configuration& o) const;
  Configuration operator*(double s) const;
  bool approx_equal(const Configuration& o, double tol) const;

 private:
  Layout layout_;
  Vec coords_;
};

/// Distance from a point to the ray {base + s*a : s > 0} (equivalently its closure).
struct RayProjection {
  double distance = 0.0;
  double parameter = 0.0;
};
RayProjection dist_to_ray(const Layout& layout, const Vec& point, const Vec& base, const Vec& a);

/// The base point x + 50(1+|x|) a / a_flat used for hyperbolic rays.
Vec base_point(const Layout& layout, const Vec& x, const Vec& a);

/// Outcome of a direction-cap check: measured quantity against its guaranteed bound.
struct ConeCheck {
  bool admissible = false;
  double measured = 0.0;
  double bound = 0.0;
};

/// For unit a with a_flat > 0 and unit b with |a-b| <= delta*a_flat (0 < delta < 1/5):
/// b_flat >= (1-2 delta) a_flat and <a,b> >= 1 - 2 delta^2.
struct DirectionCapResult {
  ConeCheck flat;
  ConeCheck inner;
  bool holds() const { return flat.admissible && inner.admissible; }
};
DirectionCapResult separation_drift_check(const Layout& layout, const Vec& a, const Vec& b, double delta);

/// For |a-b| <= a_flat/20, s >= 50(1+|x|)/a_flat and t >= 0:
/// (x+sa+tb)_flat >= (x+sa)_flat >= (24/25) s a_flat.
struct ConeSeparationResult {
  double outer = 0.0;   // (x+sa+tb)_flat
  double middle = 0.0;  // (x+sa)_flat
  double lower = 0.0;   // (24/25) s a_flat
  bool holds() const { return outer >= middle && middle >= lower; }
};
ConeSeparationResult cone_separation_check(const Layout& layout, const Vec& x, const Vec& a, const Vec& b,
                                           double s, double t);

/// For s >= 50(1+|x|)/a_flat: the drift |(x+sa)/|x+sa| - a| <= a_flat/20 and
/// (x+sa)_flat >= (24/25) s a_flat.
struct DriftCheck {
  ConeCheck drift;
  ConeCheck separation;
  double threshold = 0.0;
  bool holds() const { return drift.admissible && separation.admissible; }
};
DriftCheck ray_drift_check(const Layout& layout, const Vec& x, const Vec& a, double s);

/// Smallest pair separation along a straight segment, with where and for which pair.
struct SegmentClearance {
  double separation = 0.0;
  double parameter = 0.0;
  int i = -1;
  int j = -1;
};
/// Exact minimum of pair separations along the segment from p to q.
/// With `open` set, only interior critical points count: a pair whose distance is monotone
/// along the segment contributes nothing, so endpoints must be checked separately.
/// `pair_mask` (N*N, row-major) restricts the check to flagged pairs.
SegmentClearance segment_clearance(const Layout& layout, const Vec& p, const Vec& q, bool open,
                                   const std::vector<char>* pair_mask = nullptr);

}  // namespace hypermane
