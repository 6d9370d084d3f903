#pragma once

#include <iosfwd>
#include <optional>

#include "hypermane/config_geometry.hpp"
#include "hypermane/potentials.hpp"

namespace hypermane {

/// Polyline in configuration space; column k of `nodes` is node k. Optional time stamps.
struct DiscretePath {
  Layout layout;
  Eigen::MatrixXd nodes;
  std::optional<Vec> times;

  DiscretePath() = default;
  DiscretePath(Layout layout, Eigen::MatrixXd nodes);
  DiscretePath(Layout layout, Eigen::MatrixXd nodes, Vec times);

  int size() const { return static_cast<int>(nodes.cols()); }
  bool timed() const { return times.has_value(); }
  Vec node(int k) const { return nodes.col(k); }
  Vec front() const { return nodes.col(0); }
  Vec back() const { return nodes.col(nodes.cols() - 1); }
  double sigma() const;
  /// Sum of segment lengths in the mass norm.
  double length() const;
  /// Position at time t by linear interpolation (timed paths only).
  Vec at_time(double t) const;
  /// Throws InputDomainError unless the path has >= 2 nodes, finite data and increasing times.
  void validate() const;
};

struct ActionValue {
  double value = 0.0;
  double quadrature_error_estimate = 0.0;
  /// True when no Richardson estimate was requested.
  bool raw = true;
};

/// Sum over segments of |dgamma|^2/(2 dt) + dt (F(mid) + lambda), with clamped F.
ActionValue lagrangian_action(const DiscretePath& path, const PotentialSpec& F, double lambda,
                              bool estimate_error = false);
/// Sum over segments of |dgamma| sqrt(2 F(mid) + 2 lambda), with clamped F.
ActionValue maupertuis_action(const DiscretePath& path, const PotentialSpec& F, double lambda,
                              bool estimate_error = false);
/// Partial derivatives of maupertuis_action with respect to node coordinates (same shape as
/// path.nodes); endpoint columns are zero.
Eigen::MatrixXd action_gradient(const DiscretePath& path, const PotentialSpec& F, double lambda);
/// Time stamps from dt = |dgamma| / sqrt(2 F(mid) + 2 lambda).
DiscretePath canonical_reparametrize(const DiscretePath& path, const PotentialSpec& F, double lambda);
/// Max over segments of | |dgamma/dt|^2 - (2F(mid) + 2 lambda) | / (2 lambda).
double energy_residual(const DiscretePath& path, const PotentialSpec& F, double lambda);
/// Drops nodes equal to their predecessor within 1e-14 relative to the path scale. Time stamps
/// are shifted so that the removed stalls take no time.
DiscretePath strip_stationary(const DiscretePath& path);

void write_path_csv(std::ostream& os, const DiscretePath& path);
DiscretePath read_path_csv(std::istream& is);

}  // namespace hypermane
