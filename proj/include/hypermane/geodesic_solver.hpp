#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypermane/action.hpp"

namespace hypermane {

enum class Grading { uniform, geometric };

struct SolveOptions {
  int initial_nodes = 33;
  int max_refinements = 6;
  /// Refinement levels performed even if the action has already settled.
  int min_refinements = 0;
  /// Stop when every interior node's force imbalance, relative to the forces acting on it, is below this.
  double optimizer_tolerance = 1e-9;
  double collision_guard = 1e-6;
  int max_iterations = 10000;
  Grading grading = Grading::uniform;
  /// Ratio between consecutive segment lengths for geometric grading (at most 1.25).
  double grading_ratio = 1.2;
  /// First segment length for geometric grading; 0 picks min(0.5, length/(initial_nodes-1)).
  double first_step = 0.0;
  /// Also solve from a strongly deflected start and keep the lower action.
  bool restarts = false;
  /// Re-solve between gamma(sigma/4) and gamma(3 sigma/4) and record the gap to the restricted action.
  bool check_restriction = false;
  std::optional<DiscretePath> initial_path;

  void validate() const;
};

struct LevelRecord {
  int nodes = 0;
  double action = 0.0;
  /// This level's polyline evaluated with the midpoint rule of the final level.
  double final_grid_action = 0.0;
  int iterations = 0;
  bool converged = false;
  double imbalance = 0.0;
};

struct GeodesicResult {
  /// Canonically timed path; endpoints equal the requested configurations exactly.
  DiscretePath path;
  ActionValue action;
  double el_residual = 0.0;
  double el_residual_normalized = 0.0;
  double energy_residual = 0.0;
  bool converged = false;
  double lambda = 0.0;
  /// Smallest pair separation over interior nodes and segment midpoints.
  double min_separation = 0.0;
  bool deflected_start = false;
  /// Independent restarts disagreed by more than 1e-6 relative.
  bool multiple_minimizers = false;
  double restart_gap = 0.0;
  std::optional<double> restriction_gap;
  /// Metric length per unit parameter step of every segment (piecewise-constant density).
  Vec segment_density;
  std::vector<LevelRecord> levels;
  std::vector<std::string> notes;

  int nodes() const { return path.size(); }
  double sigma() const { return path.sigma(); }
};

/// Local minimizer of the discrete Maupertuis action between x and y among paths keeping
/// pair separations above the collision guard, refined by node doubling.
GeodesicResult solve_geodesic(const Vec& x, const Vec& y, const PotentialSpec& F, double lambda,
                              const SolveOptions& opts = {});

struct ElResidual {
  double raw = 0.0;
  double normalized = 0.0;
};
/// Interior-node defect of the nonuniform second divided difference against grad F.
ElResidual el_residual(const DiscretePath& path, const PotentialSpec& F, double lambda);

/// Sub-path on [s, t] (times shifted to start at 0). Partial segments keep the density of
/// the segment they were cut from, so restricted actions add up exactly.
GeodesicResult restrict(const GeodesicResult& result, double s, double t, const PotentialSpec& F);

/// Segment lengths from x outward: geometric growth by `ratio` from `first`, adjusted at the
/// far end so they sum to `length` with adjacent ratios staying within [1/1.25, 1.25].
std::vector<double> graded_steps(double length, double first, double ratio);

}  // namespace hypermane
