#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hypermane/geodesic_solver.hpp"

namespace hypermane {

enum class TrajectoryStatus { completed, collision_stop, step_underflow };

const char* status_name(TrajectoryStatus status);

struct TrajectorySample {
  double t = 0.0;
  Vec x;
  Vec v;
  /// 0.5|v|^2 - F(x) in the mass norm.
  double energy = 0.0;
};

struct Trajectory {
  Layout layout;
  std::vector<TrajectorySample> samples;
  TrajectoryStatus status = TrajectoryStatus::completed;
  long steps = 0;
  long rejected_steps = 0;
  double tolerance = 0.0;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
  /// Largest |E(t) - E(0)| over the samples.
  double energy_drift() const;
  /// Largest |E(t) - lambda| over the samples.
  double energy_drift(double lambda) const;
};

struct IntegrateOptions {
  Branch branch = Branch::raw;
  double collision_guard = 1e-6;
  /// Steps shorter than this times max(1, |t|) count as underflow.
  double min_step = 1e-14;
  long max_steps = 50'000'000;
  /// Keep every k-th accepted step (the final state is always kept).
  int record_every = 1;
};

Trajectory integrate(const Vec& x0, const Vec& v0, const PotentialSpec& F, double t_end, double tol,
                     const IntegrateOptions& opts = {});

struct ShootReport {
  /// |x(sigma) - gamma(sigma)| / |gamma(sigma) - gamma(0)|.
  double mismatch = 0.0;
  double absolute_mismatch = 0.0;
  double sigma = 0.0;
  Vec initial_velocity;
  /// 0.5|v0|^2 - F(gamma(0)) minus lambda.
  double initial_energy_offset = 0.0;
  Trajectory trajectory;
};

/// Integrates from gamma(0) with the velocity read off the canonical parametrization and compares at sigma.
ShootReport shoot_match(const GeodesicResult& geodesic, const PotentialSpec& F, double tol,
                        const IntegrateOptions& opts = {});

struct VelocityLimit {
  bool conclusive = false;
  Vec velocity;
  /// sup |v(t) - v(t_end)| over the last decade of time.
  double indicator = 0.0;
  std::string reason;
};

VelocityLimit velocity_limit(const Trajectory& trajectory);

/// Columns t, positions, velocities, energy.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace hypermane
