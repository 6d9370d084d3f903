#include "hypermane/ode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <boost/numeric/odeint.hpp>

namespace hypermane {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

double masked_separation(const PotentialSpec& F, const Eigen::Ref<const Vec>& x) {
  const Layout& L = F.layout();
  const auto& mask = F.singular_mask();
  const int n = L.bodies();
  const int d = L.dim;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (mask[i * n + j]) best = std::min(best, (x.segment(i * d, d) - x.segment(j * d, d)).norm());
  return best;
}

double energy_of(const PotentialSpec& F, const Vec& x, const Vec& v, Branch branch) {
  return 0.5 * inner(F.layout(), v, v) - F.evaluate(x, branch);
}

TrajectorySample sample_of(const PotentialSpec& F, double t, const State& s, int n, Branch branch) {
  TrajectorySample out;
  out.t = t;
  out.x = Eigen::Map<const Vec>(s.data(), n);
  out.v = Eigen::Map<const Vec>(s.data() + n, n);
  out.energy = energy_of(F, out.x, out.v, branch);
  return out;
}

}  // namespace

const char* status_name(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::collision_stop: return "collision_stop";
    case TrajectoryStatus::step_underflow: return "step_underflow";
  }
  return "unknown";
}

double Trajectory::energy_drift() const {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(s.energy - samples.front().energy));
  return worst;
}

double Trajectory::energy_drift(double lambda) const {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(s.energy - lambda));
  return worst;
}

Trajectory integrate(const Vec& x0, const Vec& v0, const PotentialSpec& F, double t_end, double tol,
                     const IntegrateOptions& opts) {
  const Layout& L = F.layout();
  const int n = L.size();
  if (x0.size() != n || v0.size() != n) throw InputDomainError("initial data has the wrong dimension");
  if (!x0.allFinite() || !v0.allFinite()) throw InputDomainError("initial data must be finite");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InputDomainError("t_end must be positive");
  if (!(tol > 0.0)) throw InputDomainError("tol must be positive");
  if (opts.record_every < 1) throw InputDomainError("record_every must be at least 1");
  if (masked_separation(F, x0) < std::max(opts.collision_guard, kNearCollisionCutoff))
    throw InputDomainError("x0 is at a collision");

  const Branch branch = opts.branch;
  auto rhs = [&](const State& s, State& ds, double) {
    Eigen::Map<const Vec> x(s.data(), n);
    Eigen::Map<Vec> dx(ds.data(), n);
    Eigen::Map<Vec> dv(ds.data() + n, n);
    dx = Eigen::Map<const Vec>(s.data() + n, n);
    dv = F.gradient(Vec(x), branch);
  };

  Trajectory traj;
  traj.layout = L;
  traj.tolerance = tol;
  State state(2 * n);
  Eigen::Map<Vec>(state.data(), n) = x0;
  Eigen::Map<Vec>(state.data() + n, n) = v0;
  traj.samples.push_back(sample_of(F, 0.0, state, n, branch));

  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol);
  double t = 0.0;
  const double speed = std::max(norm(L, v0), 1.0);
  double dt = std::min(t_end, 1e-3 * std::max(masked_separation(F, x0), 1e-6) / speed);
  long since_record = 0;
  while (t < t_end) {
    if (traj.steps >= opts.max_steps) {
      traj.status = TrajectoryStatus::step_underflow;
      break;
    }
    const bool last = dt >= t_end - t;
    if (last) dt = t_end - t;
    odeint::controlled_step_result res;
    try {
      res = stepper.try_step(rhs, state, t, dt);
    } catch (const SingularEvaluationError&) {
      dt *= 0.25;
      res = odeint::fail;
    }
    if (res == odeint::fail) {
      ++traj.rejected_steps;
      if (dt < opts.min_step * std::max(1.0, std::abs(t))) {
        traj.status = TrajectoryStatus::step_underflow;
        break;
      }
      continue;
    }
    ++traj.steps;
    if (last) t = t_end;
    const bool hit = masked_separation(F, Eigen::Map<const Vec>(state.data(), n)) < opts.collision_guard;
    if (++since_record >= opts.record_every || t >= t_end || hit) {
      traj.samples.push_back(sample_of(F, t, state, n, branch));
      since_record = 0;
    }
    if (hit) {
      traj.status = TrajectoryStatus::collision_stop;
      break;
    }
  }
  return traj;
}

ShootReport shoot_match(const GeodesicResult& geodesic, const PotentialSpec& F, double tol,
                        const IntegrateOptions& opts) {
  if (!geodesic.converged) throw InputDomainError("geodesic did not converge");
  const DiscretePath& p = geodesic.path;
  if (!p.timed() || p.size() < 3) throw InputDomainError("geodesic needs a timed path with at least 3 nodes");
  const Layout& L = F.layout();
  const Vec& times = *p.times;
  const double h1 = times(1) - times(0);
  const double h2 = times(2) - times(1);
  if (!(h1 > 0.0 && h2 > 0.0)) throw InputDomainError("geodesic times must increase");

  ShootReport rep;
  rep.sigma = p.sigma();
  rep.initial_velocity = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * p.node(0) + (h1 + h2) / (h1 * h2) * p.node(1) -
                         h1 / (h2 * (h1 + h2)) * p.node(2);
  rep.initial_energy_offset =
      0.5 * inner(L, rep.initial_velocity, rep.initial_velocity) - F.evaluate(p.front(), Branch::clamped) -
      geodesic.lambda;
  if (rep.sigma == 0.0) return rep;

  IntegrateOptions o = opts;
  o.branch = Branch::clamped;
  rep.trajectory = integrate(p.front(), rep.initial_velocity, F, rep.sigma, tol, o);
  if (rep.trajectory.status == TrajectoryStatus::collision_stop)
    throw CollisionStopError("shooting trajectory stopped at a near-collision");
  if (rep.trajectory.status != TrajectoryStatus::completed)
    throw CollisionStopError("shooting trajectory did not reach sigma");
  rep.absolute_mismatch = norm(L, rep.trajectory.back().x - p.back());
  rep.mismatch = rep.absolute_mismatch / norm(L, p.back() - p.front());
  return rep;
}

VelocityLimit velocity_limit(const Trajectory& traj) {
  VelocityLimit out;
  if (traj.samples.empty()) {
    out.reason = "empty trajectory";
    return out;
  }
  out.velocity = traj.back().v;
  if (traj.status != TrajectoryStatus::completed) {
    out.reason = std::string("trajectory ended with ") + status_name(traj.status);
    return out;
  }
  const Layout& L = traj.layout;
  const double t0 = traj.front().t;
  const double t1 = traj.back().t;
  const double start = t0 + 0.1 * (t1 - t0);
  double first_sep = -1.0;
  double max_sep = 0.0;
  for (const auto& s : traj.samples) {
    const double sep = min_separation(L, s.x);
    // Large adaptive steps can leave a single sample in the window; anchor at the one before it.
    if (s.t <= start || first_sep < 0.0) first_sep = sep;
    if (s.t < start) continue;
    max_sep = std::max(max_sep, sep);
    out.indicator = std::max(out.indicator, norm(L, s.v - out.velocity));
  }
  const double last_sep = min_separation(L, traj.back().x);
  if (!(last_sep > first_sep) || last_sep < max_sep * (1.0 - 1e-12)) {
    out.reason = "minimum separation is not expanding over the last decade";
    return out;
  }
  out.conclusive = true;
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const Layout& L = traj.layout;
  const int n = L.size();
  os << "# bodies=" << L.bodies() << " dim=" << L.dim << " status=" << status_name(traj.status) << "\n";
  os << "t";
  for (int k = 0; k < n; ++k) os << ",x" << k / L.dim << "_" << k % L.dim;
  for (int k = 0; k < n; ++k) os << ",v" << k / L.dim << "_" << k % L.dim;
  os << ",energy\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& s : traj.samples) {
    put(s.t);
    for (int k = 0; k < n; ++k) os << ',', put(s.x(k));
    for (int k = 0; k < n; ++k) os << ',', put(s.v(k));
    os << ',';
    put(s.energy);
    os << "\n";
  }
}

}  // namespace hypermane
