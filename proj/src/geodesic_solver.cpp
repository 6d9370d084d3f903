#include "hypermane/geodesic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hypermane {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxRatio = 1.25;

using Block = Eigen::MatrixXd;

/// Fixed data of one minimization level.
struct Problem {
  const PotentialSpec& F;
  double lambda;
  Layout layout;
  Vec mass_diag;
  std::vector<double> ds;
  double guard;
  const std::vector<char>* mask;
};

Vec mass_diagonal(const Layout& L) {
  Vec m(L.size());
  for (int i = 0; i < L.bodies(); ++i) m.segment(i * L.dim, L.dim).setConstant(L.masses[i]);
  return m;
}

double masked_separation(const Problem& P, const Vec& x) {
  if (!P.mask) return std::numeric_limits<double>::infinity();
  const int n = P.layout.bodies();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((*P.mask)[static_cast<std::size_t>(i * n + j)]) best = std::min(best, pair_distance(P.layout, x, i, j));
  return best;
}

/// Smallest guarded separation over interior nodes, midpoints and segment interiors.
double clearance(const Problem& P, const Eigen::MatrixXd& X) {
  if (!P.mask) return std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(X.cols());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k + 1 < m; ++k) best = std::min(best, masked_separation(P, X.col(k)));
  for (int k = 0; k + 1 < m; ++k) {
    const Vec a = X.col(k);
    const Vec b = X.col(k + 1);
    best = std::min(best, masked_separation(P, 0.5 * (a + b)));
    best = std::min(best, segment_clearance(P.layout, a, b, true, P.mask).separation);
  }
  return best;
}

bool feasible(const Problem& P, const Eigen::MatrixXd& X) { return clearance(P, X) >= P.guard; }

double jacobi_energy(const Problem& P, const Eigen::MatrixXd& X) {
  double J = 0.0;
  for (int k = 0; k + 1 < X.cols(); ++k) {
    const Vec a = X.col(k);
    const Vec b = X.col(k + 1);
    const Vec d = b - a;
    const double w = 2.0 * P.F.evaluate(0.5 * (a + b), Branch::clamped) + 2.0 * P.lambda;
    J += w * d.dot(P.mass_diag.cwiseProduct(d)) / P.ds[static_cast<std::size_t>(k)];
  }
  return J;
}

/// Gradient (columns of interior nodes) and block-tridiagonal Hessian of the Jacobi energy.
struct Linearization {
  Eigen::MatrixXd grad;       // n x (M-2)
  std::vector<Block> diag;    // M-2 blocks
  std::vector<Block> upper;   // M-3 blocks, coupling interior j and j+1
  std::vector<Vec> damping;   // diagonal metric per interior node
  double imbalance = 0.0;
};

Linearization linearize(const Problem& P, const Eigen::MatrixXd& X) {
  const int m = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  const int interior = m - 2;
  Linearization lin;
  lin.grad = Eigen::MatrixXd::Zero(n, interior);
  lin.diag.assign(static_cast<std::size_t>(interior), Block::Zero(n, n));
  lin.upper.assign(static_cast<std::size_t>(std::max(interior - 1, 0)), Block::Zero(n, n));
  lin.damping.assign(static_cast<std::size_t>(interior), Vec::Zero(n));
  Eigen::MatrixXd left_force = Eigen::MatrixXd::Zero(n, interior);
  Eigen::MatrixXd right_force = Eigen::MatrixXd::Zero(n, interior);
  const Eigen::MatrixXd Mdiag = P.mass_diag.asDiagonal();
  Vec G;
  Eigen::MatrixXd HF;
  for (int k = 0; k + 1 < m; ++k) {
    const Vec a = X.col(k);
    const Vec b = X.col(k + 1);
    const Vec d = b - a;
    const Vec mid = 0.5 * (a + b);
    const double coef = 1.0 / P.ds[static_cast<std::size_t>(k)];
    const double w = 2.0 * P.F.value_and_gradient(mid, Branch::clamped, G) + 2.0 * P.lambda;
    P.F.euclidean_hessian(mid, Branch::clamped, HF);
    const Vec md = P.mass_diag.cwiseProduct(d);
    const double dd = d.dot(md);
    const Vec grad_b = coef * (dd * G + 2.0 * w * md);
    const Vec grad_a = coef * (dd * G - 2.0 * w * md);
    const Block sym = 2.0 * (G * md.transpose() + md * G.transpose());
    const Block skew = 2.0 * (G * md.transpose() - md * G.transpose());
    const Block common = 0.5 * dd * HF;
    const int ia = k - 1;  // interior index of node k
    const int ib = k;      // interior index of node k+1
    if (ia >= 0) {
      lin.grad.col(ia) += grad_a;
      right_force.col(ia) = grad_a;
      lin.diag[static_cast<std::size_t>(ia)] += coef * (-sym + common + 2.0 * w * Mdiag);
      lin.damping[static_cast<std::size_t>(ia)] += coef * 2.0 * w * P.mass_diag;
    }
    if (ib < interior) {
      lin.grad.col(ib) += grad_b;
      left_force.col(ib) = grad_b;
      lin.diag[static_cast<std::size_t>(ib)] += coef * (sym + common + 2.0 * w * Mdiag);
      lin.damping[static_cast<std::size_t>(ib)] += coef * 2.0 * w * P.mass_diag;
    }
    if (ia >= 0 && ib < interior) lin.upper[static_cast<std::size_t>(ia)] = coef * (skew + common - 2.0 * w * Mdiag);
  }
  for (int j = 0; j < interior; ++j) {
    const double scale = left_force.col(j).lpNorm<Eigen::Infinity>() + right_force.col(j).lpNorm<Eigen::Infinity>();
    const double g = lin.grad.col(j).lpNorm<Eigen::Infinity>();
    lin.imbalance = std::max(lin.imbalance, scale > 0.0 ? g / scale : 0.0);
  }
  return lin;
}

/// Solves (H + mu D) p = -g by block Cholesky; returns false when a pivot block is not positive definite.
bool solve_block_tridiagonal(const Linearization& lin, double mu, Eigen::MatrixXd& step) {
  const int m = static_cast<int>(lin.diag.size());
  const int n = static_cast<int>(lin.grad.rows());
  std::vector<Eigen::LLT<Block>> fac;
  fac.reserve(static_cast<std::size_t>(m));
  std::vector<Vec> y(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    Block S = lin.diag[static_cast<std::size_t>(j)];
    S.diagonal() += mu * lin.damping[static_cast<std::size_t>(j)];
    Vec r = -lin.grad.col(j);
    if (j > 0) {
      const Block& B = lin.upper[static_cast<std::size_t>(j - 1)];
      const Block SinvB = fac.back().solve(B);
      S -= B.transpose() * SinvB;
      r -= B.transpose() * fac.back().solve(y[static_cast<std::size_t>(j - 1)]);
    }
    fac.emplace_back(0.5 * (S + S.transpose()));
    if (fac.back().info() != Eigen::Success) return false;
    const Block Lm = fac.back().matrixL();
    if ((Lm.diagonal().array() <= 0.0).any() || !Lm.allFinite()) return false;
    y[static_cast<std::size_t>(j)] = r;
  }
  step.resize(n, m);
  for (int j = m - 1; j >= 0; --j) {
    Vec r = y[static_cast<std::size_t>(j)];
    if (j + 1 < m) r -= lin.upper[static_cast<std::size_t>(j)] * step.col(j + 1);
    step.col(j) = fac[static_cast<std::size_t>(j)].solve(r);
  }
  return step.allFinite();
}

struct LevelOutcome {
  Eigen::MatrixXd X;
  int iterations = 0;
  bool converged = false;
  double imbalance = 0.0;
};

LevelOutcome minimize_level(const Problem& P, Eigen::MatrixXd X, double tol, int max_iterations) {
  LevelOutcome out;
  const int m = static_cast<int>(X.cols());
  if (m <= 2) {
    out.X = std::move(X);
    out.converged = true;
    return out;
  }
  double J = jacobi_energy(P, X);
  double mu = 0.0;
  Eigen::MatrixXd step;
  for (int it = 0; it < max_iterations; ++it) {
    const Linearization lin = linearize(P, X);
    out.imbalance = lin.imbalance;
    out.iterations = it;
    if (lin.imbalance <= tol) {
      out.converged = true;
      break;
    }
    bool moved = false;
    for (int attempt = 0; attempt < 60 && !moved; ++attempt) {
      if (!solve_block_tridiagonal(lin, mu, step)) {
        mu = std::max(10.0 * mu, 1e-10);
        continue;
      }
      double slope = 0.0;
      for (int j = 0; j < m - 2; ++j) slope += lin.grad.col(j).dot(step.col(j));
      if (!(slope < 0.0)) {
        mu = std::max(10.0 * mu, 1e-10);
        continue;
      }
      if (-slope < 64.0 * std::numeric_limits<double>::epsilon() * std::abs(J)) {
        // The energy can no longer resolve the decrease; take the full step if it lowers the imbalance.
        Eigen::MatrixXd trial = X;
        trial.middleCols(1, m - 2) += step;
        if (feasible(P, trial) && linearize(P, trial).imbalance < lin.imbalance) {
          X = std::move(trial);
          J = jacobi_energy(P, X);
          moved = true;
        }
        break;
      }
      double alpha = 1.0;
      for (int bt = 0; bt < 40; ++bt, alpha *= 0.5) {
        Eigen::MatrixXd trial = X;
        trial.middleCols(1, m - 2) += alpha * step;
        if (!feasible(P, trial)) continue;
        const double Jt = jacobi_energy(P, trial);
        if (Jt <= J + 1e-4 * alpha * slope) {
          X = std::move(trial);
          J = Jt;
          moved = true;
          break;
        }
      }
      if (moved) {
        mu = alpha == 1.0 ? (mu < 1e-12 ? 0.0 : 0.25 * mu) : std::max(4.0 * mu, 1e-10);
      } else {
        mu = std::max(10.0 * mu, 1e-10);
        if (mu > 1e20) break;
      }
    }
    if (!moved) {
      // No descent is representable any more; accept if the imbalance sits at the round-off floor.
      out.converged = lin.imbalance <= 100.0 * tol;
      break;
    }
    out.iterations = it + 1;
  }
  if (!out.converged && out.iterations >= max_iterations) out.converged = false;
  out.X = std::move(X);
  return out;
}

Eigen::MatrixXd straight_nodes(const Vec& x, const Vec& y, const std::vector<double>& frac) {
  Eigen::MatrixXd X(x.size(), static_cast<Eigen::Index>(frac.size()));
  for (std::size_t k = 0; k < frac.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = x + frac[k] * (y - x);
  X.col(0) = x;
  X.col(X.cols() - 1) = y;
  return X;
}

std::vector<double> fractions_from_steps(const std::vector<double>& steps) {
  const double total = std::accumulate(steps.begin(), steps.end(), 0.0);
  std::vector<double> frac{0.0};
  double acc = 0.0;
  for (double h : steps) {
    acc += h;
    frac.push_back(acc / total);
  }
  frac.back() = 1.0;
  return frac;
}

/// Straight path bent by h sin(pi s) along the best of d transverse axis directions.
Eigen::MatrixXd deflected_nodes(const Problem& P, const Vec& x, const Vec& y, const std::vector<double>& frac,
                                double height) {
  const Layout& L = P.layout;
  const SegmentClearance worst = segment_clearance(L, x, y, false, P.mask);
  const int bi = worst.i >= 0 ? worst.i : 0;
  const int bj = worst.j >= 0 ? worst.j : 1;
  const Vec u = y - x;
  const double uu = inner(L, u, u);
  Eigen::MatrixXd best;
  double best_clearance = -1.0;
  for (int axis = 0; axis < L.dim; ++axis) {
    Vec D = Vec::Zero(L.size());
    D[bi * L.dim + axis] = 1.0;
    D[bj * L.dim + axis] = -1.0;
    if (uu > 0.0) D -= inner(L, D, u) / uu * u;
    const double nd = norm(L, D);
    if (nd < 1e-12) continue;
    D /= nd;
    Eigen::MatrixXd X = straight_nodes(x, y, frac);
    for (int k = 1; k + 1 < X.cols(); ++k) X.col(k) += height * std::sin(kPi * frac[static_cast<std::size_t>(k)]) * D;
    const double c = clearance(P, X);
    if (c > best_clearance) {
      best_clearance = c;
      best = std::move(X);
    }
  }
  if (best.size() == 0) best = straight_nodes(x, y, frac);
  return best;
}

Eigen::MatrixXd refine_nodes(const Eigen::MatrixXd& X) {
  const Eigen::Index m = X.cols();
  Eigen::MatrixXd R(X.rows(), 2 * m - 1);
  for (Eigen::Index k = 0; k < m; ++k) {
    R.col(2 * k) = X.col(k);
    if (k + 1 < m) R.col(2 * k + 1) = 0.5 * (X.col(k) + X.col(k + 1));
  }
  return R;
}

std::vector<double> refine_steps(const std::vector<double>& ds) {
  std::vector<double> r;
  r.reserve(2 * ds.size());
  for (double h : ds) {
    r.push_back(0.5 * h);
    r.push_back(0.5 * h);
  }
  return r;
}

struct Attempt {
  Eigen::MatrixXd X;
  std::vector<LevelRecord> levels;
  std::vector<double> ds;
  bool converged = false;
  double action = 0.0;
  double previous_action = std::numeric_limits<double>::quiet_NaN();
};

double maupertuis_on(const Problem& P, const Eigen::MatrixXd& X) {
  return maupertuis_action(DiscretePath(P.layout, X), P.F, P.lambda).value;
}

Attempt run_levels(const PotentialSpec& F, double lambda, const Layout& L, const std::vector<char>* mask,
                   Eigen::MatrixXd X, std::vector<double> ds, const SolveOptions& opts) {
  Attempt at;
  std::vector<Eigen::MatrixXd> level_nodes;
  for (int level = 0; level <= opts.max_refinements; ++level) {
    if (level > 0) {
      X = refine_nodes(X);
      ds = refine_steps(ds);
    }
    Problem P{F, lambda, L, mass_diagonal(L), ds, opts.collision_guard, mask};
    LevelOutcome lo = minimize_level(P, std::move(X), opts.optimizer_tolerance, opts.max_iterations);
    X = std::move(lo.X);
    const double A = maupertuis_on(P, X);
    at.levels.push_back({.nodes = static_cast<int>(X.cols()), .action = A, .iterations = lo.iterations,
                         .converged = lo.converged, .imbalance = lo.imbalance});
    level_nodes.push_back(X);
    at.converged = lo.converged;
    if (level > 0) at.previous_action = at.action;
    at.action = A;
    if (level >= std::max(1, opts.min_refinements) &&
        std::abs(A - at.previous_action) < 10.0 * opts.optimizer_tolerance * A)
      break;
  }
  Problem Pf{F, lambda, L, mass_diagonal(L), ds, opts.collision_guard, mask};
  for (std::size_t k = 0; k < level_nodes.size(); ++k) {
    Eigen::MatrixXd Y = std::move(level_nodes[k]);
    while (Y.cols() < X.cols()) Y = refine_nodes(Y);
    at.levels[k].final_grid_action = maupertuis_on(Pf, Y);
  }
  at.X = std::move(X);
  at.ds = std::move(ds);
  return at;
}

}  // namespace

void SolveOptions::validate() const {
  if (initial_nodes < 2) throw InputDomainError("initial_nodes must be at least 2");
  if (max_refinements < 0 || min_refinements < 0) throw InputDomainError("refinement counts must be nonnegative");
  if (!(optimizer_tolerance > 0.0)) throw InputDomainError("optimizer_tolerance must be positive");
  if (!(collision_guard > 0.0)) throw InputDomainError("collision_guard must be positive");
  if (max_iterations < 1) throw InputDomainError("max_iterations must be positive");
  if (!(grading_ratio >= 1.0 && grading_ratio <= kMaxRatio)) throw InputDomainError("grading_ratio must lie in [1, 1.25]");
  if (first_step < 0.0) throw InputDomainError("first_step must be nonnegative");
}

std::vector<double> graded_steps(double length, double first, double ratio) {
  if (!(length > 0.0) || !(first > 0.0)) throw InputDomainError("graded steps need positive length and first step");
  std::vector<double> steps;
  double total = 0.0;
  double h = first;
  while (total + h <= length) {
    steps.push_back(h);
    total += h;
    h *= ratio;
  }
  const double rest = length - total;
  if (steps.empty()) return {length};
  if (rest <= 0.0) return steps;
  if (rest >= steps.back() / kMaxRatio) {
    steps.push_back(rest);
    return steps;
  }
  // Spread the remainder over the last m segments as a geometric run continuing from the
  // segment before them.
  const int count = static_cast<int>(steps.size());
  for (int m = 1; m < count; ++m) {
    const double base = steps[static_cast<std::size_t>(count - m - 1)];
    double target = rest;
    for (int k = count - m; k < count; ++k) target += steps[static_cast<std::size_t>(k)];
    auto run = [&](double rho) {
      double s = 0.0, p = 1.0;
      for (int i = 0; i < m; ++i) {
        p *= rho;
        s += p;
      }
      return base * s;
    };
    if (run(kMaxRatio) < target || run(1.0 / kMaxRatio) > target) continue;
    double lo = 1.0 / kMaxRatio, hi = kMaxRatio;
    for (int it = 0; it < 200; ++it) {
      const double midr = 0.5 * (lo + hi);
      (run(midr) < target ? lo : hi) = midr;
    }
    const double rho = 0.5 * (lo + hi);
    double p = 1.0;
    for (int k = count - m; k < count; ++k) {
      p *= rho;
      steps[static_cast<std::size_t>(k)] = base * p;
    }
    // Absorb the last few ulps so the sum is exact.
    const double sum = std::accumulate(steps.begin(), steps.end(), 0.0);
    steps.back() += length - sum;
    return steps;
  }
  const int n = count + 1;
  return std::vector<double>(static_cast<std::size_t>(n), length / n);
}

ElResidual el_residual(const DiscretePath& path, const PotentialSpec& F, double lambda) {
  path.validate();
  if (!path.timed()) throw InputDomainError("EL residual needs a timed path");
  const Vec& ts = *path.times;
  ElResidual r;
  for (int k = 1; k + 1 < path.size(); ++k) {
    const double h0 = ts[k] - ts[k - 1];
    const double h1 = ts[k + 1] - ts[k];
    const Vec d2 = 2.0 / (h0 + h1) *
                   ((path.nodes.col(k + 1) - path.nodes.col(k)) / h1 - (path.nodes.col(k) - path.nodes.col(k - 1)) / h0);
    const Vec g = F.gradient(path.nodes.col(k), Branch::clamped);
    const double defect = norm(path.layout, d2 - g);
    r.raw = std::max(r.raw, defect);
    r.normalized = std::max(r.normalized, defect / (norm(path.layout, g) + lambda));
  }
  return r;
}

GeodesicResult solve_geodesic(const Vec& x, const Vec& y, const PotentialSpec& F, double lambda,
                              const SolveOptions& opts) {
  opts.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputDomainError("lambda must be positive");
  const Layout& L = F.layout();
  if (x.size() != L.size() || y.size() != L.size()) throw InputDomainError("endpoint dimension mismatch");
  if (!x.allFinite() || !y.allFinite()) throw InputDomainError("endpoints must be finite");
  const double gap = norm(L, y - x);
  if (gap == 0.0) throw InputDomainError("endpoints coincide");
  const std::vector<char>* mask = F.is_free() ? nullptr : &F.singular_mask();

  GeodesicResult res;
  res.lambda = lambda;

  // Initial node pattern and parameter steps.
  Eigen::MatrixXd X0;
  std::vector<double> ds;
  std::vector<double> frac;
  bool user_path = false;
  if (opts.initial_path) {
    DiscretePath ip = strip_stationary(*opts.initial_path);
    if (!(ip.layout == L)) throw InputDomainError("initial path layout mismatch");
    if (ip.size() < 2) throw InputDomainError("initial path is degenerate");
    X0 = ip.nodes;
    X0.col(0) = x;
    X0.col(X0.cols() - 1) = y;
    for (int k = 0; k + 1 < X0.cols(); ++k) {
      const double h = norm(L, X0.col(k + 1) - X0.col(k));
      if (h == 0.0) throw InputDomainError("initial path has a stall at its ends");
      ds.push_back(h);
    }
    frac = fractions_from_steps(ds);
    user_path = true;
  } else {
    if (opts.grading == Grading::geometric) {
      const double h0 = opts.first_step > 0.0 ? opts.first_step : std::min(0.5, gap / (opts.initial_nodes - 1));
      ds = graded_steps(gap, h0, opts.grading_ratio);
    } else {
      ds.assign(static_cast<std::size_t>(opts.initial_nodes - 1), gap / (opts.initial_nodes - 1));
    }
    frac = fractions_from_steps(ds);
    X0 = straight_nodes(x, y, frac);
  }

  Problem P0{F, lambda, L, mass_diagonal(L), ds, opts.collision_guard, mask};
  if (!feasible(P0, X0)) {
    if (user_path) throw CollisionObstructionError("initial path violates the collision guard");
    bool found = false;
    for (double height = 2.0 * opts.collision_guard; height <= 0.5 * gap + 2.0 * opts.collision_guard; height *= 10.0) {
      Eigen::MatrixXd Xd = deflected_nodes(P0, x, y, frac, height);
      if (feasible(P0, Xd)) {
        X0 = std::move(Xd);
        found = true;
        if (height > 2.0 * opts.collision_guard) res.notes.push_back("deflection height escalated to " + std::to_string(height));
        break;
      }
    }
    if (!found) throw CollisionObstructionError("no collision-free deflection of the straight segment was found");
    res.deflected_start = true;
  }

  Attempt best = run_levels(F, lambda, L, mask, X0, ds, opts);
  if (opts.restarts && !user_path) {
    Eigen::MatrixXd Xr = deflected_nodes(P0, x, y, frac, 0.25 * gap);
    if (feasible(P0, Xr)) {
      Attempt alt = run_levels(F, lambda, L, mask, std::move(Xr), ds, opts);
      res.restart_gap = std::abs(alt.action - best.action) / std::max(best.action, alt.action);
      if (res.restart_gap > 1e-6) {
        res.multiple_minimizers = true;
        res.notes.push_back("restarts reached different local minimizers");
      }
      if (alt.converged && (!best.converged || alt.action < best.action)) best = std::move(alt);
    }
  }

  Problem Pf{F, lambda, L, mass_diagonal(L), best.ds, opts.collision_guard, mask};
  DiscretePath spatial(L, best.X);
  res.path = canonical_reparametrize(spatial, F, lambda);
  res.converged = best.converged;
  res.levels = best.levels;
  res.action = maupertuis_action(spatial, F, lambda, true);
  if (!std::isnan(best.previous_action))
    res.action.quadrature_error_estimate =
        std::max(res.action.quadrature_error_estimate, std::abs(best.action - best.previous_action) / 3.0);
  res.energy_residual = energy_residual(res.path, F, lambda);
  const ElResidual el = el_residual(res.path, F, lambda);
  res.el_residual = el.raw;
  res.el_residual_normalized = el.normalized;
  res.segment_density.resize(best.X.cols() - 1);
  res.min_separation = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < best.X.cols(); ++k) {
    const Vec mid = 0.5 * (best.X.col(k) + best.X.col(k + 1));
    res.segment_density[k] = std::sqrt(2.0 * F.evaluate(mid, Branch::clamped) + 2.0 * lambda);
    res.min_separation = std::min(res.min_separation, min_separation(L, mid));
    if (k > 0) res.min_separation = std::min(res.min_separation, min_separation(L, best.X.col(k)));
  }

  if (opts.check_restriction && res.path.size() >= 3) {
    const double s = 0.25 * res.sigma();
    const double t = 0.75 * res.sigma();
    const GeodesicResult part = restrict(res, s, t, F);
    SolveOptions sub = opts;
    sub.check_restriction = false;
    sub.initial_path.reset();
    sub.restarts = false;
    sub.grading = Grading::uniform;
    const GeodesicResult again = solve_geodesic(part.path.front(), part.path.back(), F, lambda, sub);
    res.restriction_gap = again.action.value - part.action.value;
  }
  return res;
}

GeodesicResult restrict(const GeodesicResult& result, double s, double t, const PotentialSpec& F) {
  const DiscretePath& p = result.path;
  if (!p.timed()) throw InputDomainError("restriction needs a timed path");
  const Vec& ts = *p.times;
  const double sigma = ts[ts.size() - 1];
  if (!(s >= 0.0 && s < t && t <= sigma)) throw InputDomainError("restriction times out of range");
  if (result.segment_density.size() != p.size() - 1) throw InputDomainError("result lacks segment densities");
  std::vector<Vec> nodes;
  std::vector<double> times;
  std::vector<double> dens;
  nodes.push_back(p.at_time(s));
  times.push_back(0.0);
  const int m = p.size();
  for (int k = 0; k + 1 < m; ++k) {
    const double a = std::max(s, ts[k]);
    const double b = std::min(t, ts[k + 1]);
    if (b <= a) continue;
    const Vec end = (b == ts[k + 1]) ? Vec(p.nodes.col(k + 1)) : p.at_time(b);
    nodes.push_back(end);
    times.push_back(b - s);
    dens.push_back(result.segment_density[k]);
  }
  GeodesicResult out;
  Eigen::MatrixXd X(p.layout.size(), static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = nodes[k];
  out.path = DiscretePath(p.layout, std::move(X),
                          Eigen::Map<Vec>(times.data(), static_cast<Eigen::Index>(times.size())));
  out.segment_density = Eigen::Map<Vec>(dens.data(), static_cast<Eigen::Index>(dens.size()));
  double action = 0.0;
  for (int k = 0; k + 1 < out.path.size(); ++k)
    action += dens[static_cast<std::size_t>(k)] * norm(p.layout, out.path.nodes.col(k + 1) - out.path.nodes.col(k));
  out.action.value = action;
  out.action.quadrature_error_estimate = result.action.quadrature_error_estimate;
  out.action.raw = result.action.raw;
  out.lambda = result.lambda;
  out.converged = result.converged;
  out.energy_residual = energy_residual(out.path, F, result.lambda);
  const ElResidual el = el_residual(out.path, F, result.lambda);
  out.el_residual = el.raw;
  out.el_residual_normalized = el.normalized;
  out.min_separation = result.min_separation;
  return out;
}

}  // namespace hypermane
