// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hypermane/hyperbolic.hpp"
#include "hypermane/mane_metric.hpp"
#include "hypermane/ode_oracle.hpp"

using namespace hypermane;

namespace {

constexpr double kFreeRelTol = 1e-8;
constexpr double kFreeStraightTol = 1e-8;
constexpr double kFreeRuntime = 10.0;
constexpr double kEnergyResidualTol = 1e-10;
constexpr double kShootMismatchAt513 = 1e-2;
constexpr double kShootRatio = 3.0;
constexpr double kShootRuntime = 60.0;
constexpr double kSymmetryFactor = 2.0;
constexpr double kTriangleFactor = 3.0;
constexpr double kPsiClosedFormTol = 1e-10;
constexpr double kStrictRuntime = 600.0;
constexpr double kGradientRelTol = 1e-6;

struct Fixture {
  std::string label;
  double energy_residual;
};
std::vector<Fixture> g_fixtures;

void record(const std::string& label, const GeodesicResult& g) {
  if (g.converged) g_fixtures.push_back({label, g.energy_residual});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec gaussian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Vec unit(std::mt19937_64& rng, const Layout& L) {
  Vec v = gaussian(rng, L.size(), 1.0);
  return v / norm(L, v);
}

Vec spread(std::mt19937_64& rng, const Layout& L, double scale, double min_sep) {
  for (;;) {
    Vec v = gaussian(rng, L.size(), scale);
    if (min_separation(L, v) >= min_sep) return v;
  }
}

Vec rotate_towards(std::mt19937_64& rng, const Layout& L, const Vec& a, double chord) {
  Vec w = gaussian(rng, L.size(), 1.0);
  w -= inner(L, w, a) * a;
  w /= norm(L, w);
  const double th = 2.0 * std::asin(0.5 * chord);
  return std::cos(th) * a + std::sin(th) * w;
}

Vec pair_direction() {
  Vec a(4);
  a << -1, 0, 1, 0;
  return a / std::sqrt(2.0);
}

Layout unit_layout(int n) { return Layout{2, std::vector<double>(static_cast<std::size_t>(n), 1.0)}; }

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome free_exactness() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> lam(0.05, 5.0);
  double worst_rel = 0.0, worst_dev = 0.0;
  for (int k = 0; k < 100; ++k) {
    Layout L = unit_layout(2 + k % 2);
    PotentialSpec F(L, ZeroPair{});
    Vec x = gaussian(rng, L.size(), 3.0);
    Vec y = gaussian(rng, L.size(), 3.0);
    const double lambda = lam(rng);
    ManeEstimate e = mane_potential(x, y, F, lambda);
    const double gap = norm(L, y - x);
    const double exact = std::sqrt(2.0 * lambda) * gap;
    worst_rel = std::max(worst_rel, std::abs(e.upper - exact) / exact);
    const GeodesicResult& g = *e.geodesic;
    record("free", g);
    for (int i = 0; i < g.nodes(); ++i) {
      const Vec p = g.path.node(i) - x;
      const Vec d = (y - x) / gap;
      worst_dev = std::max(worst_dev, norm(L, p - inner(L, p, d) * d) / gap);
    }
  }
  const double t = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "max rel action err %.2e (tol %.0e), max deviation %.2e (tol %.0e), %.2fs (limit %.0fs)",
                worst_rel, kFreeRelTol, worst_dev, kFreeStraightTol, t, kFreeRuntime);
  return {worst_rel < kFreeRelTol && worst_dev < kFreeStraightTol && t < kFreeRuntime, buf};
}

Outcome shooting_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  Vec x(4), y(4);
  x << -1, 0, 1, 0;
  y << -2, 3, 3, 2;
  std::vector<double> mismatch;
  std::string detail;
  for (int nodes : {513, 1025, 2049, 4097}) {
    SolveOptions o;
    o.initial_nodes = nodes;
    o.max_refinements = 0;
    GeodesicResult g = solve_geodesic(x, y, F, 0.5, o);
    record("shooting", g);
    if (!g.converged) return {false, "geodesic at " + std::to_string(nodes) + " nodes did not converge"};
    mismatch.push_back(shoot_match(g, F, 1e-13).mismatch);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%d:%.3e", detail.empty() ? "" : " ", nodes, mismatch.back());
    detail += buf;
  }
  bool ok = mismatch[0] < kShootMismatchAt513;
  for (std::size_t k = 1; k < mismatch.size(); ++k) ok = ok && mismatch[k - 1] / mismatch[k] >= kShootRatio;
  const double t = seconds_since(t0);
  char buf[120];
  std::snprintf(buf, sizeof buf, " (need <%.0e at 513, ratio >= %.0f), %.2fs (limit %.0fs)", kShootMismatchAt513,
                kShootRatio, t, kShootRuntime);
  return {ok && t < kShootRuntime, "mismatch " + detail + buf};
}

Outcome metric_axioms() {
  std::mt19937_64 rng(1004);
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  const double lambda = 0.5;
  int sym_fail = 0, tri_fail = 0, low_fail = 0;
  double worst_sym = 0.0, worst_tri = 0.0;
  for (int k = 0; k < 50; ++k) {
    Vec x = spread(rng, L, 2.0, 0.8), y = spread(rng, L, 2.0, 0.8), z = spread(rng, L, 2.0, 0.8);
    ManeEstimate xy = mane_potential(x, y, F, lambda);
    ManeEstimate yx = mane_potential(y, x, F, lambda);
    ManeEstimate yz = mane_potential(y, z, F, lambda);
    ManeEstimate xz = mane_potential(x, z, F, lambda);
    for (const ManeEstimate* e : {&xy, &yx, &yz, &xz}) {
      record("metric", *e->geodesic);
      if (!(e->upper >= e->analytic_lower)) ++low_fail;
    }
    const double tol_sym = std::max(xy.tolerance, yx.tolerance);
    const double gap = std::abs(xy.upper - yx.upper);
    worst_sym = std::max(worst_sym, gap / tol_sym);
    if (gap > kSymmetryFactor * tol_sym) ++sym_fail;
    const double tol_tri = std::max({xy.tolerance, yz.tolerance, xz.tolerance});
    const double slack = xz.upper - xy.upper - yz.upper;
    worst_tri = std::max(worst_tri, slack / tol_tri);
    if (slack > kTriangleFactor * tol_tri) ++tri_fail;
  }
  char buf[220];
  std::snprintf(buf, sizeof buf,
                "50 triples: symmetry failures %d (worst %.2f x tol, limit %.0f), triangle failures %d (worst %.2f x tol, "
                "limit %.0f), lower-bound violations %d",
                sym_fail, worst_sym, kSymmetryFactor, tri_fail, worst_tri, kTriangleFactor, low_fail);
  return {sym_fail == 0 && tri_fail == 0 && low_fail == 0, buf};
}

Outcome certificates() {
  std::mt19937_64 rng(1005);
  const double lambda = 0.5;
  int seg_fail = 0, seg_done = 0;
  while (seg_done < 100) {
    Layout L = unit_layout(2 + seg_done % 2);
    PotentialSpec F(L, Newtonian{});
    Vec x = spread(rng, L, 2.0, 0.8), y = spread(rng, L, 2.0, 0.8);
    if (segment_clearance(L, x, y, false).separation < 0.3) continue;
    ManeEstimate e = mane_potential(x, y, F, lambda);
    record("segment", *e.geodesic);
    if (!e.segment_bound || !(e.upper <= *e.segment_bound + e.tolerance)) ++seg_fail;
    ++seg_done;
  }
  int far_fail = 0, far_done = 0;
  std::uniform_real_distribution<double> factor(1.0, 2.0);
  std::uniform_int_distribution<int> texp(0, 12);
  while (far_done < 20) {
    Layout L = unit_layout(2 + far_done % 2);
    PotentialSpec F(L, Newtonian{});
    Vec a = unit(rng, L);
    const double af = min_separation(L, a);
    if (af < 0.2) continue;
    Vec x = gaussian(rng, L.size(), 1.0);
    std::uniform_real_distribution<double> chord(0.0, af / 20.0);
    Vec b = rotate_towards(rng, L, a, chord(rng));
    const double s = 50.0 * (1.0 + norm(L, x)) / af * factor(rng);
    const double T = std::ldexp(1.0, texp(rng));
    SolveOptions o;
    o.grading = Grading::geometric;
    FarFieldBound bound = far_field_upper_bound(x, a, s, b, T, F, lambda, o);
    GeodesicResult g = solve_geodesic(x, x + s * a + T * b, F, lambda, o);
    record("far_field", g);
    const double tol = g.action.quadrature_error_estimate / std::sqrt(2.0 * lambda);
    const double len = g.path.length();
    if (!(len <= bound.value + tol && len >= T)) ++far_fail;
    ++far_done;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "segment bound violations %d/100, far-field violations %d/20", seg_fail, far_fail);
  return {seg_fail == 0 && far_fail == 0, buf};
}

Outcome psi_machinery() {
  int violations = 0;
  double worst_closed = 0.0;
  bool deterministic = true;
  std::mt19937_64 rng(1006);
  const int j_max = 64;
  std::vector<PairKind> kinds{Newtonian{}, Homogeneous{2.0}, QuasiHomogeneous{3.0, 1.5, 1.0}, ZeroPair{}};
  for (int k = 0; k < 8; ++k) {
    Layout L = unit_layout(2 + k % 2);
    PotentialSpec F(L, kinds[static_cast<std::size_t>(k) % kinds.size()]);
    Vec a = unit(rng, L);
    while (min_separation(L, a) < 0.2) a = unit(rng, L);
    Vec x = k == 0 ? Vec(Vec::Zero(L.size())) : gaussian(rng, L.size(), 1.0);
    SolveOptions o;
    o.grading = Grading::geometric;
    PsiTable psi = build_psi_table(x, a, 0.5, F, j_max, o);
    for (int j = 1; j <= j_max; ++j) {
      const double t = std::ldexp(1.0, j);
      if (!(std::sqrt(psi.psi_at(j) / t) <= psi.psi_tilde(t))) ++violations;
      if (j >= psi.n0 && !(psi.psi_at(j) <= std::ldexp(psi.a_flat * psi.a_flat, -20) * t)) ++violations;
    }
    PsiTable again = build_psi_table(x, a, 0.5, F, j_max, o);
    deterministic = deterministic && again.n0 == psi.n0 && again.tilde_cache == psi.tilde_cache;
  }
  Layout L = unit_layout(2);
  PotentialSpec F(L, ZeroPair{});
  PsiTable psi = build_psi_table(Vec::Zero(4), pair_direction(), 0.5, F, j_max);
  const double psi0 = 50.0 / std::sqrt(2.0);
  for (int n = 0; n <= j_max; ++n) {
    const double closed = std::sqrt(psi0) * std::pow(2.0, -0.5 * (n + 1)) / (1.0 - std::sqrt(0.5));
    worst_closed = std::max(worst_closed, std::abs(psi.psi_tilde(std::ldexp(1.0, n)) - closed) / closed);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "tilde/growth violations %d over 8 tables, free closed-form rel err %.2e (tol %.0e), n0 deterministic %s",
                violations, worst_closed, kPsiClosedFormTol, deterministic ? "yes" : "no");
  return {violations == 0 && worst_closed < kPsiClosedFormTol && deterministic, buf};
}

HyperbolicReport g_strict;
bool g_strict_ok = false;

Outcome strict_run() {
  auto t0 = std::chrono::steady_clock::now();
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  const double lambda = 0.5;
  SequenceOptions o;
  o.mode = Mode::strict;
  o.workers = 4;
  o.solve.grading = Grading::geometric;
  o.solve.min_refinements = 3;
  o.solve.max_refinements = 3;
  PsiTable psi = build_psi_table(Vec::Zero(4), pair_direction(), lambda, F, 64, o.solve);
  g_strict = build_sequence(Vec::Zero(4), pair_direction(), lambda, F, psi.n0 + 1, psi.n0 + 4, psi, o);
  int converged = 0;
  for (const RunRecord& r : g_strict.runs)
    if (r.result) {
      record("strict", *r.result);
      if (r.result->converged) ++converged;
    }
  const double t = seconds_since(t0);
  const bool velocity_ok =
      g_strict.velocity_estimate && g_strict.velocity_error <= g_strict.velocity_bound;
  g_strict_ok = converged == 4;
  char buf[260];
  std::snprintf(buf, sizeof buf,
                "n0=%d, runs %d..%d converged %d/4, asserted checks %d with %d failures, velocity err %.2e <= bound "
                "%.2e: %s, %.1fs (limit %.0fs)",
                psi.n0, psi.n0 + 1, psi.n0 + 4, converged, g_strict.asserted_count(), g_strict.asserted_failures(),
                g_strict.velocity_error, g_strict.velocity_bound, velocity_ok ? "yes" : "no", t, kStrictRuntime);
  return {converged == 4 && g_strict.asserted_count() > 0 && g_strict.all_asserted_pass() && velocity_ok &&
              t < kStrictRuntime,
          buf};
}

Outcome cauchy_contraction() {
  if (!g_strict_ok) return {false, "strict runs unavailable"};
  const auto& gaps = g_strict.cauchy_gaps;
  bool ok = gaps.size() == 3;
  std::string detail;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.3e", k ? ", " : "", gaps[k]);
    detail += buf;
    if (k > 0 && !(gaps[k] < gaps[k - 1])) ok = false;
  }
  // The horizon must cover radius 2^{n0+1} around x*.
  const RunRecord& first = g_strict.runs.front();
  const double r = norm(first.result->path.layout, first.result->path.at_time(g_strict.cauchy_horizon) -
                                                       g_strict.psi.x_star);
  ok = ok && r >= std::ldexp(1.0, g_strict.psi.n0 + 1) * (1 - 1e-12);
  char buf[96];
  std::snprintf(buf, sizeof buf, " on horizon %.6e (radius %.3e)", g_strict.cauchy_horizon, r);
  return {ok, "sup gaps " + detail + buf};
}

Outcome gradient_checks() {
  std::mt19937_64 rng(1009);
  double worst_pot = 0.0, worst_act = 0.0;
  std::vector<PairKind> kinds{Newtonian{},         Homogeneous{1.5},     QuasiHomogeneous{2.0, 1.0, 0.5},
                              LennardJones{1.0, 1.0}, SeeligerYukawa{1.0, 0.3}, MucketTreder{1.0, 0.2},
                              Logarithmic{}};
  for (int k = 0; k < 100; ++k) {
    Layout L{2, {1.0, 0.5 + 0.01 * k, 1.5}};
    PotentialSpec F(L, kinds[static_cast<std::size_t>(k) % kinds.size()]);
    Vec x = spread(rng, L, 2.0, 0.4);
    Vec g = F.euclidean_gradient(x);
    const double h = 1e-6 * (1.0 + x.norm());
    Vec fd(x.size());
    for (int i = 0; i < x.size(); ++i) {
      Vec p = x, m = x;
      p[i] += h;
      m[i] -= h;
      fd[i] = (F.evaluate(p) - F.evaluate(m)) / (2 * h);
    }
    worst_pot = std::max(worst_pot, (g - fd).norm() / g.norm());
  }
  for (int k = 0; k < 100; ++k) {
    Layout L = unit_layout(2 + k % 2);
    PotentialSpec F(L, Newtonian{});
    const int m = 6;
    Eigen::MatrixXd nodes(L.size(), m);
    nodes.col(0) = spread(rng, L, 3.0, 1.5);
    for (int c = 1; c < m; ++c) {
      Vec next;
      do next = nodes.col(c - 1) + gaussian(rng, L.size(), 0.3);
      while (min_separation(L, next) < 0.8);
      nodes.col(c) = next;
    }
    DiscretePath p(L, nodes);
    Eigen::MatrixXd g = action_gradient(p, F, 0.5);
    const double h = 1e-6 * (1.0 + nodes.norm() / std::sqrt(double(m)));
    Eigen::MatrixXd fd = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (int c = 1; c + 1 < m; ++c)
      for (int r = 0; r < L.size(); ++r) {
        DiscretePath a = p, b = p;
        a.nodes(r, c) += h;
        b.nodes(r, c) -= h;
        fd(r, c) = (maupertuis_action(a, F, 0.5).value - maupertuis_action(b, F, 0.5).value) / (2 * h);
      }
    worst_act = std::max(worst_act, (g - fd).norm() / g.norm());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "potential worst rel err %.2e, action worst rel err %.2e (tol %.0e, 100 each)",
                worst_pot, worst_act, kGradientRelTol);
  return {worst_pot < kGradientRelTol && worst_act < kGradientRelTol, buf};
}

Outcome energy_relation() {
  double worst = 0.0;
  std::string where;
  for (const Fixture& f : g_fixtures)
    if (f.energy_residual > worst) {
      worst = f.energy_residual;
      where = f.label;
    }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu converged geodesics, worst residual %.2e (%s), tol %.0e", g_fixtures.size(), worst,
                where.c_str(), kEnergyResidualTol);
  return {!g_fixtures.empty() && worst < kEnergyResidualTol, buf};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* name;
    Outcome outcome;
  };
  std::vector<Item> items;
  items.push_back({1, "free-potential exactness", guarded(free_exactness)});
  items.push_back({3, "shooting oracle", guarded(shooting_oracle)});
  items.push_back({4, "metric axioms", guarded(metric_axioms)});
  items.push_back({5, "analytic certificates", guarded(certificates)});
  items.push_back({6, "Psi machinery", guarded(psi_machinery)});
  items.push_back({7, "strict hyperbolic run", guarded(strict_run)});
  items.push_back({8, "Cauchy contraction", guarded(cauchy_contraction)});
  items.push_back({9, "gradient checks", guarded(gradient_checks)});
  items.push_back({2, "energy relation", guarded(energy_relation)});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.id < b.id; });
  int failed = 0;
  for (const Item& it : items) {
    std::printf("%s criterion %d (%s): %s\n", it.outcome.pass ? "PASS" : "FAIL", it.id, it.name,
                it.outcome.detail.c_str());
    if (!it.outcome.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed == 0 ? 0 : 1;
}
