#include "hypermane/hyperbolic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

namespace hypermane {

namespace {

constexpr double kTailRatio = 1e-6;
constexpr double kSlackFloor = 1e-12;
constexpr double kCapSlack = 1e-12;
constexpr int kMaxDyadic = 1000;
constexpr double kRootSlack = 1e-10;
const double kSqrtHalfGeo = 1.0 / (1.0 - std::sqrt(0.5));

std::string fmt(const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.6g", key, v);
  return buf;
}

BoundCheck make_check(const char* lemma, const char* eq, int n, std::string where, double lhs, double rhs,
                      double slack, bool asserted) {
  BoundCheck c;
  c.lemma = lemma;
  c.eq = eq;
  c.n = n;
  c.where = std::move(where);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = slack;
  c.pass = lhs <= rhs * (1.0 + slack);
  c.asserted = asserted;
  return c;
}

double run_slack(const RunRecord& run) { return std::max(run.eps_disc, kSlackFloor); }

/// Cumulative length, action and kinetic integral along a timed run.
class Cursor {
 public:
  explicit Cursor(const GeodesicResult& g) : p_(g.path), dens_(g.segment_density) {
    const int m = p_.size();
    len_.assign(static_cast<std::size_t>(m), 0.0);
    act_.assign(static_cast<std::size_t>(m), 0.0);
    kin_.assign(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k + 1 < m; ++k) {
      const double h = norm(p_.layout, p_.nodes.col(k + 1) - p_.nodes.col(k));
      const double dt = (*p_.times)[k + 1] - (*p_.times)[k];
      len_[k + 1] = len_[k] + h;
      act_[k + 1] = act_[k] + dens_[k] * h;
      kin_[k + 1] = kin_[k] + h * h / dt;
    }
  }

  double length_to(double t) const { return partial(len_, t); }
  double action_to(double t) const { return partial(act_, t); }
  double kinetic_to(double t) const { return partial(kin_, t); }

 private:
  double partial(const std::vector<double>& cum, double t) const {
    const Vec& ts = *p_.times;
    const int m = p_.size();
    if (t <= ts[0]) return 0.0;
    if (t >= ts[m - 1]) return cum.back();
    const auto it = std::upper_bound(ts.data(), ts.data() + m, t);
    const int k = static_cast<int>(it - ts.data()) - 1;
    const double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
    return cum[static_cast<std::size_t>(k)] + w * (cum[static_cast<std::size_t>(k) + 1] - cum[static_cast<std::size_t>(k)]);
  }

  const DiscretePath& p_;
  const Vec& dens_;
  std::vector<double> len_, act_, kin_;
};

}  // namespace

const char* mode_name(Mode mode) { return mode == Mode::strict ? "strict" : "exploratory"; }

double PsiTable::psi(double T) const {
  if (!(T >= 0.0)) throw InputDomainError("Psi needs T >= 0");
  return base_term + envelope_coeff * envelope.integral(x_star_flat, 2.0 * T + 2.0 * x_star_norm);
}

double PsiTable::psi_at(int j) const {
  if (j >= 0 && j < static_cast<int>(psi_cache.size())) return psi_cache[static_cast<std::size_t>(j)];
  return psi(std::ldexp(1.0, j));
}

double PsiTable::tail_bound(int J) const {
  if (J < 0) throw InputDomainError("tail index must be nonnegative");
  if (2.0 * x_star_norm > std::ldexp(1.0, J + 2)) throw InputDomainError("tail bound needs 2|x*| <= 2^{J+2}");
  const double head = std::sqrt(psi_at(J)) * std::pow(2.0, -0.5 * (J + 1)) * kSqrtHalfGeo;
  const double env = envelope.is_zero() ? 0.0 : envelope.dyadic_tail_bound(J + 1);
  return head + std::sqrt(envelope_coeff) * std::sqrt(2.0) * kSqrtHalfGeo * env;
}

double PsiTable::tilde_from(int n) const {
  const int cached = static_cast<int>(tilde_cache.size());
  if (n >= 0 && n < cached) return tilde_cache[static_cast<std::size_t>(n)];
  if (n >= cached) return tail_bound(n - 1);
  double sum = tilde_cache.front();
  for (int j = n; j < 0; ++j) sum += std::sqrt(std::ldexp(psi(std::ldexp(1.0, j)), -j));
  return sum;
}

double PsiTable::psi_tilde(double t) const {
  if (!(t > 0.0)) throw InputDomainError("Psi-tilde needs t > 0");
  return tilde_from(static_cast<int>(std::floor(std::log2(t))) + 1);
}

PsiTable build_psi_table(const Vec& x, const Vec& a, double lambda, const PotentialSpec& F, int j_max,
                         const SolveOptions& opts, std::optional<double> mane_base) {
  const Layout& L = F.layout();
  if (!(lambda > 0.0)) throw InputDomainError("lambda must be positive");
  if (j_max < 0 || j_max > kMaxDyadic / 2) throw InputDomainError("j_max out of range");
  PsiTable tab;
  tab.layout = L;
  tab.x = x;
  tab.a = a;
  tab.x_star = base_point(L, x, a);
  tab.lambda = lambda;
  tab.a_flat = min_separation(L, a);
  tab.x_star_flat = min_separation(L, tab.x_star);
  tab.x_star_norm = norm(L, tab.x_star);
  tab.mane_base = mane_base ? *mane_base : solve_geodesic(x, tab.x_star, F, lambda, opts).action.value;
  tab.base_term = tab.mane_base / std::sqrt(2.0 * lambda);
  const double nb = L.bodies();
  tab.envelope_coeff = nb * nb / (lambda * tab.a_flat);
  tab.envelope = F.envelope();
  tab.j_max = j_max;

  // Psi(2^j) cumulatively over [x*_flat, 2^{j+1} + 2|x*|].
  const double c = 2.0 * tab.x_star_norm;
  const double lo = tab.x_star_flat;
  auto upper = [&](int j) { return std::max(lo, std::ldexp(1.0, j + 1) + c); };
  auto extend = [&](int j) {
    if (j == 0) {
      tab.psi_cache.push_back(tab.base_term + tab.envelope_coeff * tab.envelope.integral(lo, upper(0)));
    } else {
      tab.psi_cache.push_back(tab.psi_cache.back() +
                              tab.envelope_coeff * tab.envelope.integral(upper(j - 1), upper(j)));
    }
  };
  auto term = [&](int j) { return std::sqrt(std::ldexp(tab.psi_cache[static_cast<std::size_t>(j)], -j)); };

  int J = std::max(j_max, static_cast<int>(std::ceil(std::log2(std::max(c, 1.0)))) - 2);
  for (int j = 0; j <= J; ++j) extend(j);
  double partial = 0.0;
  for (int j = j_max + 1; j <= J; ++j) partial += term(j);
  tab.j_tail = J;
  while (tab.tail_bound(J) >= kTailRatio * partial) {
    if (J >= kMaxDyadic) throw DivergenceError("Psi-tilde tail does not become negligible");
    ++J;
    extend(J);
    tab.j_tail = J;
    partial += term(J);
  }
  tab.tail_uncertainty = tab.tail_bound(J);
  tab.tilde_cache.assign(static_cast<std::size_t>(J) + 2, 0.0);
  tab.tilde_cache[static_cast<std::size_t>(J) + 1] = tab.tail_uncertainty;
  for (int n = J; n >= 0; --n)
    tab.tilde_cache[static_cast<std::size_t>(n)] = term(n) + tab.tilde_cache[static_cast<std::size_t>(n) + 1];

  const double cap = std::ldexp(tab.a_flat, -10);
  int n = static_cast<int>(std::ceil(20.0 + std::log2(norm(L, x - tab.x_star))));
  while (tab.tilde_from(n) > cap) {
    if (n >= kMaxDyadic) throw DivergenceError("no admissible n0 below 2^1000");
    ++n;
  }
  tab.n0 = n;
  return tab;
}

bool HyperbolicReport::all_asserted_pass() const { return asserted_failures() == 0; }

int HyperbolicReport::asserted_count() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.asserted; }));
}

int HyperbolicReport::asserted_failures() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.asserted && !c.pass; }));
}

std::optional<double> last_crossing(const DiscretePath& path, const Vec& x_star, double R, double t_max) {
  if (!path.timed()) throw InputDomainError("crossings need a timed path");
  const Layout& L = path.layout;
  const Vec& ts = *path.times;
  for (int k = path.size() - 2; k >= 0; --k) {
    if (ts[k] >= t_max) continue;
    const double t1 = std::min(ts[k + 1], t_max);
    const Vec p = path.nodes.col(k);
    const Vec q = t1 < ts[k + 1] ? path.at_time(t1) : Vec(path.nodes.col(k + 1));
    const Vec d = q - p;
    const Vec e = p - x_star;
    const double A = inner(L, d, d);
    const double B = inner(L, e, d);
    const double C = inner(L, e, e) - R * R;
    if (A == 0.0) continue;
    const double disc = B * B - A * C;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    for (double u : {(-B + sq) / A, (-B - sq) / A}) {
      if (u >= -kRootSlack && u <= 1.0 + kRootSlack) return ts[k] + std::clamp(u, 0.0, 1.0) * (t1 - ts[k]);
    }
  }
  return std::nullopt;
}

std::map<int, double> crossing_times(const DiscretePath& path, const Vec& x_star, int j_lo, int j_hi) {
  std::map<int, double> out;
  const double sigma = path.sigma();
  for (int j = j_lo; j <= j_hi; ++j) {
    const auto t = last_crossing(path, x_star, std::ldexp(1.0, j), sigma);
    if (!t) throw InputDomainError("radius 2^" + std::to_string(j) + " is never attained");
    out[j] = *t;
  }
  return out;
}

std::vector<BoundCheck> check_crossing_windows(const RunRecord& run, double lambda, int j_lo, bool asserted) {
  std::vector<BoundCheck> out;
  const double r = std::sqrt(2.0 * lambda);
  const double slack = run_slack(run);
  for (const auto& [j, s] : run.crossings) {
    if (j < j_lo) continue;
    const std::string where = "j=" + std::to_string(j);
    out.push_back(make_check("time_bounds", "crossing_window_low", run.n, where, std::ldexp(1.0, j - 1) / r, s, slack, asserted));
    out.push_back(make_check("time_bounds", "crossing_window_high", run.n, where, s, std::ldexp(1.0, j + 1) / r, slack, asserted));
  }
  return out;
}

std::vector<BoundCheck> check_midpoint_bound(const RunRecord& run, const PsiTable& psi, double S, double tau,
                                             bool asserted) {
  std::vector<BoundCheck> out;
  const DiscretePath& p = run.result->path;
  const Layout& L = p.layout;
  const double slack = run_slack(run);
  const Vec rel = p.at_time(tau) - psi.x_star;
  const double rn = norm(L, rel);
  if (rn == 0.0) throw InputDomainError("gamma(tau) coincides with x*");
  const Vec b = rel / rn;
  const std::string where = fmt("S", S);
  const double cap_gap = norm(L, psi.a - b);
  const double cap = psi.a_flat / 20.0;
  out.push_back(make_check("midpoint", "direction_cap", run.n, where, cap_gap, cap + kCapSlack, 0.0, asserted));
  if (cap_gap > cap + kCapSlack) return out;

  const auto half = last_crossing(p, psi.x_star, 0.5 * S, tau);
  if (!half || *half >= tau) {
    BoundCheck c = make_check("midpoint", "midpoint_distance", run.n, where + " tau_half missing", 1.0, 0.0, 0.0, asserted);
    out.push_back(c);
    return out;
  }
  const double root = std::sqrt(S * psi.psi(S));
  const Vec mid = psi.x_star + 0.5 * S * b;
  out.push_back(make_check("midpoint", "midpoint_distance", run.n, where, norm(L, p.at_time(*half) - mid), 2.0 * root, slack, asserted));
  constexpr int kSamples = 32;
  for (int i = 0; i < kSamples; ++i) {
    const double t = *half + (tau - *half) * i / (kSamples - 1);
    const double dist = dist_to_ray(L, p.at_time(t), psi.x_star, b).distance;
    out.push_back(make_check("midpoint", "ray_distance", run.n, where + " " + fmt("t", t), dist, 4.0 * root, slack, asserted));
  }
  return out;
}

std::vector<BoundCheck> check_angle_length_bounds(const RunRecord& run, const PsiTable& psi,
                                                  const std::vector<double>& times, bool asserted) {
  std::vector<BoundCheck> out;
  const GeodesicResult& g = *run.result;
  const Layout& L = g.path.layout;
  const Cursor cur(g);
  const double slack = run_slack(run);
  const double r2l = std::sqrt(2.0 * psi.lambda);
  for (double t : times) {
    const Vec y = g.path.at_time(t);
    const Vec rel = y - psi.x_star;
    const double r = norm(L, rel);
    const double pt = psi.psi_tilde(r);
    const std::string where = fmt("t", t);
    out.push_back(make_check("angle_length", "angle", run.n, where, norm(L, rel / r - psi.a), 16.0 * pt, slack, asserted));
    const double len = cur.length_to(t);
    const double mane = cur.action_to(t) / r2l;
    out.push_back(make_check("angle_length", "length_le_mane", run.n, where, len, mane, slack, asserted));
    out.push_back(make_check("angle_length", "mane_le_radius", run.n, where, mane, r * (1.0 + pt * pt), slack, asserted));
    out.push_back(make_check("angle_length", "flat_above_base", run.n, where, psi.x_star_flat, min_separation(L, y), slack, asserted));
  }
  return out;
}

std::vector<BoundCheck> check_time_bounds(const RunRecord& run, const PsiTable& psi,
                                          const std::vector<double>& times, bool asserted) {
  std::vector<BoundCheck> out;
  const GeodesicResult& g = *run.result;
  const Layout& L = g.path.layout;
  const Cursor cur(g);
  const double slack = run_slack(run);
  const double lam = psi.lambda;
  const double r2l = std::sqrt(2.0 * lam);
  for (double t : times) {
    if (!(t > 0.0)) continue;
    const Vec y = g.path.at_time(t);
    const double r = norm(L, y - psi.x_star);
    const double pt = psi.psi_tilde(r);
    const double q = 1.0 + pt * pt;
    const std::string where = fmt("t", t);
    const double kin = cur.kinetic_to(t);
    out.push_back(make_check("time_bounds", "kinetic", run.n, where, kin, r2l * r * q, slack, asserted));
    out.push_back(make_check("time_bounds", "kinetic_le_8_lambda_t", run.n, where, r2l * r * q, 8.0 * lam * t, slack, asserted));
    const double ratio = r / (r2l * t);
    out.push_back(make_check("time_bounds", "ratio_floor", run.n, where, 0.5, 1.0 / q, slack, asserted));
    out.push_back(make_check("time_bounds", "ratio_low", run.n, where, 1.0 / q, ratio, slack, asserted));
    out.push_back(make_check("time_bounds", "ratio_high", run.n, where, ratio, q, slack, asserted));
    out.push_back(make_check("time_bounds", "ratio_ceiling", run.n, where, q, 2.0, slack, asserted));
    const Vec dev = y - psi.x_star - r2l * t * psi.a;
    const double d2 = inner(L, dev, dev) / (r2l * t * r2l * t);
    out.push_back(make_check("time_bounds", "defect_sq", run.n, where, d2, 512.0 * pt * pt, slack, asserted));
    const double ph = psi.psi_tilde(0.5 * r2l * t);
    out.push_back(make_check("time_bounds", "defect_sq_half_time", run.n, where, 512.0 * pt * pt, 512.0 * ph * ph, slack, asserted));
  }
  return out;
}

std::vector<BoundCheck> check_defect_bound(const RunRecord& run, const PsiTable& psi,
                                           const std::vector<double>& times, bool asserted) {
  std::vector<BoundCheck> out;
  const GeodesicResult& g = *run.result;
  const Layout& L = g.path.layout;
  const double slack = run_slack(run);
  const double r2l = std::sqrt(2.0 * psi.lambda);
  for (double t : times) {
    if (!(t > 0.0)) continue;
    const Vec dev = g.path.at_time(t) - psi.x_star - r2l * t * psi.a;
    out.push_back(make_check("asymptotic", "defect", run.n, fmt("t", t), norm(L, dev) / (r2l * t),
                             32.0 * psi.psi_tilde(0.5 * r2l * t), slack, asserted));
  }
  return out;
}

double sup_gap(const DiscretePath& p, const DiscretePath& q, double horizon) {
  if (!p.timed() || !q.timed()) throw InputDomainError("gaps need timed paths");
  if (horizon > p.sigma() || horizon > q.sigma()) throw InputDomainError("horizon exceeds a path's domain");
  std::vector<double> ts;
  for (int k = 0; k < p.size(); ++k)
    if ((*p.times)[k] <= horizon) ts.push_back((*p.times)[k]);
  for (int k = 0; k < q.size(); ++k)
    if ((*q.times)[k] <= horizon) ts.push_back((*q.times)[k]);
  ts.push_back(horizon);
  double gap = 0.0;
  for (double t : ts) gap = std::max(gap, norm(p.layout, p.at_time(t) - q.at_time(t)));
  return gap;
}

HyperbolicReport build_sequence(const Vec& x, const Vec& a, double lambda, const PotentialSpec& F, int n_from,
                                int n_to, const PsiTable& psi, const SequenceOptions& opts) {
  opts.solve.validate();
  const Layout& L = F.layout();
  if (n_to < n_from) throw InputDomainError("n_to must be at least n_from");
  if (opts.workers < 1) throw InputDomainError("workers must be at least 1");
  if (opts.mode == Mode::strict && n_from <= psi.n0)
    throw InputDomainError("strict mode needs n_from > n0 = " + std::to_string(psi.n0));
  if (opts.mode == Mode::exploratory && n_from < 4) throw InputDomainError("exploratory mode needs n_from >= 4");
  if (!(psi.layout == L) || !psi.x.isApprox(x) || !psi.a.isApprox(a) || psi.lambda != lambda)
    throw InputDomainError("Psi table was built for different inputs");

  HyperbolicReport rep;
  rep.mode = opts.mode;
  rep.n_from = n_from;
  rep.n_to = n_to;
  rep.psi = psi;
  const bool strict = opts.mode == Mode::strict;
  const double dist = norm(L, x - psi.x_star);
  const int j_lo = strict ? psi.n0 : std::max(n_from - 4, static_cast<int>(std::floor(std::log2(dist))) + 1);

  const int count = n_to - n_from + 1;
  rep.runs.resize(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < count; i = next++) {
      RunRecord& run = rep.runs[static_cast<std::size_t>(i)];
      run.n = n_from + i;
      run.radius = std::ldexp(1.0, run.n);
      run.endpoint = psi.x_star + run.radius * a;
      try {
        run.result = solve_geodesic(x, run.endpoint, F, lambda, opts.solve);
        const auto& g = *run.result;
        run.eps_disc = g.action.value > 0.0 ? 10.0 * g.action.quadrature_error_estimate / g.action.value : 0.0;
        run.crossings = crossing_times(g.path, psi.x_star, j_lo, run.n);
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  {
    std::vector<std::thread> pool;
    const int nw = std::min(opts.workers, count);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const double r2l = std::sqrt(2.0 * lambda);
  for (const RunRecord& run : rep.runs) {
    const bool converged = run.result && run.result->converged;
    rep.checks.push_back(make_check("solver", "converged", run.n, "T=2^" + std::to_string(run.n), converged ? 0.0 : 1.0,
                                    0.0, 0.0, strict));
    if (!run.result) {
      rep.notes.push_back("run n=" + std::to_string(run.n) + " failed: " + run.error);
      continue;
    }
    if (!run.error.empty()) rep.notes.push_back("run n=" + std::to_string(run.n) + ": " + run.error);
    const GeodesicResult& g = *run.result;
    if (!g.converged) rep.notes.push_back("run n=" + std::to_string(run.n) + " did not converge");
    const double slack = run_slack(run);
    const std::string where = "T=2^" + std::to_string(run.n);
    const double mane = g.action.value / r2l;
    rep.checks.push_back(make_check("far_field", "length_le_mane", run.n, where, g.path.length(), mane, slack, strict));
    rep.checks.push_back(make_check("far_field", "mane_le_travel_plus_psi", run.n, where, mane, run.radius + psi.psi(run.radius), slack, strict));
    rep.checks.push_back(make_check("energy", "canonical_speed", run.n, where, g.energy_residual, 1e-10, 0.0, strict));
    if (run.crossings.empty()) continue;

    const auto windows = check_crossing_windows(run, lambda, j_lo, strict);
    rep.checks.insert(rep.checks.end(), windows.begin(), windows.end());

    std::vector<double> times;
    for (const auto& [j, s] : run.crossings) {
      times.push_back(s);
      const auto mid = check_midpoint_bound(run, psi, std::ldexp(1.0, j), s, strict);
      rep.checks.insert(rep.checks.end(), mid.begin(), mid.end());
      if (j < run.n) {
        if (const auto h = last_crossing(g.path, psi.x_star, std::ldexp(std::sqrt(2.0), j), g.sigma())) times.push_back(*h);
      }
    }
    std::sort(times.begin(), times.end());
    const auto angle = check_angle_length_bounds(run, psi, times, strict);
    rep.checks.insert(rep.checks.end(), angle.begin(), angle.end());
    const auto tb = check_time_bounds(run, psi, times, strict);
    rep.checks.insert(rep.checks.end(), tb.begin(), tb.end());

    const double t_min = std::ldexp(1.0, j_lo + 1) / r2l;
    std::vector<double> dtimes;
    for (double t : times)
      if (t >= t_min) dtimes.push_back(t);
    for (int k = j_lo + 1; std::ldexp(1.0, k) / r2l <= g.sigma(); ++k) dtimes.push_back(std::ldexp(1.0, k) / r2l);
    std::sort(dtimes.begin(), dtimes.end());
    const auto db = check_defect_bound(run, psi, dtimes, strict);
    rep.checks.insert(rep.checks.end(), db.begin(), db.end());

    for (int k = 1; k < g.path.size(); ++k) {
      const double t = (*g.path.times)[k];
      const Vec y = g.path.node(k);
      const Vec rel = y - psi.x_star;
      DefectSample s;
      s.n = run.n;
      s.t = t;
      s.radius = norm(L, rel);
      s.angle_error = s.radius > 0.0 ? norm(L, rel / s.radius - a) : 0.0;
      s.defect = norm(L, rel - r2l * t * a) / (r2l * t);
      s.bound = 32.0 * psi.psi_tilde(0.5 * r2l * t);
      rep.defect_curve.push_back(s);
    }
  }

  std::vector<const RunRecord*> ok;
  for (const RunRecord& run : rep.runs)
    if (run.result && !run.crossings.empty()) ok.push_back(&run);
  if (ok.size() < 2) {
    rep.notes.push_back("insufficient runs for the velocity estimate and Cauchy gaps");
  } else {
    const RunRecord& big = *ok.back();
    const RunRecord& prev = *ok[ok.size() - 2];
    double th = opts.horizon;
    if (th <= 0.0) {
      const auto it = big.crossings.find(big.n - 1);
      th = it != big.crossings.end() ? it->second : big.result->sigma();
      th = std::min(th, prev.result->sigma());
    }
    if (th > big.result->sigma() || th > prev.result->sigma()) {
      rep.notes.push_back("velocity horizon exceeds the two largest runs");
    } else {
      rep.horizon = th;
      const Vec v = big.result->path.at_time(th) / th;
      rep.velocity_estimate = v;
      rep.velocity_error = norm(L, v - r2l * a);
      rep.velocity_bound = r2l * 32.0 * psi.psi_tilde(0.5 * r2l * th);
      rep.checks.push_back(make_check("asymptotic", "velocity", big.n, fmt("T_h", th), rep.velocity_error,
                                      rep.velocity_bound, run_slack(big), strict));
    }
    rep.cauchy_horizon = ok.front()->result->sigma();
    for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
      const auto& p = ok[i]->result->path;
      const auto& q = ok[i + 1]->result->path;
      rep.cauchy_gaps.push_back(rep.cauchy_horizon <= q.sigma() ? sup_gap(p, q, rep.cauchy_horizon)
                                                                : std::numeric_limits<double>::quiet_NaN());
    }
  }

  bool unit = true;
  for (double m : L.masses) unit = unit && m == 1.0;
  if (!unit) rep.notes.push_back("non-unit masses: bound constants unvalidated (norms use the mass-weighted inner product)");
  rep.notes.push_back("Psi uses an upper estimate of m_lambda(x, x*), which can only loosen the bounds");
  if (!strict) rep.notes.push_back("exploratory mode: checks are informational");
  return rep;
}

}  // namespace hypermane
