#include "hypermane/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "hypermane/ode_oracle.hpp"

namespace hypermane {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <class Fn>
void write_stream(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
}

Vec random_config(const Layout& L, std::mt19937_64& rng, double spread, double min_sep) {
  std::uniform_real_distribution<double> u(-spread, spread);
  for (;;) {
    Vec x(L.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = u(rng);
    if (min_separation(L, x) >= min_sep) return x;
  }
}

struct SuiteItem {
  std::string name;
  bool pass = true;
  int samples = 0;
  double worst = 0.0;
  double threshold = 0.0;
  std::string detail;
};

Json item_json(const SuiteItem& s) {
  return Json{{"name", s.name},     {"pass", s.pass},           {"samples", s.samples},
              {"worst", s.worst},   {"threshold", s.threshold}, {"detail", s.detail}};
}

SuiteItem potential_gradient_item(const PotentialSpec& F, int samples, std::mt19937_64& rng) {
  SuiteItem it{"potential_gradient", true, 0, 0.0, 1e-6, ""};
  const Layout& L = F.layout();
  for (int s = 0; s < samples; ++s) {
    const Vec x = random_config(L, rng, 3.0, 0.5);
    const Vec g = F.euclidean_gradient(x);
    const double h = 1e-6 * (1.0 + x.norm());
    Vec fd(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      fd[k] = (F.evaluate(xp) - F.evaluate(xm)) / (2.0 * h);
    }
    const double rel = (g - fd).norm() / std::max(fd.norm(), 1e-8);
    it.worst = std::max(it.worst, rel);
    ++it.samples;
  }
  it.pass = it.worst < it.threshold;
  return it;
}

SuiteItem action_gradient_item(const PotentialSpec& F, double lambda, int samples, std::mt19937_64& rng) {
  SuiteItem it{"action_gradient", true, 0, 0.0, 1e-6, ""};
  const Layout& L = F.layout();
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd X(L.size(), 6);
    for (int k = 0; k < 6; ++k) X.col(k) = random_config(L, rng, 3.0, 0.5);
    DiscretePath p(L, X);
    try {
      const Eigen::MatrixXd g = action_gradient(p, F, lambda);
      Eigen::MatrixXd fd = Eigen::MatrixXd::Zero(X.rows(), X.cols());
      for (int k = 1; k + 1 < X.cols(); ++k)
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
          const double h = 1e-6 * (1.0 + X.col(k).norm());
          DiscretePath pp = p, pm = p;
          pp.nodes(r, k) += h;
          pm.nodes(r, k) -= h;
          fd(r, k) = (maupertuis_action(pp, F, lambda).value - maupertuis_action(pm, F, lambda).value) / (2.0 * h);
        }
      it.worst = std::max(it.worst, (g - fd).norm() / std::max(fd.norm(), 1e-8));
      ++it.samples;
    } catch (const SingularEvaluationError&) {
    }
  }
  it.pass = it.worst < it.threshold;
  return it;
}

SuiteItem envelope_domination_item(const PotentialSpec& F, int samples, std::mt19937_64& rng) {
  SuiteItem it{"envelope_domination", true, 0, 0.0, 0.0, ""};
  const Layout& L = F.layout();
  const double w = F.near_region_width();
  std::uniform_real_distribution<double> logr(std::log(w), std::log(w) + std::log(1e4));
  std::uniform_int_distribution<int> body(0, L.bodies() - 1);
  const int total = samples * 100;
  for (int s = 0; s < total; ++s) {
    int i = body(rng), j = body(rng);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    const double r = std::exp(logr(rng));
    const double excess = F.pair_value(i, j, r) - F.envelope().value(r);
    ++it.samples;
    if (excess > 1e-12 * std::abs(F.envelope().value(r))) {
      if (it.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "pair (%d,%d) at r=%.6g exceeds the envelope by %.6g", i, j, r, excess);
        it.detail = buf;
      }
      it.pass = false;
    }
    it.worst = std::max(it.worst, excess);
  }
  return it;
}

SuiteItem envelope_series_item(const PotentialSpec& F) {
  SuiteItem it{"envelope_series_monotone", true, 0, 0.0, 0.0, ""};
  double prev = 0.0;
  for (int K = 1; K <= 30; ++K) {
    const double term = F.envelope().dyadic_term(K);
    const double cur = prev + term;
    ++it.samples;
    if (!(cur >= prev) || !std::isfinite(cur)) it.pass = false;
    prev = cur;
  }
  it.worst = prev;
  try {
    it.detail = "tail bound beyond K=30: " + std::to_string(F.envelope().dyadic_tail_bound(31));
  } catch (const DivergenceError& e) {
    it.detail = e.what();
  }
  return it;
}

void metric_items(const ProblemSpec& spec, int samples, std::mt19937_64& rng, std::vector<SuiteItem>& out) {
  const PotentialSpec& F = spec.potential;
  const Layout& L = F.layout();
  SuiteItem sym{"metric_symmetry", true, 0, 0.0, 2.0, "gap / tolerance"};
  SuiteItem tri{"metric_triangle", true, 0, 0.0, 3.0, "excess / tolerance"};
  SuiteItem low{"metric_lower_bound", true, 0, 0.0, 0.0, "violations"};
  for (int s = 0; s < samples; ++s) {
    const Vec x = random_config(L, rng, 3.0, 0.5);
    const Vec y = random_config(L, rng, 3.0, 0.5);
    const Vec z = random_config(L, rng, 3.0, 0.5);
    try {
      const ManeEstimate xy = mane_potential(x, y, F, spec.lambda, spec.solver);
      const ManeEstimate yx = mane_potential(y, x, F, spec.lambda, spec.solver);
      const ManeEstimate yz = mane_potential(y, z, F, spec.lambda, spec.solver);
      const ManeEstimate xz = mane_potential(x, z, F, spec.lambda, spec.solver);
      const double tol = std::max({xy.tolerance, yx.tolerance, yz.tolerance, xz.tolerance, 1e-300});
      const double gap = std::abs(xy.upper - yx.upper) / tol;
      const double excess = std::max(0.0, xz.upper - xy.upper - yz.upper) / tol;
      sym.worst = std::max(sym.worst, gap);
      tri.worst = std::max(tri.worst, excess);
      if (gap > 2.0) sym.pass = false;
      if (excess > 3.0) tri.pass = false;
      for (const auto* e : {&xy, &yx, &yz, &xz}) {
        ++low.samples;
        if (!e->lower_satisfied) {
          low.pass = false;
          low.worst += 1.0;
        }
      }
      ++sym.samples;
      ++tri.samples;
    } catch (const std::exception& e) {
      sym.pass = tri.pass = false;
      sym.detail = e.what();
    }
  }
  out.push_back(sym);
  out.push_back(tri);
  out.push_back(low);
}

void oracle_items(const ProblemSpec& spec, int samples, std::mt19937_64& rng, std::vector<SuiteItem>& out) {
  const PotentialSpec& F = spec.potential;
  const Layout& L = F.layout();
  constexpr double kTol = 1e-10;
  SuiteItem en{"energy_conservation", true, 0, 0.0, 10.0 * kTol, "relative to max(1, |E|)"};
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const Vec x = random_config(L, rng, 3.0, 1.0);
    Vec v(L.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = nd(rng);
    const Trajectory tr = integrate(x, v, F, 1.0, kTol);
    if (tr.status != TrajectoryStatus::completed) continue;
    const double rel = tr.energy_drift() / std::max(1.0, std::abs(tr.front().energy));
    en.worst = std::max(en.worst, rel);
    ++en.samples;
  }
  en.pass = en.worst <= en.threshold;
  out.push_back(en);

  SuiteItem sh{"shooting_mismatch", true, 0, 0.0, 1e-2, ""};
  try {
    const Vec x = random_config(L, rng, 3.0, 1.0);
    const Vec y = random_config(L, rng, 3.0, 1.0);
    const GeodesicResult g = solve_geodesic(x, y, F, spec.lambda, spec.solver);
    if (!g.converged) {
      sh.pass = false;
      sh.detail = "geodesic did not converge";
    } else {
      const ShootReport rep = shoot_match(g, F, 1e-10);
      sh.worst = rep.mismatch;
      sh.samples = 1;
      sh.pass = rep.mismatch < sh.threshold;
    }
  } catch (const std::exception& e) {
    sh.pass = false;
    sh.detail = e.what();
  }
  out.push_back(sh);
}

}  // namespace

void Diagnostics::info(const std::string& msg) const {
  if (!quiet && err) *err << msg << '\n';
}

void Diagnostics::error(const std::string& msg) const {
  if (err) *err << "error: " << msg << '\n';
}

int cmd_geodesic(const ProblemSpec& spec, const Diagnostics& diag) {
  const ManeEstimate est = mane_potential(*spec.x, *spec.y, spec.potential, spec.lambda, spec.solver);
  std::filesystem::create_directories(spec.output_dir);
  Json j;
  if (est.geodesic) {
    j = geodesic_to_json(*est.geodesic);
  } else {
    j["action"] = 0.0;
    j["converged"] = true;
    j["nodes"] = 0;
    j["sigma"] = 0.0;
  }
  j["certificate"] = certificate_to_json(est);
  write_file(spec.output_dir / "geodesic.json", dump_json(j));
  if (est.geodesic) write_stream(spec.output_dir / "path.csv", [&](std::ostream& os) { write_path_csv(os, est.geodesic->path); });
  if (est.geodesic && !est.geodesic->converged) {
    diag.error("solver did not converge");
    return kExitNotConverged;
  }
  diag.info("action " + std::to_string(est.upper));
  return kExitOk;
}

int cmd_hyperbolic(const ProblemSpec& spec, const Diagnostics& diag) {
  const int j_max = spec.j_max.value_or(spec.n_to + 8);
  diag.info("building Psi table");
  const PsiTable psi = build_psi_table(*spec.x, *spec.a, spec.lambda, spec.potential, j_max, spec.solver);
  diag.info("n0 = " + std::to_string(psi.n0));
  if (spec.mode == Mode::strict && spec.n_from <= psi.n0)
    throw InputDomainError("field 'n_from': strict mode needs n_from > n0 = " + std::to_string(psi.n0));
  SequenceOptions so;
  so.mode = spec.mode;
  so.solve = spec.solver;
  so.workers = spec.workers;
  so.horizon = spec.horizon;
  const HyperbolicReport rep = build_sequence(*spec.x, *spec.a, spec.lambda, spec.potential, spec.n_from, spec.n_to, psi, so);
  std::filesystem::create_directories(spec.output_dir);
  write_file(spec.output_dir / "hyperbolic_report.json", dump_json(report_to_json(rep)));
  for (const RunRecord& run : rep.runs) {
    const std::string tag = std::to_string(run.n);
    write_stream(spec.output_dir / ("defect_n" + tag + ".csv"), [&](std::ostream& os) { write_defect_csv(os, rep, run.n); });
    if (run.result)
      write_stream(spec.output_dir / ("path_n" + tag + ".csv"), [&](std::ostream& os) { write_path_csv(os, run.result->path); });
  }
  for (const auto& n : rep.notes) diag.info(n);
  diag.info(std::to_string(rep.asserted_count()) + " asserted checks, " + std::to_string(rep.asserted_failures()) +
            " failed");
  return rep.all_asserted_pass() ? kExitOk : kExitChecksFailed;
}

int cmd_verify(const ProblemSpec& spec, const Diagnostics& diag) {
  std::mt19937_64 rng(spec.seed);
  std::vector<SuiteItem> items;
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      items.push_back({name, false, 0, 0.0, 0.0, e.what()});
    }
  };
  guarded("potential_gradient", [&] { items.push_back(potential_gradient_item(spec.potential, spec.samples, rng)); });
  guarded("action_gradient",
          [&] { items.push_back(action_gradient_item(spec.potential, spec.lambda, spec.samples, rng)); });
  guarded("envelope_domination", [&] { items.push_back(envelope_domination_item(spec.potential, spec.samples, rng)); });
  guarded("envelope_series_monotone", [&] { items.push_back(envelope_series_item(spec.potential)); });
  guarded("metric", [&] { metric_items(spec, std::max(1, spec.samples / 4), rng, items); });
  guarded("oracle", [&] { oracle_items(spec, spec.samples, rng, items); });

  Json j;
  Json arr = Json::array();
  int failed = 0;
  for (const auto& it : items) {
    arr.push_back(item_json(it));
    if (!it.pass) {
      ++failed;
      diag.info("FAIL " + it.name + (it.detail.empty() ? "" : ": " + it.detail));
    }
  }
  j["checks"] = arr;
  j["passed"] = static_cast<int>(items.size()) - failed;
  j["failed"] = failed;
  j["seed"] = spec.seed;
  std::filesystem::create_directories(spec.output_dir);
  write_file(spec.output_dir / "verify.json", dump_json(j));
  return failed == 0 ? kExitOk : kExitChecksFailed;
}

int run_command(const ProblemSpec& spec, const Diagnostics& diag) {
  try {
    switch (spec.command) {
      case Command::geodesic: return cmd_geodesic(spec, diag);
      case Command::hyperbolic: return cmd_hyperbolic(spec, diag);
      case Command::verify: return cmd_verify(spec, diag);
    }
  } catch (const CollisionObstructionError& e) {
    diag.error(e.what());
    return kExitObstruction;
  } catch (const InputDomainError& e) {
    diag.error(e.what());
    return kExitBadSpec;
  } catch (const std::exception& e) {
    diag.error(e.what());
    return kExitNotConverged;
  }
  return kExitBadSpec;
}

}  // namespace hypermane
