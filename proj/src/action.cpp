#include "hypermane/action.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hypermane {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputDomainError("lambda must be positive");
}

void require_usable(const DiscretePath& path) {
  if (path.size() < 2) throw InputDomainError("path needs at least two nodes");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DiscretePath::DiscretePath(Layout layout_in, Eigen::MatrixXd nodes_in)
    : layout(std::move(layout_in)), nodes(std::move(nodes_in)) {
  layout.validate();
  if (nodes.rows() != layout.size()) throw InputDomainError("node dimension does not match layout");
}

DiscretePath::DiscretePath(Layout layout_in, Eigen::MatrixXd nodes_in, Vec times_in)
    : DiscretePath(std::move(layout_in), std::move(nodes_in)) {
  if (times_in.size() != nodes.cols()) throw InputDomainError("time stamps do not match node count");
  times = std::move(times_in);
}

double DiscretePath::sigma() const {
  if (!timed()) throw InputDomainError("path has no time stamps");
  return (*times)[times->size() - 1] - (*times)[0];
}

double DiscretePath::length() const {
  double l = 0.0;
  for (int k = 0; k + 1 < size(); ++k) l += norm(layout, nodes.col(k + 1) - nodes.col(k));
  return l;
}

Vec DiscretePath::at_time(double t) const {
  if (!timed()) throw InputDomainError("path has no time stamps");
  const Vec& ts = *times;
  const int m = size();
  if (t <= ts[0]) return nodes.col(0);
  if (t >= ts[m - 1]) return nodes.col(m - 1);
  const auto it = std::upper_bound(ts.data(), ts.data() + m, t);
  const int k = static_cast<int>(it - ts.data()) - 1;
  const double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
  return (1.0 - w) * nodes.col(k) + w * nodes.col(k + 1);
}

void DiscretePath::validate() const {
  require_usable(*this);
  if (!nodes.allFinite()) throw InputDomainError("path nodes must be finite");
  if (timed()) {
    for (int k = 0; k + 1 < size(); ++k)
      if (!((*times)[k + 1] > (*times)[k])) throw InputDomainError("time stamps must increase strictly");
  }
}

ActionValue lagrangian_action(const DiscretePath& path, const PotentialSpec& F, double lambda, bool estimate_error) {
  require_lambda(lambda);
  path.validate();
  if (!path.timed()) throw InputDomainError("lagrangian action needs a timed path");
  const Vec& ts = *path.times;
  double kinetic = 0.0;
  double potential = 0.0;
  double potential_half = 0.0;
  for (int k = 0; k + 1 < path.size(); ++k) {
    const Vec a = path.nodes.col(k);
    const Vec b = path.nodes.col(k + 1);
    const double dt = ts[k + 1] - ts[k];
    const Vec d = b - a;
    kinetic += inner(path.layout, d, d) / (2.0 * dt);
    potential += dt * (F.evaluate(0.5 * (a + b), Branch::clamped) + lambda);
    if (estimate_error)
      potential_half += 0.5 * dt *
                        (F.evaluate(0.75 * a + 0.25 * b, Branch::clamped) +
                         F.evaluate(0.25 * a + 0.75 * b, Branch::clamped) + 2.0 * lambda);
  }
  ActionValue v;
  v.value = kinetic + potential;
  if (estimate_error) {
    v.quadrature_error_estimate = std::abs(potential - potential_half) / 3.0;
    v.raw = false;
  }
  return v;
}

ActionValue maupertuis_action(const DiscretePath& path, const PotentialSpec& F, double lambda, bool estimate_error) {
  require_lambda(lambda);
  path.validate();
  double total = 0.0;
  double total_half = 0.0;
  for (int k = 0; k + 1 < path.size(); ++k) {
    const Vec a = path.nodes.col(k);
    const Vec b = path.nodes.col(k + 1);
    const double len = norm(path.layout, b - a);
    total += len * std::sqrt(2.0 * F.evaluate(0.5 * (a + b), Branch::clamped) + 2.0 * lambda);
    if (estimate_error)
      total_half += 0.5 * len *
                    (std::sqrt(2.0 * F.evaluate(0.75 * a + 0.25 * b, Branch::clamped) + 2.0 * lambda) +
                     std::sqrt(2.0 * F.evaluate(0.25 * a + 0.75 * b, Branch::clamped) + 2.0 * lambda));
  }
  ActionValue v;
  v.value = total;
  if (estimate_error) {
    v.quadrature_error_estimate = std::abs(total - total_half) / 3.0;
    v.raw = false;
  }
  return v;
}

Eigen::MatrixXd action_gradient(const DiscretePath& path, const PotentialSpec& F, double lambda) {
  require_lambda(lambda);
  path.validate();
  const int m = path.size();
  const int n = path.layout.size();
  const int d = path.layout.dim;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, m);
  Vec grad_f;
  for (int k = 0; k + 1 < m; ++k) {
    const Vec a = path.nodes.col(k);
    const Vec b = path.nodes.col(k + 1);
    const Vec diff = b - a;
    const double len = norm(path.layout, diff);
    const double w = std::sqrt(2.0 * F.value_and_gradient(0.5 * (a + b), Branch::clamped, grad_f) + 2.0 * lambda);
    Vec mdiff = diff;
    for (int i = 0; i < path.layout.bodies(); ++i) mdiff.segment(i * d, d) *= path.layout.masses[i];
    // d|diff|/db = M diff / |diff|; d w/d mid = grad F / w, and d mid/da = d mid/db = 1/2.
    const Vec length_part = len > 0.0 ? Vec(w * mdiff / len) : Vec(Vec::Zero(n));
    const Vec density_part = (0.5 * len / w) * grad_f;
    g.col(k) += density_part - length_part;
    g.col(k + 1) += density_part + length_part;
  }
  g.col(0).setZero();
  g.col(m - 1).setZero();
  return g;
}

DiscretePath canonical_reparametrize(const DiscretePath& path, const PotentialSpec& F, double lambda) {
  require_lambda(lambda);
  path.validate();
  Vec ts(path.size());
  ts[0] = 0.0;
  for (int k = 0; k + 1 < path.size(); ++k) {
    const Vec a = path.nodes.col(k);
    const Vec b = path.nodes.col(k + 1);
    const double len = norm(path.layout, b - a);
    if (len == 0.0) throw InputDomainError("canonical reparametrization needs a path without stalls");
    ts[k + 1] = ts[k] + len / std::sqrt(2.0 * F.evaluate(0.5 * (a + b), Branch::clamped) + 2.0 * lambda);
  }
  return DiscretePath(path.layout, path.nodes, std::move(ts));
}

double energy_residual(const DiscretePath& path, const PotentialSpec& F, double lambda) {
  require_lambda(lambda);
  path.validate();
  if (!path.timed()) throw InputDomainError("energy residual needs a timed path");
  const Vec& ts = *path.times;
  double worst = 0.0;
  for (int k = 0; k + 1 < path.size(); ++k) {
    const Vec a = path.nodes.col(k);
    const Vec b = path.nodes.col(k + 1);
    const double dt = ts[k + 1] - ts[k];
    const Vec v = (b - a) / dt;
    const double target = 2.0 * F.evaluate(0.5 * (a + b), Branch::clamped) + 2.0 * lambda;
    worst = std::max(worst, std::abs(inner(path.layout, v, v) - target) / (2.0 * lambda));
  }
  return worst;
}

DiscretePath strip_stationary(const DiscretePath& path) {
  if (path.size() == 0) return path;
  double scale = 0.0;
  for (int k = 0; k < path.size(); ++k) scale = std::max(scale, norm(path.layout, path.nodes.col(k)));
  const double tol = 1e-14 * (1.0 + scale);
  std::vector<int> keep{0};
  std::vector<double> kept_times;
  double removed = 0.0;
  if (path.timed()) kept_times.push_back((*path.times)[0]);
  for (int k = 1; k < path.size(); ++k) {
    const int last = keep.back();
    if (norm(path.layout, path.nodes.col(k) - path.nodes.col(last)) <= tol) {
      if (path.timed()) removed += (*path.times)[k] - (*path.times)[k - 1];
      continue;
    }
    if (path.timed()) kept_times.push_back((*path.times)[k] - removed);
    keep.push_back(k);
  }
  Eigen::MatrixXd nodes(path.nodes.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) nodes.col(static_cast<Eigen::Index>(c)) = path.nodes.col(keep[c]);
  DiscretePath out;
  out.layout = path.layout;
  out.nodes = std::move(nodes);
  if (path.timed()) out.times = Eigen::Map<const Vec>(kept_times.data(), static_cast<Eigen::Index>(kept_times.size()));
  return out;
}

void write_path_csv(std::ostream& os, const DiscretePath& path) {
  const Layout& L = path.layout;
  os << "# bodies=" << L.bodies() << " dim=" << L.dim << " masses=";
  for (int i = 0; i < L.bodies(); ++i) os << (i ? ";" : "") << format_double(L.masses[i]);
  os << "\n";
  os << "t";
  for (int i = 0; i < L.bodies(); ++i)
    for (int c = 0; c < L.dim; ++c) os << ",b" << i << "_" << c;
  os << "\n";
  for (int k = 0; k < path.size(); ++k) {
    if (path.timed()) os << format_double((*path.times)[k]);
    for (int r = 0; r < L.size(); ++r) os << "," << format_double(path.nodes(r, k));
    os << "\n";
  }
}

DiscretePath read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw InputDomainError("path CSV: missing header line");
  Layout L;
  int bodies = -1;
  {
    std::istringstream hs(line.substr(2));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "bodies") bodies = std::stoi(val);
      else if (key == "dim") L.dim = std::stoi(val);
      else if (key == "masses") {
        std::istringstream ms(val);
        std::string m;
        while (std::getline(ms, m, ';')) L.masses.push_back(std::stod(m));
      }
    }
  }
  if (bodies != L.bodies()) throw InputDomainError("path CSV: mass count does not match body count");
  L.validate();
  if (!std::getline(is, line)) throw InputDomainError("path CSV: missing column header");
  std::vector<std::vector<double>> cols;
  std::vector<double> ts;
  bool any_time = false;
  bool all_time = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != L.size() + 1) throw InputDomainError("path CSV: wrong column count");
    if (cells[0].empty()) all_time = false;
    else {
      any_time = true;
      ts.push_back(std::stod(cells[0]));
    }
    std::vector<double> c(static_cast<std::size_t>(L.size()));
    for (int r = 0; r < L.size(); ++r) c[static_cast<std::size_t>(r)] = std::stod(cells[static_cast<std::size_t>(r + 1)]);
    cols.push_back(std::move(c));
  }
  if (any_time && !all_time) throw InputDomainError("path CSV: time column must be all filled or all empty");
  Eigen::MatrixXd nodes(L.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (int r = 0; r < L.size(); ++r) nodes(r, static_cast<Eigen::Index>(k)) = cols[k][static_cast<std::size_t>(r)];
  if (any_time) return DiscretePath(L, std::move(nodes), Eigen::Map<Vec>(ts.data(), static_cast<Eigen::Index>(ts.size())));
  return DiscretePath(L, std::move(nodes));
}

}  // namespace hypermane
