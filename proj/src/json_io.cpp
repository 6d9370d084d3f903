#include "hypermane/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace hypermane {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void put_number(std::ostream& os, double v) {
  if (!std::isfinite(v)) {
    os << "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void write(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        os << pad << Json(it.key()).dump() << sep;
        write(os, it.value(), indent, depth + 1);
      }
      os << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ',';
        first = false;
        os << pad;
        write(os, v, indent, depth + 1);
      }
      os << close << ']';
      return;
    }
    case Json::value_t::number_float:
      put_number(os, j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

const Json& require(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) throw InputDomainError("missing field '" + field + "." + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw InputDomainError("field '" + field + "' must be a number");
  return j.get<double>();
}

double number_at(const Json& j, const char* key, const std::string& field) {
  return number(require(j, key, field), field + "." + key);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  os << '\n';
  return os.str();
}

Json config_to_json(const Configuration& c) {
  Json j;
  j["d"] = c.dim();
  j["masses"] = c.layout().masses;
  Json bodies = Json::array();
  for (int i = 0; i < c.bodies(); ++i) bodies.push_back(vec_json(c.body(i)));
  j["bodies"] = bodies;
  return j;
}

Configuration config_from_json(const Json& j, const std::string& field) {
  if (!j.is_object()) throw InputDomainError("field '" + field + "' must be an object");
  const Json& d = require(j, "d", field);
  if (!d.is_number_integer()) throw InputDomainError("field '" + field + ".d' must be an integer");
  const Json& bodies = require(j, "bodies", field);
  if (!bodies.is_array()) throw InputDomainError("field '" + field + ".bodies' must be an array");
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const std::string f = field + ".bodies[" + std::to_string(i) + "]";
    if (!bodies[i].is_array()) throw InputDomainError("field '" + f + "' must be an array");
    std::vector<double> p;
    for (std::size_t k = 0; k < bodies[i].size(); ++k) p.push_back(number(bodies[i][k], f));
    pts.push_back(std::move(p));
  }
  std::vector<double> masses(pts.size(), 1.0);
  if (j.contains("masses")) {
    const Json& m = j.at("masses");
    if (!m.is_array() || m.size() != pts.size())
      throw InputDomainError("field '" + field + ".masses' must list one mass per body");
    for (std::size_t i = 0; i < m.size(); ++i) masses[i] = number(m[i], field + ".masses");
  }
  try {
    return Configuration::from_bodies(d.get<int>(), masses, pts);
  } catch (const InputDomainError& e) {
    throw InputDomainError("field '" + field + "': " + e.what());
  }
}

Json kind_to_json(const PairKind& kind) {
  return std::visit(overloaded{
                        [](const Newtonian&) { return Json("newtonian"); },
                        [](const Homogeneous& k) { return Json{{"homogeneous", {{"alpha", k.alpha}}}}; },
                        [](const QuasiHomogeneous& k) {
                          return Json{{"quasi_homogeneous", {{"alpha", k.alpha}, {"beta", k.beta}, {"delta", k.delta}}}};
                        },
                        [](const LennardJones& k) { return Json{{"lennard_jones", {{"A", k.A}, {"B", k.B}}}}; },
                        [](const SeeligerYukawa& k) { return Json{{"seeliger_yukawa", {{"A", k.A}, {"B", k.B}}}}; },
                        [](const MucketTreder& k) { return Json{{"mucket_treder", {{"A", k.A}, {"B", k.B}}}}; },
                        [](const Logarithmic&) { return Json("logarithmic"); },
                        [](const ZeroPair&) { return Json("zero"); },
                    },
                    kind);
}

PairKind kind_from_json(const Json& j, const std::string& field) {
  PairKind kind;
  std::string name;
  Json params = Json::object();
  if (j.is_string()) {
    name = j.get<std::string>();
  } else if (j.is_object() && j.size() == 1) {
    name = j.begin().key();
    params = j.begin().value();
    if (!params.is_object()) throw InputDomainError("field '" + field + "." + name + "' must be an object");
  } else {
    throw InputDomainError("field '" + field + "' must be a kind name or a one-key object");
  }
  const std::string pf = field + "." + name;
  if (name == "newtonian") kind = Newtonian{};
  else if (name == "homogeneous") kind = Homogeneous{number_at(params, "alpha", pf)};
  else if (name == "quasi_homogeneous")
    kind = QuasiHomogeneous{number_at(params, "alpha", pf), number_at(params, "beta", pf), number_at(params, "delta", pf)};
  else if (name == "lennard_jones") kind = LennardJones{number_at(params, "A", pf), number_at(params, "B", pf)};
  else if (name == "seeliger_yukawa") kind = SeeligerYukawa{number_at(params, "A", pf), number_at(params, "B", pf)};
  else if (name == "mucket_treder") kind = MucketTreder{number_at(params, "A", pf), number_at(params, "B", pf)};
  else if (name == "logarithmic") kind = Logarithmic{};
  else if (name == "zero") kind = ZeroPair{};
  else throw InputDomainError("field '" + field + "': unknown kind '" + name + "'");
  try {
    validate_kind(kind);
  } catch (const InputDomainError& e) {
    throw InputDomainError("field '" + field + "': " + e.what());
  }
  return kind;
}

Json envelope_to_json(const Envelope& f) {
  return std::visit(overloaded{
                        [](const ZeroEnvelope&) { return Json("zero"); },
                        [](const PowerEnvelope& e) { return Json{{"power", {{"C", e.C}, {"p", e.p}}}}; },
                        [](const LogPowerEnvelope& e) { return Json{{"log_power", {{"C", e.C}, {"beta", e.beta}}}}; },
                        [](const TableEnvelope& e) {
                          Json pts = Json::array();
                          for (const auto& [s, v] : e.points) pts.push_back(Json::array({s, v}));
                          return Json{{"table", pts}, {"tail_exponent", e.tail_exponent}};
                        },
                    },
                    f.form());
}

Envelope envelope_from_json(const Json& j, const std::string& field) {
  try {
    if (j.is_string()) {
      if (j.get<std::string>() == "zero") return Envelope(ZeroEnvelope{});
      throw InputDomainError("unknown envelope '" + j.get<std::string>() + "'");
    }
    if (!j.is_object() || j.empty()) throw InputDomainError("envelope must be \"auto\", \"zero\" or an object");
    if (j.contains("table")) {
      const Json& t = j.at("table");
      if (!t.is_array() || t.empty()) throw InputDomainError("table must be a nonempty array of [s, f] pairs");
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : t) {
        if (!p.is_array() || p.size() != 2) throw InputDomainError("table entries must be [s, f] pairs");
        pts.emplace_back(number(p[0], field + ".table"), number(p[1], field + ".table"));
      }
      return Envelope::table(std::move(pts));
    }
    if (j.contains("power")) {
      const Json& p = j.at("power");
      return Envelope(PowerEnvelope{number_at(p, "C", field + ".power"), number_at(p, "p", field + ".power")});
    }
    if (j.contains("log_power")) {
      const Json& p = j.at("log_power");
      return Envelope(
          LogPowerEnvelope{number_at(p, "C", field + ".log_power"), number_at(p, "beta", field + ".log_power")});
    }
    throw InputDomainError("unknown envelope form '" + j.begin().key() + "'");
  } catch (const InputDomainError& e) {
    const std::string msg = e.what();
    if (msg.rfind("field '", 0) == 0) throw;
    throw InputDomainError("field '" + field + "': " + msg);
  }
}

Json potential_to_json(const PotentialSpec& F) {
  const Layout& L = F.layout();
  Json j;
  j["kind"] = kind_to_json(F.pair(0, 1));
  Json pairs = Json::array();
  for (int i = 0; i < L.bodies(); ++i)
    for (int k = i + 1; k < L.bodies(); ++k) pairs.push_back({{"i", i}, {"j", k}, {"kind", kind_to_json(F.pair(i, k))}});
  j["pairs"] = pairs;
  j["envelope"] = F.envelope_is_canonical() ? Json("auto") : envelope_to_json(F.envelope());
  j["envelope_form"] = envelope_to_json(F.envelope());
  j["near_region_width"] = F.near_region_width();
  return j;
}

PotentialSpec potential_from_json(const Json& j, const Layout& layout, const std::string& field) {
  if (!j.is_object()) throw InputDomainError("field '" + field + "' must be an object");
  PotentialSpec F(layout, kind_from_json(require(j, "kind", field), field + ".kind"));
  if (j.contains("pairs")) {
    const Json& pairs = j.at("pairs");
    if (!pairs.is_array()) throw InputDomainError("field '" + field + ".pairs' must be an array");
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::string pf = field + ".pairs[" + std::to_string(k) + "]";
      const Json& p = pairs[k];
      const Json& ji = require(p, "i", pf);
      const Json& jj = require(p, "j", pf);
      if (!ji.is_number_integer() || !jj.is_number_integer())
        throw InputDomainError("field '" + pf + "': i and j must be integers");
      const PairKind kind = kind_from_json(require(p, "kind", pf), pf + ".kind");
      try {
        F.set_pair(ji.get<int>(), jj.get<int>(), kind);
      } catch (const InputDomainError& e) {
        throw InputDomainError("field '" + pf + "': " + e.what());
      }
    }
    F.use_canonical_envelope();
  }
  if (j.contains("near_region_width")) {
    try {
      F.set_near_region_width(number(j.at("near_region_width"), field + ".near_region_width"));
    } catch (const InputDomainError& e) {
      const std::string msg = e.what();
      if (msg.rfind("field '", 0) == 0) throw;
      throw InputDomainError("field '" + field + ".near_region_width': " + msg);
    }
  }
  if (j.contains("envelope")) {
    const Json& e = j.at("envelope");
    if (!(e.is_string() && e.get<std::string>() == "auto")) F.set_envelope(envelope_from_json(e, field + ".envelope"));
  }
  return F;
}

Json geodesic_to_json(const GeodesicResult& g) {
  Json j;
  j["action"] = g.action.value;
  j["action_error_estimate"] = g.action.quadrature_error_estimate;
  j["el_residual"] = g.el_residual;
  j["el_residual_normalized"] = g.el_residual_normalized;
  j["energy_residual"] = g.energy_residual;
  j["converged"] = g.converged;
  j["nodes"] = g.nodes();
  j["sigma"] = g.sigma();
  j["lambda"] = g.lambda;
  j["length"] = g.path.length();
  j["min_separation"] = g.min_separation;
  j["deflected_start"] = g.deflected_start;
  j["multiple_minimizers"] = g.multiple_minimizers;
  j["restart_gap"] = g.restart_gap;
  j["restriction_gap"] = optional_number(g.restriction_gap);
  Json levels = Json::array();
  for (const auto& l : g.levels)
    levels.push_back({{"nodes", l.nodes},
                      {"action", l.action},
                      {"final_grid_action", l.final_grid_action},
                      {"iterations", l.iterations},
                      {"converged", l.converged},
                      {"imbalance", l.imbalance}});
  j["levels"] = levels;
  j["notes"] = g.notes;
  return j;
}

Json certificate_to_json(const ManeEstimate& e) {
  Json j;
  j["upper"] = e.upper;
  j["analytic_lower"] = e.analytic_lower;
  j["segment_bound"] = optional_number(e.segment_bound);
  j["far_field_bound"] = optional_number(e.far_field_bound);
  j["tolerance"] = e.tolerance;
  Json sat;
  sat["analytic_lower"] = e.lower_satisfied;
  sat["segment_bound"] = e.segment_satisfied ? Json(*e.segment_satisfied) : Json(nullptr);
  sat["far_field_bound"] = e.far_field_satisfied ? Json(*e.far_field_satisfied) : Json(nullptr);
  j["satisfied"] = sat;
  j["one_sided"] = "upper is an upper estimate of the Mane potential; no two-sided error is claimed";
  return j;
}

Json psi_to_json(const PsiTable& psi) {
  Json j;
  j["x_star"] = vec_json(psi.x_star);
  j["a_flat"] = psi.a_flat;
  j["x_star_flat"] = psi.x_star_flat;
  j["x_star_norm"] = psi.x_star_norm;
  j["mane_base_upper"] = psi.mane_base;
  j["base_term"] = psi.base_term;
  j["envelope_coeff"] = psi.envelope_coeff;
  j["envelope"] = envelope_to_json(psi.envelope);
  j["n0"] = psi.n0;
  j["j_tail"] = psi.j_tail;
  j["tail_uncertainty"] = psi.tail_uncertainty;
  Json at = Json::array();
  for (int k = 0; k <= psi.j_max; ++k)
    at.push_back({{"j", k}, {"T", std::ldexp(1.0, k)}, {"psi", psi.psi_at(k)}, {"psi_tilde", psi.psi_tilde(std::ldexp(1.0, k))}});
  j["dyadic"] = at;
  return j;
}

Json report_to_json(const HyperbolicReport& r) {
  Json j;
  j["mode"] = mode_name(r.mode);
  j["n_from"] = r.n_from;
  j["n_to"] = r.n_to;
  j["psi"] = psi_to_json(r.psi);
  Json runs = Json::array();
  for (const auto& run : r.runs) {
    Json o;
    o["n"] = run.n;
    o["radius"] = run.radius;
    o["endpoint"] = vec_json(run.endpoint);
    o["eps_disc"] = run.eps_disc;
    o["error"] = run.error;
    o["result"] = run.result ? geodesic_to_json(*run.result) : Json(nullptr);
    Json cr = Json::array();
    for (const auto& [jj, s] : run.crossings) cr.push_back({{"j", jj}, {"sigma_j", s}});
    o["crossings"] = cr;
    runs.push_back(o);
  }
  j["runs"] = runs;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"lemma", c.lemma},
                      {"eq", c.eq},
                      {"n", c.n},
                      {"where", c.where},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"slack", c.slack},
                      {"pass", c.pass},
                      {"asserted", c.asserted}});
  j["bound_checks"] = checks;
  j["asserted_checks"] = r.asserted_count();
  j["asserted_failures"] = r.asserted_failures();
  j["velocity_estimate"] = r.velocity_estimate ? vec_json(*r.velocity_estimate) : Json(nullptr);
  j["horizon"] = r.horizon;
  j["velocity_error"] = r.velocity_error;
  j["velocity_bound"] = r.velocity_bound;
  j["cauchy_horizon"] = r.cauchy_horizon;
  j["cauchy_gaps"] = r.cauchy_gaps;
  j["notes"] = r.notes;
  return j;
}

void write_defect_csv(std::ostream& os, const HyperbolicReport& r, int n) {
  os << "t,radius,angle_error,defect,bound\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& s : r.defect_curve) {
    if (s.n != n) continue;
    put(s.t);
    os << ',';
    put(s.radius);
    os << ',';
    put(s.angle_error);
    os << ',';
    put(s.defect);
    os << ',';
    put(s.bound);
    os << '\n';
  }
}

}  // namespace hypermane
