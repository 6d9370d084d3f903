#include "hypermane/potentials.hpp"

#include <algorithm>
#include <cmath>

namespace hypermane {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Radial power_law(double c, double p, double r) {
  const double v = c * std::pow(r, -p);
  return {v, -p * v / r, p * (p + 1.0) * v / (r * r)};
}

Radial operator+(Radial a, const Radial& b) { return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2}; }

}  // namespace

Radial radial_profile(const PairKind& kind, double r) {
  return std::visit(
      overloaded{
          [r](const Newtonian&) { return power_law(1.0, 1.0, r); },
          [r](const Homogeneous& k) { return power_law(1.0, k.alpha, r); },
          [r](const QuasiHomogeneous& k) { return power_law(1.0, k.alpha, r) + power_law(k.delta, k.beta, r); },
          [r](const LennardJones& k) { return power_law(k.A, 12.0, r) + power_law(-k.B, 6.0, r); },
          [r](const SeeligerYukawa& k) {
            const double e = k.A * std::exp(-k.B * r);
            return Radial{e / r, -e * (k.B / r + 1.0 / (r * r)),
                          e * (k.B * k.B / r + 2.0 * k.B / (r * r) + 2.0 / (r * r * r))};
          },
          [r](const MucketTreder& k) {
            const double lr = std::log(r);
            return Radial{(k.A - k.B * lr) / r, (k.B * lr - k.A - k.B) / (r * r),
                          (3.0 * k.B + 2.0 * k.A - 2.0 * k.B * lr) / (r * r * r)};
          },
          [r](const Logarithmic&) { return Radial{-std::log(r), -1.0 / r, 1.0 / (r * r)}; },
          [](const ZeroPair&) { return Radial{}; },
      },
      kind);
}

std::string kind_name(const PairKind& kind) {
  return std::visit(overloaded{
                        [](const Newtonian&) { return std::string("newtonian"); },
                        [](const Homogeneous&) { return std::string("homogeneous"); },
                        [](const QuasiHomogeneous&) { return std::string("quasi_homogeneous"); },
                        [](const LennardJones&) { return std::string("lennard_jones"); },
                        [](const SeeligerYukawa&) { return std::string("seeliger_yukawa"); },
                        [](const MucketTreder&) { return std::string("mucket_treder"); },
                        [](const Logarithmic&) { return std::string("logarithmic"); },
                        [](const ZeroPair&) { return std::string("zero"); },
                    },
                    kind);
}

void validate_kind(const PairKind& kind) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  std::visit(overloaded{
                 [](const Newtonian&) {},
                 [&](const Homogeneous& k) {
                   if (!positive(k.alpha)) throw InputDomainError("homogeneous: alpha must be positive");
                 },
                 [&](const QuasiHomogeneous& k) {
                   if (!(positive(k.beta) && k.alpha > k.beta && std::isfinite(k.alpha) && positive(k.delta)))
                     throw InputDomainError("quasi_homogeneous: need alpha > beta > 0 and delta > 0");
                 },
                 [&](const LennardJones& k) {
                   if (!(positive(k.A) && positive(k.B))) throw InputDomainError("lennard_jones: need A, B > 0");
                 },
                 [&](const SeeligerYukawa& k) {
                   if (!(positive(k.A) && positive(k.B))) throw InputDomainError("seeliger_yukawa: need A, B > 0");
                 },
                 [&](const MucketTreder& k) {
                   if (!(positive(k.A) && positive(k.B))) throw InputDomainError("mucket_treder: need A, B > 0");
                 },
                 [](const Logarithmic&) {},
                 [](const ZeroPair&) {},
             },
             kind);
}

bool mass_scaled(const PairKind& kind) {
  return std::holds_alternative<Newtonian>(kind) || std::holds_alternative<Homogeneous>(kind) ||
         std::holds_alternative<QuasiHomogeneous>(kind) || std::holds_alternative<Logarithmic>(kind);
}

bool clamped_in_action(const PairKind& kind) {
  return std::holds_alternative<LennardJones>(kind) || std::holds_alternative<MucketTreder>(kind) ||
         std::holds_alternative<Logarithmic>(kind);
}

bool is_zero_kind(const PairKind& kind) { return std::holds_alternative<ZeroPair>(kind); }

PotentialSpec::PotentialSpec(Layout layout, const PairKind& kind) : layout_(std::move(layout)) {
  layout_.validate();
  validate_kind(kind);
  const int n = layout_.bodies();
  kinds_.assign(static_cast<std::size_t>(n * n), kind);
  singular_mask_.assign(static_cast<std::size_t>(n * n), is_zero_kind(kind) ? 0 : 1);
  use_canonical_envelope();
}

PotentialSpec::PotentialSpec(Layout layout, const PairKind& kind, Envelope envelope)
    : PotentialSpec(std::move(layout), kind) {
  set_envelope(std::move(envelope));
}

void PotentialSpec::set_pair(int i, int j, const PairKind& kind) {
  const int n = layout_.bodies();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw InputDomainError("pair index out of range");
  validate_kind(kind);
  const char singular = is_zero_kind(kind) ? 0 : 1;
  kinds_[static_cast<std::size_t>(i * n + j)] = kind;
  kinds_[static_cast<std::size_t>(j * n + i)] = kind;
  singular_mask_[static_cast<std::size_t>(i * n + j)] = singular;
  singular_mask_[static_cast<std::size_t>(j * n + i)] = singular;
  if (canonical_envelope_) use_canonical_envelope();
}

void PotentialSpec::set_envelope(Envelope envelope) {
  envelope_ = std::move(envelope);
  canonical_envelope_ = false;
}

void PotentialSpec::use_canonical_envelope() {
  envelope_ = canonical_envelope(*this);
  canonical_envelope_ = true;
}

void PotentialSpec::set_near_region_width(double w) {
  if (!(w > 0.0)) throw InputDomainError("near_region_width must be positive");
  near_width_ = w;
}

const PairKind& PotentialSpec::pair(int i, int j) const {
  return kinds_[static_cast<std::size_t>(i * layout_.bodies() + j)];
}

bool PotentialSpec::is_free() const {
  return std::none_of(singular_mask_.begin(), singular_mask_.end(), [](char c) { return c != 0; });
}

Radial PotentialSpec::pair_radial(int i, int j, double r, Branch branch) const {
  const PairKind& kind = pair(i, j);
  if (is_zero_kind(kind)) return {};
  if (r < kNearCollisionCutoff) throw SingularEvaluationError(i, j, r);
  Radial rad = radial_profile(kind, r);
  if (mass_scaled(kind)) {
    const double mm = layout_.masses[i] * layout_.masses[j];
    rad = {rad.value * mm, rad.d1 * mm, rad.d2 * mm};
  }
  if (branch == Branch::clamped && clamped_in_action(kind) && rad.value < 0.0) return {};
  return rad;
}

double PotentialSpec::pair_value(int i, int j, double r, Branch branch) const {
  return pair_radial(i, j, r, branch).value;
}

void PotentialSpec::check_regular(const Vec& x) const {
  const int n = layout_.bodies();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!singular_mask_[static_cast<std::size_t>(i * n + j)]) continue;
      const double r = pair_distance(layout_, x, i, j);
      if (r < kNearCollisionCutoff) throw SingularEvaluationError(i, j, r);
    }
}

double PotentialSpec::evaluate(const Vec& x, Branch branch) const {
  const int n = layout_.bodies();
  double f = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!singular_mask_[static_cast<std::size_t>(i * n + j)]) continue;
      f += pair_radial(i, j, pair_distance(layout_, x, i, j), branch).value;
    }
  return f;
}

double PotentialSpec::value_and_gradient(const Vec& x, Branch branch, Vec& grad) const {
  const int n = layout_.bodies();
  const int d = layout_.dim;
  grad.setZero(x.size());
  double f = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!singular_mask_[static_cast<std::size_t>(i * n + j)]) continue;
      const Eigen::VectorXd u = x.segment(i * d, d) - x.segment(j * d, d);
      const double r = u.norm();
      const Radial rad = pair_radial(i, j, r, branch);
      f += rad.value;
      const Eigen::VectorXd g = (rad.d1 / r) * u;
      grad.segment(i * d, d) += g;
      grad.segment(j * d, d) -= g;
    }
  return f;
}

Vec PotentialSpec::euclidean_gradient(const Vec& x, Branch branch) const {
  Vec g;
  value_and_gradient(x, branch, g);
  return g;
}

Vec PotentialSpec::gradient(const Vec& x, Branch branch) const {
  Vec g = euclidean_gradient(x, branch);
  const int d = layout_.dim;
  for (int i = 0; i < layout_.bodies(); ++i) g.segment(i * d, d) /= layout_.masses[i];
  return g;
}

void PotentialSpec::euclidean_hessian(const Vec& x, Branch branch, Eigen::MatrixXd& H) const {
  const int n = layout_.bodies();
  const int d = layout_.dim;
  H.setZero(x.size(), x.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!singular_mask_[static_cast<std::size_t>(i * n + j)]) continue;
      const Eigen::VectorXd u = x.segment(i * d, d) - x.segment(j * d, d);
      const double r = u.norm();
      const Radial rad = pair_radial(i, j, r, branch);
      const Eigen::VectorXd uh = u / r;
      const Eigen::MatrixXd P = uh * uh.transpose();
      const Eigen::MatrixXd K =
          rad.d2 * P + (rad.d1 / r) * (Eigen::MatrixXd::Identity(d, d) - P);
      H.block(i * d, i * d, d, d) += K;
      H.block(j * d, j * d, d, d) += K;
      H.block(i * d, j * d, d, d) -= K;
      H.block(j * d, i * d, d, d) -= K;
    }
}

Envelope canonical_envelope(const PotentialSpec& spec) {
  const double M = spec.layout().total_mass();
  const double M2 = M * M;
  struct Term {
    double C;
    double p;
  };
  std::vector<Term> terms;
  const int n = spec.layout().bodies();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::visit(overloaded{
                     [&](const Newtonian&) { terms.push_back({M2, 1.0}); },
                     [&](const Homogeneous& k) { terms.push_back({M2, k.alpha}); },
                     [&](const QuasiHomogeneous& k) {
                       terms.push_back({M2 * (std::pow(2.0, k.beta - k.alpha) + k.delta), k.beta});
                     },
                     [&](const LennardJones& k) { terms.push_back({k.A * std::pow(2.0, -6.0), 6.0}); },
                     [&](const SeeligerYukawa& k) { terms.push_back({k.A * std::exp(-2.0 * k.B), 1.0}); },
                     [&](const MucketTreder& k) {
                       const double c = k.A - k.B * std::log(2.0);
                       if (c > 0.0) terms.push_back({c, 1.0});
                     },
                     [](const Logarithmic&) {},
                     [](const ZeroPair&) {},
                 },
                 spec.pair(i, j));
    }
  if (terms.empty()) return Envelope(ZeroEnvelope{});
  double p_min = terms.front().p;
  for (const Term& t : terms) p_min = std::min(p_min, t.p);
  // On s >= 2, C s^{-p} <= C 2^{p_min - p} s^{-p_min} whenever p >= p_min.
  double C = 0.0;
  for (const Term& t : terms) C = std::max(C, t.C * std::pow(2.0, p_min - t.p));
  return Envelope(PowerEnvelope{C, p_min});
}

}  // namespace hypermane
