#include "hypermane/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypermane/errors.hpp"
#include "hypermane/quadrature.hpp"

namespace hypermane {

namespace {

constexpr double kEnvelopeRelTol = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double table_value(const TableEnvelope& t, double s) {
  const auto& pts = t.points;
  if (s <= pts.front().first) return pts.front().second;
  if (s >= pts.back().first) {
    if (pts.back().second == 0.0) return 0.0;
    return pts.back().second * std::pow(s / pts.back().first, -t.tail_exponent);
  }
  auto hi = std::upper_bound(pts.begin(), pts.end(), s,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  auto lo = hi - 1;
  const double w = (s - lo->first) / (hi->first - lo->first);
  return (1.0 - w) * lo->second + w * hi->second;
}

}  // namespace

Envelope::Envelope(Form form) : form_(std::move(form)) {
  std::visit(overloaded{
                 [](const ZeroEnvelope&) {},
                 [](const PowerEnvelope& e) {
                   if (!(e.C >= 0.0) || !std::isfinite(e.C) || !std::isfinite(e.p))
                     throw InputDomainError("power envelope needs C >= 0 and finite p");
                 },
                 [](const LogPowerEnvelope& e) {
                   if (!(e.C >= 0.0) || !std::isfinite(e.beta))
                     throw InputDomainError("log-power envelope needs C >= 0 and finite beta");
                 },
                 [](const TableEnvelope& e) {
                   if (e.points.empty()) throw InputDomainError("envelope table is empty");
                   for (std::size_t k = 0; k < e.points.size(); ++k) {
                     if (!(e.points[k].first > 0.0) || !(e.points[k].second >= 0.0))
                       throw InputDomainError("envelope table needs s > 0 and f >= 0");
                     if (k > 0 && !(e.points[k].first > e.points[k - 1].first))
                       throw InputDomainError("envelope table abscissae must increase");
                   }
                 },
             },
             form_);
}

Envelope Envelope::table(std::vector<std::pair<double, double>> points) {
  TableEnvelope t{std::move(points), 0.0};
  const std::size_t n = t.points.size();
  if (n >= 2) {
    const auto& [s0, f0] = t.points[n - 2];
    const auto& [s1, f1] = t.points[n - 1];
    if (f0 > 0.0 && f1 > 0.0) t.tail_exponent = -std::log(f1 / f0) / std::log(s1 / s0);
  }
  return Envelope(std::move(t));
}

bool Envelope::is_zero() const {
  return std::visit(overloaded{
                        [](const ZeroEnvelope&) { return true; },
                        [](const PowerEnvelope& e) { return e.C == 0.0; },
                        [](const LogPowerEnvelope& e) { return e.C == 0.0; },
                        [](const TableEnvelope& e) {
                          return std::all_of(e.points.begin(), e.points.end(),
                                             [](const auto& p) { return p.second == 0.0; });
                        },
                    },
                    form_);
}

std::string Envelope::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const ZeroEnvelope&) { os << "zero"; },
                 [&](const PowerEnvelope& e) { os << "power(C=" << e.C << ", p=" << e.p << ")"; },
                 [&](const LogPowerEnvelope& e) { os << "log_power(C=" << e.C << ", beta=" << e.beta << ")"; },
                 [&](const TableEnvelope& e) {
                   os << "table(" << e.points.size() << " knots, tail exponent " << e.tail_exponent << ")";
                 },
             },
             form_);
  return os.str();
}

double Envelope::value(double s) const {
  return std::visit(overloaded{
                        [](const ZeroEnvelope&) { return 0.0; },
                        [s](const PowerEnvelope& e) { return e.C * std::pow(s, -e.p); },
                        [s](const LogPowerEnvelope& e) {
                          if (s <= 1.0) return std::numeric_limits<double>::infinity();
                          return e.C * std::pow(std::log(s), -e.beta);
                        },
                        [s](const TableEnvelope& e) { return table_value(e, s); },
                    },
                    form_);
}

double Envelope::integral(double a, double b) const {
  if (!(a > 0.0)) throw InputDomainError("envelope integrals need a positive lower limit");
  if (b <= a || is_zero()) return 0.0;
  return integrate_dyadic([this](double s) { return value(s); }, a, b, kEnvelopeRelTol).value;
}

double Envelope::dyadic_term(int k) const {
  const double lo = std::ldexp(1.0, k);
  return std::sqrt(std::ldexp(integral(lo, 2.0 * lo), -k));
}

double Envelope::dyadic_tail_bound(int K) const {
  if (K < 1) throw InputDomainError("dyadic tail index must be at least 1");
  if (is_zero()) return 0.0;
  return std::visit(
      overloaded{
          [](const ZeroEnvelope&) { return 0.0; },
          [&](const PowerEnvelope& e) {
            if (!(e.p > 0.0)) throw DivergenceError("power envelope with p <= 0 has a divergent dyadic series");
            return dyadic_term(K) / (1.0 - std::pow(2.0, -0.5 * e.p));
          },
          [&](const LogPowerEnvelope& e) {
            if (!(e.beta > 2.0)) throw DivergenceError("log-power envelope needs beta > 2 for a convergent series");
            const double h = 0.5 * e.beta;
            const double k = static_cast<double>(K);
            return std::sqrt(e.C) * std::pow(std::log(2.0), -h) * (std::pow(k, -h) + std::pow(k, 1.0 - h) / (h - 1.0));
          },
          [&](const TableEnvelope& e) {
            const double s_last = e.points.back().first;
            const int k_tail = std::max(K, static_cast<int>(std::ceil(std::log2(s_last))));
            double sum = 0.0;
            for (int k = K; k < k_tail; ++k) sum += dyadic_term(k);
            if (e.points.back().second == 0.0) return sum;
            if (!(e.tail_exponent > 0.0))
              throw DivergenceError("table envelope tail does not decay; dyadic series diverges");
            return sum + dyadic_term(k_tail) / (1.0 - std::pow(2.0, -0.5 * e.tail_exponent));
          },
      },
      form_);
}

double envelope_series_partial(const Envelope& f, int K) {
  if (K < 1) throw InputDomainError("K must be at least 1");
  double sum = 0.0;
  for (int k = 1; k <= K; ++k) sum += f.dyadic_term(k);
  return sum;
}

}  // namespace hypermane
