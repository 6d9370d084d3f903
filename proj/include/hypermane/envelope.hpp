#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hypermane {

/// f(s) = 0.
struct ZeroEnvelope {};
/// f(s) = C s^{-p}.
struct PowerEnvelope {
  double C = 0.0;
  double p = 1.0;
};
/// f(s) = C (ln s)^{-beta}, meaningful for s > 1.
struct LogPowerEnvelope {
  double C = 0.0;
  double beta = 3.0;
};
/// Piecewise-linear table in s, constant below the first knot, power-law tail beyond the last.
struct TableEnvelope {
  std::vector<std::pair<double, double>> points;
  double tail_exponent = 0.0;
};

/// Far-field radial majorant f of the pair potentials.
class Envelope {
 public:
  using Form = std::variant<ZeroEnvelope, PowerEnvelope, LogPowerEnvelope, TableEnvelope>;

  Envelope() = default;
  explicit Envelope(Form form);
  /// Table envelope; the tail exponent is fitted through the last two knots.
  static Envelope table(std::vector<std::pair<double, double>> points);

  const Form& form() const { return form_; }
  bool is_zero() const;
  std::string describe() const;

  double value(double s) const;
  /// Integral of f over [a, b] by adaptive quadrature (1e-10 relative); requires 0 < a.
  double integral(double a, double b) const;
  /// sqrt(2^{-k} * integral over [2^k, 2^{k+1}]).
  double dyadic_term(int k) const;
  /// Upper bound on the sum of dyadic terms for k >= K (K >= 1); throws DivergenceError
  /// when the series diverges.
  double dyadic_tail_bound(int K) const;

 private:
  Form form_ = ZeroEnvelope{};
};

/// Partial sum of the dyadic series for k = 1..K by per-block quadrature.
double envelope_series_partial(const Envelope& f, int K);

}  // namespace hypermane
