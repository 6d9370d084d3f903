#include "hypermane/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hypermane/errors.hpp"

namespace hypermane {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  long evals = 0;
  bool exhausted = false;

  double eval(double x) {
    ++evals;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth,
                 double& err) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || m <= a || m >= b) {
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth <= 0) {
      exhausted = true;
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  Simpson s{f};
  // Coarse composite pass to fix an absolute target and to avoid aliasing on the first split.
  const int panels = 16;
  const double h = (b - a) / panels;
  std::vector<double> xs(2 * panels + 1), fs(2 * panels + 1);
  for (int k = 0; k <= 2 * panels; ++k) {
    xs[k] = a + 0.5 * h * k;
    fs[k] = s.eval(xs[k]);
  }
  double coarse = 0.0;
  double scale = 0.0;
  for (int p = 0; p < panels; ++p) {
    coarse += h / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
    scale += h / 6.0 * (std::abs(fs[2 * p]) + 4.0 * std::abs(fs[2 * p + 1]) + std::abs(fs[2 * p + 2]));
  }
  if (!std::isfinite(coarse)) throw QuadratureError("integrand is not finite on the interval");
  const double abs_tol = rel_tol * std::max(std::abs(coarse), 1e-3 * scale) + std::numeric_limits<double>::min();
  double err = 0.0;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double whole = h / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
    total += s.recurse(xs[2 * p], xs[2 * p + 2], fs[2 * p], fs[2 * p + 1], fs[2 * p + 2], whole,
                       abs_tol / panels, max_depth, err);
  }
  if (s.exhausted && err > rel_tol * std::abs(total))
    throw QuadratureError("adaptive quadrature did not reach its tolerance");
  out.value = total;
  out.error = err;
  out.evaluations = s.evals;
  return out;
}

QuadratureResult integrate_dyadic(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  QuadratureResult out;
  if (!(a > 0.0)) throw QuadratureError("dyadic integration requires a positive lower limit");
  if (b <= a) return out;
  auto logf = [&](double u) {
    const double s = std::exp(u);
    return f(s) * s;
  };
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, 2.0 * lo);
    const QuadratureResult r = adaptive_simpson(logf, std::log(lo), std::log(hi), rel_tol, 40);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    lo = hi;
  }
  return out;
}

}  // namespace hypermane
