#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypermane/geodesic_solver.hpp"

namespace hypermane {

enum class Mode { strict, exploratory };

const char* mode_name(Mode mode);

/// Error budget of the ray construction from x in direction a.
class PsiTable {
 public:
  Layout layout;
  Vec x;
  Vec a;
  Vec x_star;
  double lambda = 0.0;
  double a_flat = 0.0;
  double x_star_flat = 0.0;
  double x_star_norm = 0.0;
  /// Upper estimate of m_lambda(x, x*).
  double mane_base = 0.0;
  /// mane_base / sqrt(2 lambda).
  double base_term = 0.0;
  /// N^2 / (lambda a_flat).
  double envelope_coeff = 0.0;
  Envelope envelope;
  int j_max = 0;
  /// Last index summed explicitly; beyond it the series is replaced by its tail bound.
  int j_tail = 0;
  /// Tail bound carried as additive uncertainty on every tilde value.
  double tail_uncertainty = 0.0;
  int n0 = 0;

  /// Psi(T) by direct quadrature.
  double psi(double T) const;
  /// Cached Psi(2^j) for j in [0, j_tail].
  double psi_at(int j) const;
  /// Upper value of sum_{j >= n} sqrt(2^{-j} Psi(2^j)).
  double tilde_from(int n) const;
  /// Psi-tilde(t): tilde_from(floor(log2 t) + 1).
  double psi_tilde(double t) const;
  /// Bound on sum_{j > J} sqrt(2^{-j} Psi(2^j)); requires 2|x*| <= 2^{J+2}.
  double tail_bound(int J) const;

  std::vector<double> psi_cache;    // index j
  std::vector<double> tilde_cache;  // index n, sum over j >= n, n in [0, j_tail + 1]
};

/// Builds the table; the m_lambda(x, x*) estimate is solved unless supplied.
PsiTable build_psi_table(const Vec& x, const Vec& a, double lambda, const PotentialSpec& F, int j_max,
                         const SolveOptions& opts = {}, std::optional<double> mane_base = std::nullopt);

struct BoundCheck {
  std::string lemma;
  std::string eq;
  int n = 0;
  std::string where;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool asserted = false;
};

struct RunRecord {
  int n = 0;
  double radius = 0.0;
  Vec endpoint;
  std::optional<GeodesicResult> result;
  std::string error;
  std::map<int, double> crossings;
  /// 10 * Richardson error / action.
  double eps_disc = 0.0;
};

struct DefectSample {
  int n = 0;
  double t = 0.0;
  double radius = 0.0;
  double angle_error = 0.0;
  double defect = 0.0;
  double bound = 0.0;
};

struct SequenceOptions {
  Mode mode = Mode::strict;
  SolveOptions solve;
  int workers = 4;
  /// Horizon for the velocity estimate; 0 picks the last dyadic crossing shared by the two largest runs.
  double horizon = 0.0;
};

struct HyperbolicReport {
  Mode mode = Mode::strict;
  int n_from = 0;
  int n_to = 0;
  PsiTable psi;
  std::vector<RunRecord> runs;
  std::vector<BoundCheck> checks;
  std::optional<Vec> velocity_estimate;
  double horizon = 0.0;
  double velocity_error = 0.0;
  double velocity_bound = 0.0;
  /// Horizon sigma of the first run and sup gaps between consecutive runs on it.
  double cauchy_horizon = 0.0;
  std::vector<double> cauchy_gaps;
  std::vector<DefectSample> defect_curve;
  std::vector<std::string> notes;

  bool all_asserted_pass() const;
  int asserted_count() const;
  int asserted_failures() const;
};

/// Runs gamma^(n) from x to x* + 2^n a for n in [n_from, n_to], then performs every check.
HyperbolicReport build_sequence(const Vec& x, const Vec& a, double lambda, const PotentialSpec& F, int n_from,
                                int n_to, const PsiTable& psi, const SequenceOptions& opts = {});

/// Largest t in [0, t_max] with |gamma(t) - x*| = R on the piecewise-linear path; nullopt if never attained.
std::optional<double> last_crossing(const DiscretePath& path, const Vec& x_star, double R, double t_max);

/// Last crossing times of radii 2^j, j in [j_lo, j_hi]; throws InputDomainError if a radius is never attained.
std::map<int, double> crossing_times(const DiscretePath& path, const Vec& x_star, int j_lo, int j_hi);

std::vector<BoundCheck> check_crossing_windows(const RunRecord& run, double lambda, int j_lo, bool asserted);

/// Midpoint and ray distance checks at scale S, with tau the time where gamma(tau) = x* + S b.
std::vector<BoundCheck> check_midpoint_bound(const RunRecord& run, const PsiTable& psi, double S, double tau,
                                             bool asserted);

std::vector<BoundCheck> check_angle_length_bounds(const RunRecord& run, const PsiTable& psi,
                                                  const std::vector<double>& times, bool asserted);

std::vector<BoundCheck> check_time_bounds(const RunRecord& run, const PsiTable& psi,
                                          const std::vector<double>& times, bool asserted);

/// Hyperbolicity defect bound for t >= 2^{n0+1}/sqrt(2 lambda).
std::vector<BoundCheck> check_defect_bound(const RunRecord& run, const PsiTable& psi,
                                           const std::vector<double>& times, bool asserted);

/// Sup over [0, horizon] of |gamma_1(t) - gamma_2(t)| for two timed paths covering the horizon.
double sup_gap(const DiscretePath& p, const DiscretePath& q, double horizon);

}  // namespace hypermane
