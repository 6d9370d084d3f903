#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hypermane/hyperbolic.hpp"
#include "test_support.hpp"

using namespace hypermane;
using namespace hypermane::testing;

namespace {

Vec symmetric_pair_direction() { return make_vec({-1, 0, 1, 0}) / std::sqrt(2.0); }

double free_psi_tilde_closed_form(double psi, int n) {
  return std::sqrt(psi) * std::pow(2.0, -0.5 * (n + 1)) / (1.0 - std::sqrt(0.5));
}

DiscretePath timed_line(const Layout& L, const Vec& from, const Vec& vel, double t_end, int nodes) {
  Eigen::MatrixXd n(L.size(), nodes);
  Vec t(nodes);
  for (int k = 0; k < nodes; ++k) {
    t[k] = t_end * k / (nodes - 1);
    n.col(k) = from + t[k] * vel;
  }
  return DiscretePath(L, n, t);
}

}  // namespace

TEST(PsiTable, FreeIsConstant) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, ZeroPair{});
  Vec a = symmetric_pair_direction();
  PsiTable psi = build_psi_table(Vec::Zero(4), a, 0.5, F, 40);
  const double expect = 50.0 / std::sqrt(2.0);
  EXPECT_NEAR(expect, 35.355, 1e-3);
  for (int j = 0; j <= 40; ++j) EXPECT_NEAR(psi.psi_at(j), expect, 1e-9 * expect);
  EXPECT_NEAR(psi.psi(12345.0), expect, 1e-9 * expect);
  for (int n = 0; n <= 40; ++n)
    EXPECT_NEAR(psi.psi_tilde(std::ldexp(1.0, n)), free_psi_tilde_closed_form(expect, n),
                1e-10 * free_psi_tilde_closed_form(expect, n));
}

TEST(PsiTable, FreeThresholdIndex) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, ZeroPair{});
  Vec a = symmetric_pair_direction();
  PsiTable psi = build_psi_table(Vec::Zero(4), a, 0.5, F, 40);
  // Smallest n >= 20 + log2|x*| with the closed-form tilde below 2^-10 a_flat.
  const double psi0 = 50.0 / std::sqrt(2.0);
  int n = static_cast<int>(std::ceil(20.0 + std::log2(psi0)));
  while (free_psi_tilde_closed_form(psi0, n - 1) > std::ldexp(std::sqrt(2.0), -10)) ++n;
  EXPECT_EQ(psi.n0, n);
}

class PsiInvariants : public ::testing::TestWithParam<int> {};

TEST_P(PsiInvariants, HoldForBuiltTables) {
  Layout L = unit_layout(2 + GetParam() % 2);
  std::vector<PairKind> kinds{Newtonian{}, Homogeneous{2.0}, SeeligerYukawa{1.0, 0.5}, ZeroPair{}};
  PotentialSpec F(L, kinds[static_cast<std::size_t>(GetParam()) % kinds.size()]);
  std::mt19937_64 rng(100 + GetParam());
  Vec a = random_unit(rng, L);
  while (min_separation(L, a) < 0.2) a = random_unit(rng, L);
  Vec x = random_vec(rng, L.size(), 1.0);
  SolveOptions o;
  o.grading = Grading::geometric;
  const int j_max = 60;
  PsiTable psi = build_psi_table(x, a, 0.5, F, j_max, o);

  for (int j = 1; j <= j_max; ++j) {
    EXPECT_GE(psi.psi_at(j), psi.psi_at(j - 1));
    EXPECT_LE(psi.psi_tilde(std::ldexp(1.0, j)), psi.psi_tilde(std::ldexp(1.0, j - 1)));
    const double t = std::ldexp(1.0, j);
    EXPECT_LE(std::sqrt(psi.psi_at(j) / t), psi.psi_tilde(t));
  }
  EXPECT_LE(psi.tilde_from(psi.n0), std::ldexp(psi.a_flat, -10));
  EXPECT_GE(psi.n0, 20.0 + std::log2(norm(L, x - psi.x_star)));
  if (psi.n0 > std::ceil(20.0 + std::log2(norm(L, x - psi.x_star))))
    EXPECT_GT(psi.tilde_from(psi.n0 - 1), std::ldexp(psi.a_flat, -10));
  for (int j = psi.n0; j <= j_max; ++j)
    EXPECT_LE(psi.psi_at(j), std::ldexp(psi.a_flat * psi.a_flat, -20) * std::ldexp(1.0, j));
  EXPECT_LE(psi.tail_uncertainty, 1e-6 * psi.tilde_from(j_max + 1));

  PsiTable again = build_psi_table(x, a, 0.5, F, j_max, o, psi.mane_base);
  EXPECT_EQ(again.n0, psi.n0);
  EXPECT_EQ(again.tilde_cache, psi.tilde_cache);
}

INSTANTIATE_TEST_SUITE_P(Potentials, PsiInvariants, ::testing::Range(0, 8));

TEST(PsiTable, DirectQuadratureMatchesCache) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  PsiTable psi = build_psi_table(Vec::Zero(4), symmetric_pair_direction(), 0.5, F, 30, {}, 40.0);
  for (int j : {0, 5, 17, 30}) EXPECT_NEAR(psi.psi(std::ldexp(1.0, j)), psi.psi_at(j), 1e-9 * psi.psi_at(j));
  // Newtonian canonical envelope 4/s gives a closed-form logarithm.
  const double T = 1e6;
  const double closed = 40.0 + 4.0 / (0.5 * std::sqrt(2.0)) * 4.0 *
                                   std::log((2 * T + 2 * psi.x_star_norm) / psi.x_star_flat);
  EXPECT_NEAR(psi.psi(T), closed, 1e-9 * closed);
}

TEST(LastCrossing, StraightLine) {
  Layout L = unit_layout(2);
  Vec dir = symmetric_pair_direction();
  DiscretePath p = timed_line(L, Vec::Zero(4), dir, 100.0, 11);
  for (double R : {1.0, 17.5, 99.0}) {
    auto t = last_crossing(p, Vec::Zero(4), R, 100.0);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(*t, R, 1e-12);
  }
  EXPECT_FALSE(last_crossing(p, Vec::Zero(4), 150.0, 100.0).has_value());
  EXPECT_THROW(crossing_times(p, Vec::Zero(4), 0, 8), InputDomainError);
}

TEST(LastCrossing, OffsetLineMatchesSphereIntersection) {
  Layout L = unit_layout(2);
  Vec dir = symmetric_pair_direction();
  Vec offset = make_vec({0, 3, 0, 3}) / std::sqrt(2.0);
  Vec center = Vec::Zero(4);
  DiscretePath p = timed_line(L, offset, dir, 200.0, 41);
  auto times = crossing_times(p, center, 2, 7);
  for (auto [j, t] : times) {
    double R = std::ldexp(1.0, j);
    EXPECT_NEAR(t, std::sqrt(R * R - 9.0), 1e-9);
  }
}

TEST(SupGap, ShiftedLines) {
  Layout L = unit_layout(2);
  Vec dir = symmetric_pair_direction();
  DiscretePath p = timed_line(L, Vec::Zero(4), dir, 10.0, 11);
  DiscretePath q = timed_line(L, 0.25 * dir, dir, 12.0, 7);
  EXPECT_NEAR(sup_gap(p, q, 10.0), 0.25, 1e-12);
}

TEST(BuildSequence, StrictRejectsSmallIndex) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, ZeroPair{});
  Vec a = symmetric_pair_direction();
  PsiTable psi = build_psi_table(Vec::Zero(4), a, 0.5, F, 40);
  SequenceOptions o;
  o.mode = Mode::strict;
  EXPECT_THROW(build_sequence(Vec::Zero(4), a, 0.5, F, psi.n0, psi.n0 + 1, psi, o), InputDomainError);
  o.mode = Mode::exploratory;
  EXPECT_THROW(build_sequence(Vec::Zero(4), a, 0.5, F, 3, 5, psi, o), InputDomainError);
}

TEST(BuildSequence, FreeStrictRunPassesEverything) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, ZeroPair{});
  Vec a = symmetric_pair_direction();
  const double lambda = 0.5;
  PsiTable psi = build_psi_table(Vec::Zero(4), a, lambda, F, 48);
  SequenceOptions o;
  o.mode = Mode::strict;
  o.solve.grading = Grading::geometric;
  HyperbolicReport rep = build_sequence(Vec::Zero(4), a, lambda, F, psi.n0 + 1, psi.n0 + 3, psi, o);
  ASSERT_EQ(rep.runs.size(), 3u);
  EXPECT_GT(rep.asserted_count(), 0);
  EXPECT_TRUE(rep.all_asserted_pass());
  for (const BoundCheck& c : rep.checks)
    if (c.asserted) EXPECT_TRUE(c.pass) << c.lemma << "/" << c.eq << " n=" << c.n << " " << c.where;
  for (const RunRecord& run : rep.runs) {
    ASSERT_TRUE(run.result.has_value());
    // Straight run from x = 0 through x*: length is exactly the endpoint radius.
    double T = std::ldexp(1.0, run.n);
    EXPECT_NEAR(run.result->path.length(), norm(L, psi.x_star + T * a), 1e-9 * T);
    EXPECT_LE(run.result->path.length(), (T + psi.psi(T)) * (1 + 1e-12));
    double prev = -1.0;
    for (auto [j, t] : run.crossings) {
      EXPECT_GT(t, prev);
      prev = t;
    }
  }
  ASSERT_TRUE(rep.velocity_estimate.has_value());
  EXPECT_LT(rep.velocity_error, 1e-9);
  // Straight motion from x along a: the deviation from x* + t a is the constant |x* - x|.
  // The deviation is a difference of numbers of size t, so rounding leaves about eps absolute in the ratio.
  const double offset = norm(L, psi.x_star);
  for (const DefectSample& s : rep.defect_curve) {
    EXPECT_NEAR(s.defect, offset / s.t, 1e-9 * offset / s.t + 1e-14);
    if (s.t >= std::ldexp(1.0, psi.n0 + 1)) EXPECT_LE(s.defect, s.bound);
  }
}

TEST(BuildSequence, KeplerExploratory) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  Vec a = symmetric_pair_direction();
  const double lambda = 0.5;
  SequenceOptions o;
  o.mode = Mode::exploratory;
  o.solve.grading = Grading::geometric;
  PsiTable psi = build_psi_table(Vec::Zero(4), a, lambda, F, 24, o.solve);
  HyperbolicReport rep = build_sequence(Vec::Zero(4), a, lambda, F, 10, 14, psi, o);
  ASSERT_EQ(rep.runs.size(), 5u);
  EXPECT_EQ(rep.asserted_count(), 0);
  for (const RunRecord& run : rep.runs) {
    ASSERT_TRUE(run.result.has_value()) << run.error;
    EXPECT_TRUE(run.result->converged);
    EXPECT_LT(run.result->energy_residual, 1e-10);
    double prev = -1.0;
    for (auto [j, t] : run.crossings) {
      EXPECT_GT(t, prev);
      prev = t;
      double ratio = std::ldexp(1.0, j) / (std::sqrt(2 * lambda) * t);
      EXPECT_GE(ratio, 0.5);
      EXPECT_LE(ratio, 2.0);
    }
  }
  EXPECT_EQ(rep.cauchy_gaps.size(), 4u);
}
