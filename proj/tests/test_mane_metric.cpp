#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hypermane/mane_metric.hpp"
#include "test_support.hpp"

using namespace hypermane;
using namespace hypermane::testing;

namespace {

Vec symmetric_pair_direction() { return make_vec({-1, 0, 1, 0}) / std::sqrt(2.0); }

double max_pair_angle(const Layout& L, const Vec& z, const Vec& b) {
  const int d = L.dim;
  double worst = 0.0;
  for (int i = 0; i < L.bodies(); ++i)
    for (int j = i + 1; j < L.bodies(); ++j) {
      Eigen::VectorXd zz = z.segment(i * d, d) - z.segment(j * d, d);
      Eigen::VectorXd bb = b.segment(i * d, d) - b.segment(j * d, d);
      double c = std::clamp(zz.dot(bb) / (zz.norm() * bb.norm()), -1.0, 1.0);
      worst = std::max(worst, std::acos(c));
    }
  return worst;
}

}  // namespace

TEST(ManePotential, FreeMatchesLowerBound) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> lam(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    Layout L = unit_layout(2 + trial % 2);
    PotentialSpec F(L, ZeroPair{});
    Vec x = random_vec(rng, L.size(), 3.0);
    Vec y = random_vec(rng, L.size(), 3.0);
    double lambda = lam(rng);
    ManeEstimate e = mane_potential(x, y, F, lambda);
    double exact = std::sqrt(2 * lambda) * norm(L, x - y);
    EXPECT_NEAR(e.upper, exact, 1e-8 * exact);
    EXPECT_NEAR(e.analytic_lower, exact, 1e-12 * exact);
    EXPECT_TRUE(e.satisfied());
    ASSERT_TRUE(e.segment_bound.has_value());
    EXPECT_NEAR(*e.segment_bound, exact, 1e-12 * exact);
  }
}

TEST(ManePotential, CoincidentEndpointsGiveZero) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  ManeEstimate e = mane_potential(make_vec({0, 0, 1, 0}), make_vec({0, 0, 1, 0}), F, 0.5);
  EXPECT_EQ(e.upper, 0.0);
  EXPECT_FALSE(e.geodesic.has_value());
}

TEST(ManePotential, NewtonianStrictlyAboveLowerBound) {
  std::mt19937_64 rng(53);
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  for (int trial = 0; trial < 100; ++trial) {
    Vec x = spread_config(rng, L, 2.0, 1.0);
    Vec y = spread_config(rng, L, 2.0, 1.0);
    SolveOptions o;
    o.max_refinements = 2;
    ManeEstimate e = mane_potential(x, y, F, 0.5, o);
    EXPECT_GT(e.upper, e.analytic_lower);
    EXPECT_TRUE(e.lower_satisfied);
  }
}

TEST(SegmentBound, FreeIsTight) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, ZeroPair{});
  Vec x = make_vec({0, 0, 1, 0});
  Vec y = make_vec({3, 4, 1, 0});
  EXPECT_NEAR(segment_upper_bound(x, y, F, 2.0), 2.0 * 5.0, 1e-14);
}

TEST(SegmentBound, RigidTranslationAtSeparationFour) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  Vec x = make_vec({0, 0, 4, 0});
  Vec shift = make_vec({1, 2, 1, 2});
  const double len = norm(L, shift);
  for (double lambda : {0.5, 1.5}) {
    double k = std::sqrt(2 * lambda);
    EXPECT_NEAR(segment_upper_bound(x, x + shift, F, lambda), k * len + len / (4 * k), 1e-9 * len);
  }
}

TEST(SegmentBound, UnavailableThroughCollision) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  EXPECT_THROW(segment_upper_bound(make_vec({-1, 0, 1, 0}), make_vec({1, 0, -1, 0}), F, 0.5),
               BoundUnavailableError);
}

TEST(SegmentBound, DominatesSolverOnRandomInstances) {
  std::mt19937_64 rng(55);
  int checked = 0;
  while (checked < 100) {
    Layout L = unit_layout(2 + checked % 2);
    PotentialSpec F(L, Newtonian{});
    Vec x = spread_config(rng, L, 2.0, 0.8);
    Vec y = spread_config(rng, L, 2.0, 0.8);
    if (segment_clearance(L, x, y, false).separation < 0.3) continue;
    SolveOptions o;
    o.max_refinements = 2;
    ManeEstimate e = mane_potential(x, y, F, 0.5, o);
    ASSERT_TRUE(e.segment_bound.has_value());
    EXPECT_LE(e.upper, *e.segment_bound + e.tolerance);
    EXPECT_TRUE(e.satisfied());
    ++checked;
  }
}

TEST(FarFieldBound, FreeAlongTheDirection) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, ZeroPair{});
  Vec a = symmetric_pair_direction();
  Vec x = make_vec({0.3, -0.2, 0.1, 0.4});
  double af = min_separation(L, a);
  double s = 50 * (1 + norm(L, x)) / af;
  double T = 1e3;
  Vec xs = x + s * a;
  FarFieldBound b = far_field_upper_bound(x, a, s, a, T, F, 0.5, SolveOptions{});
  EXPECT_NEAR(b.value, T + norm(L, xs - x), 1e-8 * b.value);
  EXPECT_EQ(b.envelope_term, 0.0);
  SolveOptions o;
  o.grading = Grading::geometric;
  GeodesicResult g = solve_geodesic(x, xs + T * a, F, 0.5, o);
  EXPECT_NEAR(g.path.length(), norm(L, xs + T * a - x), 1e-9 * b.value);
  EXPECT_LE(g.path.length(), b.value * (1 + 1e-12));
  EXPECT_GE(g.path.length(), T);
}

TEST(FarFieldBound, NewtonianEnvelopeTermClosedForm) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  Vec a = symmetric_pair_direction();
  Vec x = Vec::Zero(4);
  double af = std::sqrt(2.0);
  double s = 50 / af;
  const double lambda = 0.5;
  const double M = 2.0, N = 2.0;
  for (double T : {0.0, 10.0, 1024.0, 1e6}) {
    Vec xs = x + s * a;
    FarFieldBound b = far_field_upper_bound(x, a, s, a, T, F, lambda, 12.0);
    double upper = 2 * T + 2 * norm(L, xs);
    double closed = N * N / (lambda * af) * M * M * std::log(upper / min_separation(L, xs));
    EXPECT_NEAR(b.envelope_term, closed, 1e-9 * closed);
    EXPECT_NEAR(b.base_term, 12.0 / std::sqrt(2 * lambda), 1e-14);
    EXPECT_NEAR(b.value, T + b.base_term + b.envelope_term, 1e-12 * b.value);
  }
}

TEST(FarFieldBound, RejectsBadPreconditions) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  Vec a = symmetric_pair_direction();
  double s = 50 / std::sqrt(2.0);
  Vec x = Vec::Zero(4);
  EXPECT_THROW(far_field_upper_bound(x, a, s / 2, a, 1.0, F, 0.5, 1.0), InputDomainError);
  EXPECT_THROW(far_field_upper_bound(x, a, s, a, -1.0, F, 0.5, 1.0), InputDomainError);
  EXPECT_THROW(far_field_upper_bound(x, 2 * a, s, a, 1.0, F, 0.5, 1.0), InputDomainError);
  Vec b = make_vec({0, 1, 0, -1}) / std::sqrt(2.0);
  EXPECT_THROW(far_field_upper_bound(x, a, s, b, 1.0, F, 0.5, 1.0), InputDomainError);
}

TEST(FarFieldBound, KeplerTravel1024) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  Vec a = symmetric_pair_direction();
  Vec x = make_vec({0.5, 0.2, -0.3, 0.1});
  double s = 50 * (1 + norm(L, x)) / min_separation(L, a);
  SolveOptions o;
  o.grading = Grading::geometric;
  const double T = 1024.0;
  FarFieldBound bound = far_field_upper_bound(x, a, s, a, T, F, 0.5, o);
  GeodesicResult g = solve_geodesic(x, x + s * a + T * a, F, 0.5, o);
  ASSERT_TRUE(g.converged);
  EXPECT_LE(g.path.length(), bound.value);
  EXPECT_GE(g.path.length(), T);
}

TEST(RayIntegralBound, DominatesQuadrature) {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> tdist(1.0, 1e4);
  std::uniform_real_distribution<double> tilt(0.0, 0.4);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 100; ++trial) {
    Layout L = unit_layout(2 + trial % 3);
    PotentialSpec F(L, trial % 2 ? PairKind(Newtonian{}) : PairKind(Homogeneous{0.5}));
    Vec z = spread_config(rng, L, 4.0, 2.0);
    Vec u = z / norm(L, z);
    Vec b = u + tilt(rng) * random_unit(rng, L);
    b /= norm(L, b);
    if (!(min_separation(L, b) > 0.0)) continue;
    double theta = max_pair_angle(L, z, b);
    if (!(theta < 1.4)) continue;
    theta = std::max(theta, 1e-3);
    double T = tdist(rng);
    double lhs = ray_potential_integral(z, b, T, F);
    double rhs = ray_integral_bound(z, b, T, theta, F);
    EXPECT_LE(lhs, rhs * (1 + 1e-9));
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(CapIntegralBound, DominatesQuadrature) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> tdist(1.0, 1e5);
  int checked = 0;
  for (int trial = 0; trial < 1000 && checked < 100; ++trial) {
    Layout L = unit_layout(2 + trial % 2);
    PotentialSpec F(L, Newtonian{});
    Vec a = random_unit(rng, L);
    double af = min_separation(L, a);
    if (!(af > 0.05)) continue;
    std::uniform_real_distribution<double> chord(0.0, af / 20.0);
    Vec b = unit_at_chord(rng, L, a, chord(rng));
    Vec zdir = unit_at_chord(rng, L, a, chord(rng));
    Vec z = (60.0 / af) * zdir;
    if (min_separation(L, z) < 2.0) continue;
    double T = tdist(rng);
    EXPECT_LE(ray_potential_integral(z, b, T, F), cap_integral_bound(z, a, b, T, F));
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(CapIntegralBound, RejectsOutsideCap) {
  Layout L = unit_layout(2);
  PotentialSpec F(L, Newtonian{});
  Vec a = symmetric_pair_direction();
  Vec b = make_vec({0, 1, 0, -1}) / std::sqrt(2.0);
  EXPECT_THROW(cap_integral_bound(40.0 * a, a, b, 1.0, F), InputDomainError);
  EXPECT_THROW(cap_integral_bound(0.5 * a, a, a, 1.0, F), InputDomainError);
}
