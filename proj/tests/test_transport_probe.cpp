#include <gtest/gtest.h>

#include "nlskp/transport_probe.hpp"
#include "oracles.hpp"

using namespace nlskp;

namespace {

const double pi = std::numbers::pi;

ScalarField gaussian(const PeriodicGrid& g, double x0, double w) {
  return ScalarField::sample(g, [&](double x, double) {
    double y = x - x0;
    y -= g.L[0] * std::floor(y / g.L[0] + 0.5);
    return std::exp(-y * y / (w * w));
  });
}

}  // namespace

TEST(FreeTransport, SumIsFixedAndDifferenceMoves) {
  const PeriodicGrid g(256, 32 * pi);
  const double eps = 0.2, t = 0.01;
  const ScalarField A0 = gaussian(g, 0.0, 2.0), u0 = 0.5 * gaussian(g, 3.0, 1.5);
  const TransportPair p = free_transport(A0, u0, eps, t);
  EXPECT_LT(linf_norm((p.A + p.u) - (A0 + u0)), 1e-14);
  // (A - u)(t, x) = (A0 - u0)(x + 2t/eps^2)
  const double s = 2 * t / (eps * eps);
  const ScalarField expect = gaussian(g, -s, 2.0) - 0.5 * gaussian(g, 3.0 - s, 1.5);
  EXPECT_LT(linf_norm((p.A - p.u) - expect), 1e-12);
  EXPECT_EQ(p.eps, eps);
  EXPECT_EQ(p.t, t);
}

TEST(FreeTransport, Guards) {
  const PeriodicGrid g(32, 10.0);
  EXPECT_THROW(free_transport(ScalarField(g), ScalarField(g), 0.1, -1.0), PreconditionViolation);
  EXPECT_THROW(free_transport(ScalarField(g), ScalarField(PeriodicGrid(64, 10.0)), 0.1, 0.0), PreconditionViolation);
}

TEST(WindowNorm, EqualityAtOneTraversal) {
  const PeriodicGrid g(256, 32 * pi);
  const ScalarField A0 = gaussian(g, 0.0, 2.0), u0(g, 0.0);
  const double R = g.L[0] / 8;
  const auto rep = window_norm_scaling(A0, u0, {0.2, 0.1, 0.05}, 0.0, R);
  ASSERT_EQ(rep.rows.size(), 3u);
  for (const auto& r : rep.rows) {
    EXPECT_NEAR(r.T, traversal_time(r.eps, g.L[0]), 1e-15);
    EXPECT_NEAR(r.windowed / r.bound, 1.0, 1e-12) << r.eps;
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.ratio, rep.rows[0].ratio, 1e-9 * rep.rows[0].ratio);
  }
  // bound = (eps^2/2) 2R ||A0||^2 with ||A0||^2 = sqrt(pi/2) w
  EXPECT_NEAR(rep.rows[0].bound, 0.5 * 0.04 * 2 * R * std::sqrt(pi / 2) * 2.0, 1e-10);
}

TEST(WindowNorm, PartialHorizonMatchesQuadratureOracle) {
  const PeriodicGrid g(128, 20.0);
  const double k = 2 * pi * 3 / 20.0, eps = 0.3, R = 5.0, T = 0.2 * traversal_time(eps, 20.0);
  const ScalarField d0 = ScalarField::sample(g, [&](double x, double) { return std::cos(k * x); });
  const auto rep = window_norm_scaling(d0, ScalarField(g, 0.0), {eps}, T, R);
  double ref = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double x = g.coord(0, i);
    if (std::abs(x) > R + 1e-12) continue;
    const double w = std::abs(std::abs(x) - R) < 1e-12 ? 0.5 * g.dx() : g.dx();
    ref += w * oracle::simpson([&](double t) { return std::pow(std::cos(k * (x + 2 * t / (eps * eps))), 2); }, 0, T, 2000);
  }
  EXPECT_NEAR(rep.rows[0].windowed / ref, 1.0, 1e-6);
  EXPECT_LE(rep.rows[0].windowed, rep.rows[0].bound);
  EXPECT_TRUE(rep.rows[0].holds);
}

TEST(WindowNorm, HorizonCapAndWrap) {
  const PeriodicGrid g(128, 20.0);
  const ScalarField A0 = gaussian(g, 1.0, 1.0), u0(g, 0.0);
  const double eps = 0.2, trav = traversal_time(eps, 20.0);
  const auto capped = window_norm_scaling(A0, u0, {eps}, 2 * trav, 5.0);
  EXPECT_NEAR(capped.rows[0].T, trav, 1e-15);
  const auto wrapped = window_norm_scaling(A0, u0, {eps}, 2 * trav, 5.0, true);
  EXPECT_NEAR(wrapped.rows[0].T, 2 * trav, 1e-15);
  EXPECT_NEAR(wrapped.rows[0].windowed / wrapped.rows[0].bound, 2.0, 1e-10);
  EXPECT_FALSE(wrapped.rows[0].holds);
}

TEST(WindowNorm, Guards) {
  const PeriodicGrid g(32, 10.0), g2(16, 16, 10.0, 10.0);
  EXPECT_THROW(window_norm_scaling(ScalarField(g), ScalarField(g), {0.1}, 0.0, 6.0), PreconditionViolation);
  EXPECT_THROW(window_norm_scaling(ScalarField(g), ScalarField(g), {0.1}, 0.0, 0.0), PreconditionViolation);
  EXPECT_THROW(window_norm_scaling(ScalarField(g2), ScalarField(g2), {0.1}, 0.0, 1.0), PreconditionViolation);
}
