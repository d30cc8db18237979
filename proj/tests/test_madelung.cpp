#include <gtest/gtest.h>

#include "nlskp/madelung.hpp"

using namespace nlskp;

namespace {

const double pi = std::numbers::pi;

ComplexField wavy(const PeriodicGrid& g, double eps) {
  ComplexField psi(g);
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double x = g.coord(0, i), y = g.dim == 2 ? g.coord(1, j) : 0.0;
      const double A = 0.4 * std::cos(2 * pi * x / g.L[0]) + 0.1 * std::sin(2 * pi * y / g.L[1]);
      const double phi = 1.3 * std::sin(2 * pi * x / g.L[0]) * (1.0 + 0.2 * std::cos(2 * pi * y / g.L[1]));
      psi(i, j) = std::polar(1.0 + eps * eps * A, eps * phi);
    }
  return psi;
}

}  // namespace

TEST(Polar, ConstantExample) {
  const PeriodicGrid g(16, 2 * pi);
  const double eps = 0.2;
  const ComplexField psi(g, std::polar(1.0 + eps * eps * 0.3, eps * 0.7));
  const PolarState p = polar_decompose(psi, eps);
  for (std::size_t i = 0; i < g.nx(); ++i) {
    EXPECT_NEAR(p.A[i], 0.3, 1e-13);
    EXPECT_NEAR(p.phi[i], 0.7, 1e-13);
  }
}

TEST(Polar, RoundTrip) {
  for (const PeriodicGrid& g : {PeriodicGrid(64, 10.0), PeriodicGrid(32, 16, 10.0, 8.0)}) {
    const double eps = 0.3;
    const ComplexField psi = wavy(g, eps);
    const PolarDecomposition d = polar_decompose_report(psi, eps);
    EXPECT_EQ(d.transverse_jumps, 0u);
    EXPECT_LT(linf_norm(reconstruct(d.state) - psi), 1e-14);
    const PolarState back = polar_decompose(reconstruct(d.state), eps);
    EXPECT_LT(linf_norm(back.A - d.state.A), 1e-10);
    EXPECT_LT(linf_norm(back.phi - d.state.phi), 1e-10);
  }
}

TEST(Polar, PhaseIsPinnedAtOrigin) {
  const PeriodicGrid g(64, 10.0);
  const double eps = 0.1;
  ComplexField psi(g);
  // phase eps*phi with phi running well past 2 pi / eps
  for (std::size_t i = 0; i < g.nx(); ++i) psi[i] = std::polar(1.0, 3.0 * std::sin(2 * pi * g.coord(0, i) / 10.0) + 5.0);
  const PolarState p = polar_decompose(psi, eps);
  EXPECT_NEAR(p.phi[g.nx() / 2] * eps, std::arg(psi[g.nx() / 2]), 1e-13);
  for (std::size_t i = 0; i < g.nx(); ++i)
    EXPECT_NEAR(std::remainder(p.phi[i] * eps - std::arg(psi[i]), 2 * pi), 0.0, 1e-12);
}

TEST(Polar, WindingPhaseDerivative) {
  const PeriodicGrid g(64, 10.0);
  const double eps = 0.25;
  ComplexField psi(g);
  for (std::size_t i = 0; i < g.nx(); ++i) psi[i] = std::polar(1.0, 2 * pi * g.coord(0, i) / 10.0 + 0.3 * std::sin(2 * pi * g.coord(0, i) / 10.0));
  const PolarState p = polar_decompose(psi, eps);
  const ScalarField d = phase_derivative(p.phi, eps, Axis::x);
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double x = g.coord(0, i);
    EXPECT_NEAR(d[i], (2 * pi / 10.0) * (1.0 + 0.3 * std::cos(2 * pi * x / 10.0)) / eps, 1e-10);
  }
}

TEST(Polar, Guards) {
  const PeriodicGrid g(16, 2 * pi);
  ComplexField psi(g, 1.0);
  psi[3] = 0.2;
  EXPECT_THROW(polar_decompose(psi, 0.1), VortexDetected);
  psi[3] = std::polar(1.0, 2.0);
  EXPECT_THROW(polar_decompose(psi, 0.1), UnwrapAmbiguity);
  PolarState p{ScalarField(g, 0.0), ScalarField(g, 0.0), 0.5};
  p.A[2] = -2.5;
  EXPECT_THROW(reconstruct(p), AmplitudeBound);
}

TEST(Polar, VelocityComponents) {
  const PeriodicGrid g(32, 16, 10.0, 8.0);
  const double eps = 0.3, c = 1.5;
  const PolarState p = polar_decompose(wavy(g, eps), eps);
  const auto u = velocity(p, c);
  ASSERT_EQ(u.size(), 2u);
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      const double px = 1.3 * (2 * pi / 10.0) * std::cos(2 * pi * x / 10.0) * (1.0 + 0.2 * std::cos(2 * pi * y / 8.0));
      const double py = -1.3 * std::sin(2 * pi * x / 10.0) * 0.2 * (2 * pi / 8.0) * std::sin(2 * pi * y / 8.0);
      EXPECT_NEAR(u[0](i, j), px / (2 * c), 1e-10);
      EXPECT_NEAR(u[1](i, j), eps * py / (2 * c), 1e-10);
    }
}

TEST(Polar, ConstraintDeficitVanishesOnWellPreparedData) {
  const PeriodicGrid g(128, 20.0);
  const double eps = 0.2, c = 1.0;
  const ScalarField A = ScalarField::sample(g, [](double x, double) { return -0.5 / std::pow(std::cosh(x), 2); });
  const ScalarField A0 = remove_line_means(A);
  PolarState p{A0, (2 * c) * x_antiderivative(A0), eps};
  EXPECT_LT(constraint_deficit(p, c).raw, 1e-9);  // only the Nyquist mode of A0 is lost
  p.phi = p.phi + ScalarField::sample(g, [](double x, double) { return std::sin(2 * pi * x / 20.0); });
  const auto d = constraint_deficit(p, c);
  EXPECT_NEAR(d.raw, (2 * pi / 20.0) * std::sqrt(10.0), 1e-10);
  EXPECT_NEAR(d.scaled, d.raw / eps, 1e-14);
}

TEST(Grenier, InitialConventionAndReconstruction) {
  const PeriodicGrid g(64, 10.0);
  const double eps = 0.3;
  const ComplexField psi = wavy(g, eps);
  const PolarState p = polar_decompose(psi, eps);
  const GrenierState s = grenier_decompose(psi, p);
  EXPECT_LT(linf_norm(grenier_reconstruct(s) - psi), 1e-14);
  EXPECT_LT(relation_residual(s, p), 1e-12);
}

TEST(Grenier, RelationHoldsForComplexAmplitude) {
  for (const PeriodicGrid& g : {PeriodicGrid(128, 10.0), PeriodicGrid(64, 32, 10.0, 8.0)}) {
    const double eps = 0.3;
    GrenierState s{ComplexField(g), ScalarField(g), eps};
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const double x = g.coord(0, i), y = g.dim == 2 ? g.coord(1, j) : 0.0;
        s.a(i, j) = cplx(0.5 * std::cos(2 * pi * x / 10.0), 0.4 * std::sin(2 * pi * x / 10.0) + 0.2 * std::cos(2 * pi * y / 8.0));
        s.theta(i, j) = std::sin(2 * pi * x / 10.0);
      }
    const ComplexField psi = grenier_reconstruct(s);
    EXPECT_LT(relation_residual(s, polar_decompose(psi, eps)), 1e-9);
  }
}

TEST(Grenier, AmplitudeBound) {
  const PeriodicGrid g(16, 1.0);
  GrenierState s{ComplexField(g, cplx(0.0, 0.0)), ScalarField(g), 0.5};
  s.a[4] = cplx(0.0, 2.1);
  EXPECT_THROW(grenier_reconstruct(s), AmplitudeBound);
}

TEST(Scaling, ExampleAndRoundTrip) {
  const double eps = 0.5, c = 1.0;
  const ScaledCoords s = to_scaled({2.0, 3.0, 4.0}, eps, c);
  EXPECT_NEAR(s.t, 0.25, 1e-15);
  EXPECT_NEAR(s.x, 0.5, 1e-15);
  EXPECT_NEAR(s.X, 1.0, 1e-15);
  for (double cc : {1.0, 1.7}) {
    const PhysicalCoords p = to_physical(to_scaled({0.3, -1.2, 7.0}, 0.2, cc), 0.2, cc);
    EXPECT_NEAR(p.tau, 0.3, 1e-12);
    EXPECT_NEAR(p.z1, -1.2, 1e-12);
    EXPECT_NEAR(p.zperp, 7.0, 1e-12);
  }
  EXPECT_THROW(to_scaled({1, 1, 1}, 1.0, 1.0), PreconditionViolation);
  EXPECT_THROW(to_physical({1, 1, 1}, 0.0, 1.0), PreconditionViolation);
}
