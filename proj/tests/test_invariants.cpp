#include <gtest/gtest.h>

#include "nlskp/nls_solver.hpp"
#include "oracles.hpp"

using namespace nlskp;

namespace {

const double pi = std::numbers::pi;
const auto gp = NonlinearityModel::gross_pitaevskii();

ComplexField smooth(const PeriodicGrid& g, double eps, double amp = 0.6) {
  ComplexField psi(g);
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double x = g.coord(0, i), y = g.dim == 2 ? g.coord(1, j) : 0.0;
      const double A = -amp / std::pow(std::cosh(x), 2) * (1.0 + 0.3 * std::cos(2 * pi * y / g.L[1]));
      const double phi = 2.0 * amp * std::exp(-0.25 * x * x) + 0.2 * std::sin(2 * pi * x / g.L[0]);
      psi(i, j) = std::polar(1.0 + eps * eps * A, eps * phi);
    }
  return psi;
}

// boosted scaled soliton and its x-derivative, straight from the profile formula
struct SolitonSample {
  cplx psi, dpsi;
};

SolitonSample soliton_at(double x, double eps, double Lx) {
  const double sigma = std::sqrt(1 - eps * eps), v = 2 * eps * std::asin(eps) / Lx;
  const double z = x / eps;
  const cplx U = oracle::soliton(sigma, z);
  const double ch = std::cosh(eps * z);
  const cplx dU(0.0, -eps * eps / (ch * ch));
  const cplx ph = std::polar(1.0, v * z);
  return {U * ph, (dU + cplx(0.0, v) * U) * ph / eps};
}

}  // namespace

TEST(Energy, BackgroundIsZero) {
  const PeriodicGrid g(32, 10.0);
  EXPECT_EQ(energy_scaled(ComplexField(g, 1.0), 0.1, gp), 0.0);
  EXPECT_EQ(momentum_scaled(ComplexField(g, 1.0), 0.1), 0.0);
}

TEST(Energy, PhaseOnlyState) {
  const PeriodicGrid g(64, 2 * pi);
  const double eps = 0.3;
  ComplexField psi(g);
  for (std::size_t i = 0; i < g.nx(); ++i) psi[i] = std::polar(1.0, eps * std::sin(g.coord(0, i)));
  // (1/2) int eps^2 cos^2 = eps^2 pi / 2
  EXPECT_NEAR(energy_scaled(psi, eps, gp), 0.5 * eps * eps * pi, 1e-12);
  EXPECT_NEAR(momentum_scaled(psi, eps), 0.0, 1e-14);
}

TEST(Energy, SolitonAgainstQuadrature) {
  const double L = 32 * pi;
  const PeriodicGrid g(1024, L);
  for (double eps : {0.2, 0.1}) {
    const ComplexField psi = dark_soliton_scaled(g, eps, 0.0);
    auto e_density = [&](double x) {
      const auto s = soliton_at(x, eps, L);
      const double d = std::norm(s.psi) - 1.0;
      return 0.5 * (std::norm(s.dpsi) + d * d / (eps * eps));
    };
    auto p_density = [&](double x) {
      const auto s = soliton_at(x, eps, L);
      return (std::norm(s.psi) - 1.0) * (std::conj(s.psi) * s.dpsi).imag() / std::norm(s.psi) / (2 * eps);
    };
    const double E = oracle::simpson(e_density, -L / 2, L / 2, 4 * 1024);
    const double P = oracle::simpson(p_density, -L / 2, L / 2, 4 * 1024);
    EXPECT_NEAR(energy_scaled(psi, eps, gp) / E, 1.0, 1e-10) << eps;
    EXPECT_NEAR(momentum_scaled(psi, eps) / P, 1.0, 1e-10) << eps;
    // unboosted closed form (4/3) eps^2; the boost only adds O(eps^2/L)
    EXPECT_NEAR(E / (4.0 / 3.0 * eps * eps), 1.0, 0.05);
  }
}

TEST(Energy, CompletedSquareMatchesDirectForm) {
  const auto cq = NonlinearityModel::cubic_quintic(0.5, 0.25);
  for (const PeriodicGrid& g : {PeriodicGrid(256, 20.0), PeriodicGrid(128, 32, 20.0, 12.0)})
    for (const auto& m : {gp, cq})
      for (double eps : {0.3, 0.1}) {
        const ComplexField psi = smooth(g, eps);
        const double E = energy_scaled(psi, eps, m), P = momentum_scaled(psi, eps);
        const double c = m.c();
        const auto minus = combined(psi, eps, m, Sign::minus);
        const auto plus = combined(psi, eps, m, Sign::plus);
        EXPECT_NEAR(minus.value, E - 2 * c * P, 1e-9 * std::abs(E));
        EXPECT_NEAR(plus.value, E + 2 * c * P, 1e-9 * std::abs(E));
        EXPECT_GE(minus.square, 0.0);
      }
}

TEST(Energy, ExpansionResidualsStayBounded) {
  const PeriodicGrid g(512, 32 * pi);
  std::vector<double> re, rp, rm;
  for (double eps : {0.2, 0.1, 0.05}) {
    // well prepared: phi = 2c d_x^{-1} A
    const ScalarField A = remove_line_means(ScalarField::sample(g, [](double x, double) { return -0.5 / std::pow(std::cosh(x), 2); }));
    const PolarState p{A, 2.0 * x_antiderivative(A), eps};
    re.push_back(expansion_residual(p, gp, ExpansionIdentity::energy));
    rp.push_back(expansion_residual(p, gp, ExpansionIdentity::momentum));
    rm.push_back(expansion_residual(p, gp, ExpansionIdentity::energy_minus));
  }
  for (std::size_t i = 1; i < re.size(); ++i) {
    EXPECT_LT(re[i], 3.0 * re[0]);
    EXPECT_LT(rp[i], 3.0 * rp[0]);
    EXPECT_LT(rm[i], 3.0 * rm[0]);
  }
  const PolarState p{ScalarField(g, 0.0), ScalarField(g, 0.0), 0.1};
  EXPECT_THROW(expansion_residual(p, gp, ExpansionIdentity::nu), PreconditionViolation);
}

TEST(Energy, NuVanishesOnExactLimitAndCountsDeficit) {
  const PeriodicGrid g(128, 20.0);
  const double eps = 0.1;
  const ScalarField A = remove_line_means(ScalarField::sample(g, [](double x, double) { return std::exp(-x * x); }));
  PolarState p{A, 2.0 * x_antiderivative(A), eps};
  EXPECT_LT(nu_term(p, A, 1.0), 1e-18);
  p.phi = p.phi + ScalarField::sample(g, [](double x, double) { return std::sin(2 * pi * x / 20.0); });
  // deficit (2 pi/20)^2 * 10 over eps^2
  EXPECT_NEAR(nu_term(p, A, 1.0), std::pow(2 * pi / 20.0, 2) * 10.0 / (eps * eps), 1e-8);
  const std::vector<PolarState> traj{p, p};
  EXPECT_THROW(expansion_residual(traj, {A}, 1.0, ExpansionIdentity::nu), PreconditionViolation);
}

TEST(Energy, LowerBound) {
  const PeriodicGrid g(16, 1.0);
  EXPECT_TRUE(lower_bound_holds(smooth(PeriodicGrid(64, 10.0), 0.3), gp));
  // F(1+s) = s^2 - (20/3) s^3 drops below s^2/2 for s > 0.075
  const auto soft = NonlinearityModel::user_polynomial({-11.0, 21.0, -10.0});
  EXPECT_TRUE(lower_bound_holds(ComplexField(g, std::sqrt(1.05)), soft));
  EXPECT_FALSE(lower_bound_holds(ComplexField(g, std::sqrt(1.2)), soft));
}

TEST(Energy, ReportCollectsEverything) {
  const PeriodicGrid g(256, 20.0);
  const double eps = 0.2;
  const ComplexField psi = smooth(g, eps);
  const auto r = evaluate_invariants(psi, eps, gp);
  EXPECT_DOUBLE_EQ(r.E_eps, energy_scaled(psi, eps, gp));
  EXPECT_NEAR(r.E_minus_2cP, r.E_eps - 2 * r.P_eps, 1e-9 * r.E_eps);
  EXPECT_DOUBLE_EQ(r.mass, mass(psi));
  const auto kv = kdv_invariants(polar_decompose(psi, eps).A, 1.0, 6.0);
  EXPECT_DOUBLE_EQ(r.I0, kv.I0);
  EXPECT_DOUBLE_EQ(r.I1, kv.I1);
}
