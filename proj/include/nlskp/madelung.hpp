#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "nlskp/spectral.hpp"

namespace nlskp {

// |psi|^2 - 1 without cancellation near the unit circle
inline double modulus_sq_minus_one(cplx p) {
  return (p.real() - 1.0) * (p.real() + 1.0) + p.imag() * p.imag();
}

inline double min_modulus(const ComplexField& psi) {
  double m = INFINITY;
  for (const cplx& p : psi.data) m = std::min(m, std::norm(p));
  return std::sqrt(m);
}

inline void check_vortex_floor(const ComplexField& psi, double t = 0.0) {
  const double m = min_modulus(psi);
  if (!(m > vortex_floor)) throw VortexDetected(t, m);
}

struct PolarState {
  ScalarField A;
  ScalarField phi;
  double eps = 0.1;
};

struct PolarDecomposition {
  PolarState state;
  std::size_t transverse_jumps = 0;  // adjacent lines whose unwrapped phases differ by >= pi
};

inline PolarDecomposition polar_decompose_report(const ComplexField& psi, double eps, double t = 0.0) {
  check_vortex_floor(psi, t);
  const auto& g = psi.grid;
  PolarDecomposition out{{ScalarField(g), ScalarField(g), eps}, 0};
  auto& A = out.state.A;
  auto& phi = out.state.phi;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double r2m1 = modulus_sq_minus_one(psi[i]);
    A[i] = r2m1 / (std::abs(psi[i]) + 1.0) / (eps * eps);
  }
  for (std::size_t j = 0; j < g.n[1]; ++j) {
    double acc = std::arg(psi(0, j));
    phi(0, j) = acc;
    for (std::size_t i = 1; i < g.n[0]; ++i) {
      const double d = std::arg(psi(i, j) * std::conj(psi(i - 1, j)));
      if (std::abs(d) > 0.5 * std::numbers::pi)
        throw UnwrapAmbiguity("polar_decompose: phase increment " + std::to_string(d) +
                              " exceeds pi/2 at cell " + std::to_string(i) + " of line " +
                              std::to_string(j));
      acc += d;
      phi(i, j) = acc;
    }
    // pin x = 0 to the principal value
    const std::size_t i0 = g.n[0] / 2;
    const double turn = 2.0 * std::numbers::pi;
    const double shift = turn * std::round((std::arg(psi(i0, j)) - phi(i0, j)) / turn);
    for (std::size_t i = 0; i < g.n[0]; ++i) phi(i, j) += shift;
  }
  for (std::size_t j = 1; j < g.n[1]; ++j)
    for (std::size_t i = 0; i < g.n[0]; ++i) {
      const double principal = std::arg(psi(i, j) * std::conj(psi(i, j - 1)));
      if (std::abs(phi(i, j) - phi(i, j - 1) - principal) > std::numbers::pi) {
        ++out.transverse_jumps;
        break;
      }
    }
  for (auto& v : phi.data) v /= eps;
  return out;
}

inline PolarState polar_decompose(const ComplexField& psi, double eps, double t = 0.0) {
  return polar_decompose_report(psi, eps, t).state;
}

inline ComplexField reconstruct(const PolarState& p) {
  ComplexField psi(p.A.grid);
  const double e2 = p.eps * p.eps;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = 1.0 + e2 * p.A[i];
    if (rho < 0.5) throw AmplitudeBound("reconstruct: 1 + eps^2 A < 1/2");
    psi[i] = std::polar(rho, p.eps * p.phi[i]);
  }
  return psi;
}

// Spectral gradient of a phase that may wind by 2 pi k / eps across the box.
inline ScalarField phase_derivative(const ScalarField& phi, double eps, Axis axis) {
  const auto& g = phi.grid;
  const int a = int(axis);
  const std::size_t n = g.n[a];
  const double period = 2.0 * std::numbers::pi / eps;
  ScalarField periodic = phi;
  std::vector<double> slope(a == 0 ? g.n[1] : g.n[0], 0.0);
  for (std::size_t l = 0; l < (a == 0 ? g.n[1] : g.n[0]); ++l) {
    auto at = [&](std::size_t s) -> double { return a == 0 ? phi(s, l) : phi(l, s); };
    const double last = at(n - 1), first = at(0);
    double close = std::remainder(first - last, period);
    const double winding = std::round((last + close - first) / period);
    slope[l] = winding * period / g.L[a];
    for (std::size_t s = 0; s < n; ++s) {
      const double ramp = slope[l] * (g.coord(a, s) + 0.5 * g.L[a]);
      (a == 0 ? periodic(s, l) : periodic(l, s)) -= ramp;
    }
  }
  ScalarField d = derivative(periodic, axis, 1);
  for (std::size_t l = 0; l < slope.size(); ++l)
    for (std::size_t s = 0; s < n; ++s) (a == 0 ? d(s, l) : d(l, s)) += slope[l];
  return d;
}

// u = grad^eps phi / (2c); one component per axis
inline std::vector<ScalarField> velocity(const PolarState& p, double c) {
  std::vector<ScalarField> u;
  u.push_back((0.5 / c) * phase_derivative(p.phi, p.eps, Axis::x));
  if (p.phi.grid.dim == 2) u.push_back((0.5 * p.eps / c) * phase_derivative(p.phi, p.eps, Axis::perp));
  return u;
}

struct ConstraintDeficit {
  double raw;
  double scaled;
};

inline ConstraintDeficit constraint_deficit(const PolarState& p, double c) {
  ScalarField r = phase_derivative(p.phi, p.eps, Axis::x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= 2.0 * c * p.A[i];
  const double raw = l2_norm(r);
  return {raw, raw / p.eps};
}

struct GrenierState {
  ComplexField a;
  ScalarField theta;
  double eps = 0.1;
};

inline void check_grenier_bound(const ComplexField& a, double eps) {
  const double e2 = eps * eps;
  for (const cplx& v : a.data)
    if (!(e2 * std::abs(v) <= 0.5)) throw AmplitudeBound("grenier: eps^2 |a| > 1/2");
}

// Initial-time convention: a = A (real), theta = phi.
inline GrenierState grenier_decompose(const ComplexField& psi, const PolarState& polar) {
  if (!(psi.grid == polar.A.grid)) throw PreconditionViolation("grenier_decompose: grid mismatch");
  GrenierState s{complexify(polar.A), polar.phi, polar.eps};
  check_grenier_bound(s.a, s.eps);
  return s;
}

inline ComplexField grenier_reconstruct(const GrenierState& s) {
  check_grenier_bound(s.a, s.eps);
  ComplexField psi(s.a.grid);
  const double e2 = s.eps * s.eps;
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = (1.0 + e2 * s.a[i]) * std::polar(1.0, s.eps * s.theta[i]);
  return psi;
}

// v = grad^eps theta / (2c)
inline std::vector<ScalarField> grenier_velocity(const GrenierState& s, double c) {
  std::vector<ScalarField> v;
  v.push_back((0.5 / c) * phase_derivative(s.theta, s.eps, Axis::x));
  if (s.theta.grid.dim == 2)
    v.push_back((0.5 * s.eps / c) * phase_derivative(s.theta, s.eps, Axis::perp));
  return v;
}

// max over axes and points of | d_j phi - d_j theta - (eps/i)(d_j a/(1+eps^2 a) - d_j A/(1+eps^2 A)) |
inline double relation_residual(const GrenierState& s, const PolarState& p) {
  const double e2 = s.eps * s.eps;
  double worst = 0.0;
  for (int ax = 0; ax < s.a.grid.dim; ++ax) {
    const Axis axis = Axis(ax);
    const ScalarField dphi = phase_derivative(p.phi, p.eps, axis);
    const ScalarField dtheta = phase_derivative(s.theta, s.eps, axis);
    const ComplexField da = derivative(s.a, axis, 1);
    const ScalarField dA = derivative(p.A, axis, 1);
    for (std::size_t i = 0; i < dphi.size(); ++i) {
      const cplx rhs = dtheta[i] + (s.eps / cplx(0.0, 1.0)) *
                                       (da[i] / (1.0 + e2 * s.a[i]) - dA[i] / (1.0 + e2 * p.A[i]));
      worst = std::max(worst, std::abs(dphi[i] - rhs));
    }
  }
  return worst;
}

struct PhysicalCoords {
  double tau;
  double z1;
  double zperp = 0.0;
};

struct ScaledCoords {
  double t;
  double x;
  double X = 0.0;
};

inline ScaledCoords to_scaled(const PhysicalCoords& p, double eps, double c) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionViolation("scaling_map: eps must lie in (0,1)");
  return {c * eps * eps * eps * p.tau, eps * (p.z1 - c * p.tau), eps * eps * p.zperp};
}

inline PhysicalCoords to_physical(const ScaledCoords& s, double eps, double c) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionViolation("scaling_map: eps must lie in (0,1)");
  const double tau = s.t / (c * eps * eps * eps);
  return {tau, s.x / eps + c * tau, s.X / (eps * eps)};
}

}  // namespace nlskp
