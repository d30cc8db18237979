#pragma once

#include <cmath>
#include <vector>

#include "nlskp/spectral.hpp"

namespace nlskp {

struct TransportPair {
  ScalarField A;
  ScalarField u;
  double eps = 0.1;
  double t = 0.0;
};

// A + u = A0 + u0, (A - u)(t, x) = (A0 - u0)(x + 2 t / eps^2)
inline TransportPair free_transport(const ScalarField& A0, const ScalarField& u0, double eps, double t) {
  if (!(t >= 0.0)) throw PreconditionViolation("free_transport: t must be non-negative");
  if (!(A0.grid == u0.grid)) throw PreconditionViolation("free_transport: grid mismatch");
  const ScalarField sum = A0 + u0;
  const ScalarField diff = translate_x(A0 - u0, 2.0 * t / (eps * eps));
  TransportPair out{ScalarField(A0.grid), ScalarField(A0.grid), eps, t};
  for (std::size_t i = 0; i < sum.size(); ++i) {
    out.A[i] = 0.5 * (sum[i] + diff[i]);
    out.u[i] = 0.5 * (sum[i] - diff[i]);
  }
  return out;
}

struct WindowRow {
  double eps;
  double T;              // horizon actually integrated
  std::size_t samples;   // time samples of the trapezoid rule
  double windowed;       // int_0^T int_{-R}^{R} |A - u|^2
  double bound;          // (eps^2/2) 2R ||A0 - u0||^2
  double ratio;          // sqrt(windowed) / eps
  bool holds;
};

struct WindowReport {
  double R;
  std::vector<WindowRow> rows;
};

inline double traversal_time(double eps, double L) { return 0.5 * eps * eps * L; }

// Space-time L2 norm of A - u over [0,T] x [-R,R] for each eps; T <= 0 means one traversal.
// Without allow_wrap, T is capped at one traversal of the box.
inline WindowReport window_norm_scaling(const ScalarField& A0, const ScalarField& u0,
                                        const std::vector<double>& eps_list, double T, double R,
                                        bool allow_wrap = false) {
  const auto& g = A0.grid;
  if (g.dim != 1) throw PreconditionViolation("window_norm_scaling: 1D fields required");
  if (!(R > 0.0 && R <= 0.5 * g.L[0])) throw PreconditionViolation("window_norm_scaling: window outside box");
  const ScalarField d0 = A0 - u0;
  const double norm2 = std::pow(l2_norm(d0), 2);
  const double dx = g.dx(0);
  std::vector<double> wx(g.n[0], 0.0);
  for (std::size_t i = 0; i < g.n[0]; ++i) {
    const double x = g.coord(0, i);
    if (std::abs(x) <= R * (1.0 + 1e-12)) wx[i] = std::abs(std::abs(x) - R) <= 1e-12 * R ? 0.5 * dx : dx;
  }
  WindowReport rep{R, {}};
  for (double eps : eps_list) {
    const double trav = traversal_time(eps, g.L[0]);
    double Tu = T > 0.0 ? T : trav;
    if (!allow_wrap) Tu = std::min(Tu, trav);
    const double shift_total = 2.0 * Tu / (eps * eps);
    const auto passes = std::size_t(std::ceil(shift_total / g.L[0] - 1e-12));
    const std::size_t n = std::max<std::size_t>({64 * std::max<std::size_t>(passes, 1),
                                                  4 * std::size_t(std::ceil(shift_total / dx)), 2});
    const double h = Tu / double(n);
    double acc = 0.0;
    for (std::size_t m = 0; m <= n; ++m) {
      const double t = h * double(m);
      const ScalarField d = translate_x(d0, 2.0 * t / (eps * eps));
      double sx = 0.0;
      for (std::size_t i = 0; i < g.n[0]; ++i) sx += wx[i] * d[i] * d[i];
      acc += (m == 0 || m == n ? 0.5 : 1.0) * h * sx;
    }
    const double bound = 0.5 * eps * eps * 2.0 * R * norm2;
    // rounding allowance: the bound is attained with equality at exactly one traversal
    rep.rows.push_back({eps, Tu, n + 1, acc, bound, std::sqrt(acc) / eps, acc <= bound * (1.0 + 1e-10)});
  }
  return rep;
}

}  // namespace nlskp
