#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "nlskp/madelung.hpp"
#include "nlskp/nls_solver.hpp"

namespace nlskp {

// (a, theta) system:
//   a_t - a_x/eps^2 + (1/c) grad theta . grad a + (1/(2c eps^2))(1 + eps^2 a) Lap theta = (i/(2 eps c)) Lap a
//   theta_t - theta_x/eps^2 + |grad theta|^2/(2c) + f(|1 + eps^2 a|^2)/(c eps^4) = 0
// with grad = (d_x, eps d_perp). Writing a = p + i q, the linear acoustic block in
// (p, q, theta) is exponentiated exactly per Fourier mode; the remainder goes to RK4.
class GrenierStepper {
 public:
  GrenierStepper(const PeriodicGrid& g, double eps, NonlinearityModel model, double dt)
      : grid_(g), eps_(eps), model_(std::move(model)), dt_(dt), plan_(FftPlan::get(g)) {
    if (!(eps > 0.0 && eps < 1.0)) throw PreconditionViolation("grenier: eps must lie in (0,1)");
    if (!(dt > 0.0)) throw PreconditionViolation("grenier: dt must be positive");
    const std::size_t n = g.size();
    half_.resize(n);
    full_.resize(n);
    mask_.resize(n);
    const double c = model_.c(), e2 = eps * eps;
    for_each_mode(g, [&](std::size_t idx, double kx, double ky, std::size_t i, std::size_t j) {
      const double k2 = kx * kx + e2 * ky * ky;
      const double alpha = k2 / (2.0 * eps * c), gamma = k2 / (2.0 * c * e2), beta = 2.0 * c / e2;
      half_[idx] = propagator(kx / e2, alpha, beta, gamma, 0.5 * dt);
      full_[idx] = propagator(kx / e2, alpha, beta, gamma, dt);
      mask_[idx] = dealias_keep(g, i, j) ? 1.0 : 0.0;
    });
  }

  double dt() const { return dt_; }

  void step(GrenierState& s, double& t) const { advance(s, t, 1); }

  void advance(GrenierState& s, double& t, std::size_t nsteps) const {
    if (!(s.a.grid == grid_)) throw PreconditionViolation("grenier: state grid differs from stepper grid");
    check_grenier_bound(s.a, eps_);
    if (nsteps == 0) return;
    const std::size_t n = grid_.size();
    Vec u(n), k1(n), k2(n), k3(n), k4(n), w(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = {s.a[i].real(), s.a[i].imag(), s.theta[i]};
    to_spectral(u);
    for (std::size_t step = 0; step < nsteps; ++step) {
      rhs(u, k1, t);
      for (std::size_t i = 0; i < n; ++i) w[i] = apply(half_[i], axpy(u[i], 0.5 * dt_, k1[i]));
      rhs(w, k2, t);
      for (std::size_t i = 0; i < n; ++i) w[i] = axpy(apply(half_[i], u[i]), 0.5 * dt_, k2[i]);
      rhs(w, k3, t);
      for (std::size_t i = 0; i < n; ++i) w[i] = axpy(apply(full_[i], u[i]), dt_, apply(half_[i], k3[i]));
      rhs(w, k4, t);
      for (std::size_t i = 0; i < n; ++i) {
        Triple acc = apply(full_[i], k1[i]);
        const Triple mid = apply(half_[i], {k2[i][0] + k3[i][0], k2[i][1] + k3[i][1], k2[i][2] + k3[i][2]});
        for (int c = 0; c < 3; ++c) acc[c] += 2.0 * mid[c] + k4[i][c];
        u[i] = axpy(apply(full_[i], u[i]), dt_ / 6.0, acc);
      }
      t += dt_;
    }
    to_physical(u);
    for (std::size_t i = 0; i < n; ++i) {
      s.a[i] = cplx(u[i][0].real(), u[i][1].real());
      s.theta[i] = u[i][2].real();
      if (!std::isfinite(std::abs(s.a[i])) || !std::isfinite(s.theta[i]))
        throw NonFinite("grenier: non-finite sample at t=" + std::to_string(t));
    }
    check_grenier_bound(s.a, eps_);
  }

 private:
  using Triple = std::array<cplx, 3>;
  using Mat3 = std::array<cplx, 9>;
  using Vec = std::vector<Triple>;

  // exp(h [ i kt I + K ]), K = [[0, alpha, gamma], [-alpha, 0, 0], [-beta, 0, 0]]; K^3 = -w^2 K
  static Mat3 propagator(double kt, double alpha, double beta, double gamma, double h) {
    const double K[9] = {0.0, alpha, gamma, -alpha, 0.0, 0.0, -beta, 0.0, 0.0};
    double K2[9] = {};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        for (int m = 0; m < 3; ++m) K2[3 * r + c] += K[3 * r + m] * K[3 * m + c];
    const double w = std::sqrt(alpha * alpha + beta * gamma);
    const double s1 = w > 0.0 ? std::sin(w * h) / w : h;
    const double sh = w > 0.0 ? std::sin(0.5 * w * h) / w : 0.5 * h;
    const double s2 = 2.0 * sh * sh;
    const cplx phase = std::polar(1.0, kt * h);
    Mat3 E;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        E[3 * r + c] = phase * ((r == c ? 1.0 : 0.0) + s1 * K[3 * r + c] + s2 * K2[3 * r + c]);
    return E;
  }

  static Triple apply(const Mat3& E, const Triple& v) {
    return {E[0] * v[0] + E[1] * v[1] + E[2] * v[2], E[3] * v[0] + E[4] * v[1] + E[5] * v[2],
            E[6] * v[0] + E[7] * v[1] + E[8] * v[2]};
  }

  static Triple axpy(const Triple& x, double a, const Triple& y) {
    return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
  }

  void transform(Vec& u, bool forward) const {
    std::vector<cplx> buf(u.size());
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < u.size(); ++i) buf[i] = u[i][c];
      forward ? plan_->forward(buf.data()) : plan_->backward(buf.data());
      for (std::size_t i = 0; i < u.size(); ++i) u[i][c] = buf[i];
    }
  }
  void to_spectral(Vec& u) const { transform(u, true); }
  void to_physical(Vec& u) const { transform(u, false); }

  // physical field from masked spectrum times (i kx)^ox (i ky)^oy
  void synth(const Vec& u, int comp, int ox, int oy, std::vector<double>& out, std::vector<cplx>& buf) const {
    for_each_mode(grid_, [&](std::size_t idx, double kx, double ky, std::size_t, std::size_t) {
      cplx m = mask_[idx];
      for (int o = 0; o < ox; ++o) m *= cplx(0.0, kx);
      for (int o = 0; o < oy; ++o) m *= cplx(0.0, ky);
      buf[idx] = m * u[idx][comp];
    });
    plan_->backward(buf.data());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  }

  void rhs(const Vec& u, Vec& out, double t) const {
    const std::size_t n = u.size();
    const double c = model_.c(), e = eps_, e2 = e * e, e4 = e2 * e2;
    std::vector<cplx> buf(n);
    std::vector<double> p(n), q(n), tx(n), txx(n), px(n), qx(n);
    synth(u, 0, 0, 0, p, buf);
    synth(u, 1, 0, 0, q, buf);
    synth(u, 2, 1, 0, tx, buf);
    synth(u, 2, 2, 0, txx, buf);
    synth(u, 0, 1, 0, px, buf);
    synth(u, 1, 1, 0, qx, buf);
    std::vector<double> ty, tyy, py, qy;
    if (grid_.dim == 2) {
      ty.resize(n), tyy.resize(n), py.resize(n), qy.resize(n);
      synth(u, 2, 0, 1, ty, buf);
      synth(u, 2, 0, 2, tyy, buf);
      synth(u, 0, 0, 1, py, buf);
      synth(u, 1, 0, 1, qy, buf);
    }
    std::vector<cplx> na(n), nt(n);
    for (std::size_t i = 0; i < n; ++i) {
      double gpa = tx[i] * px[i], gqa = tx[i] * qx[i], lap = txx[i], g2 = tx[i] * tx[i];
      if (grid_.dim == 2) {
        gpa += e2 * ty[i] * py[i];
        gqa += e2 * ty[i] * qy[i];
        lap += e2 * tyy[i];
        g2 += e2 * ty[i] * ty[i];
      }
      const double a2 = p[i] * p[i] + q[i] * q[i];
      if (!std::isfinite(a2) || !std::isfinite(lap))
        throw NonFinite("grenier: non-finite sample at t=" + std::to_string(t));
      if (e2 * std::sqrt(a2) > 0.5) throw AmplitudeBound("grenier: eps^2 |a| > 1/2 at t=" + std::to_string(t));
      const double s = 2.0 * e2 * p[i] + e4 * a2;
      na[i] = cplx(-(gpa + 0.5 * p[i] * lap) / c, -(gqa + 0.5 * q[i] * lap) / c);
      nt[i] = -0.5 * g2 / c - (c * a2 + model_.f_dev_quadratic(s) / e4) / c;
    }
    // split the complex a-remainder into spectra of its real and imaginary parts
    std::vector<cplx> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = na[i].real();
      im[i] = na[i].imag();
    }
    plan_->forward(re.data());
    plan_->forward(im.data());
    plan_->forward(nt.data());
    for (std::size_t i = 0; i < n; ++i) out[i] = {mask_[i] * re[i], mask_[i] * im[i], mask_[i] * nt[i]};
  }

  PeriodicGrid grid_;
  double eps_;
  NonlinearityModel model_;
  double dt_;
  std::shared_ptr<const FftPlan> plan_;
  std::vector<Mat3> half_, full_;
  std::vector<double> mask_;
};

inline GrenierState grenier_step(GrenierState s, double dt, const NonlinearityModel& model) {
  double t = 0.0;
  GrenierStepper(s.a.grid, s.eps, model, dt).step(s, t);
  return s;
}

struct GrenierTrajectory {
  std::vector<GrenierState> snapshots;
  std::vector<double> times;
  double dt_used = 0.0;
};

inline GrenierTrajectory simulate_grenier(const GrenierState& s0, const NonlinearityModel& model, double T,
                                          double dt, double output_interval = 0.0) {
  GrenierTrajectory traj;
  GrenierState s = s0;
  traj.snapshots.push_back(s);
  traj.times.push_back(0.0);
  const TimeGrid tg = make_time_grid(T, dt, output_interval);
  traj.dt_used = tg.dt;
  if (tg.outputs == 0) return traj;
  const GrenierStepper stepper(s0.a.grid, s0.eps, model, tg.dt);
  double t = 0.0;
  for (std::size_t o = 1; o <= tg.outputs; ++o) {
    stepper.advance(s, t, tg.steps_per_output);
    t = T * double(o) / double(tg.outputs);
    traj.snapshots.push_back(s);
    traj.times.push_back(t);
  }
  return traj;
}

// One sample of U = (Re a, Im a, v).
struct HydroSample {
  cplx a;
  std::vector<double> v;
};

inline void check_symbol_args(const HydroSample& U, double eps, std::size_t n) {
  if (U.v.size() != n) throw PreconditionViolation("symbol: v and xi dimensions differ");
  if (!(eps * eps * std::abs(U.a) <= 0.5)) throw AmplitudeBound("symbol: eps^2 |a| > 1/2");
}

// H(eps^2 U, xi) for the abstract form dU/dt + eps^-2 H(eps^2 U, d^eps) U = eps^-1 L(d^eps) U
inline Eigen::MatrixXd symbol_H(const HydroSample& U, double eps, const std::vector<double>& xi,
                                const NonlinearityModel& model) {
  const std::size_t n = xi.size();
  check_symbol_args(U, eps, n);
  const double e2 = eps * eps;
  double vxi = 0.0;
  for (std::size_t j = 0; j < n; ++j) vxi += U.v[j] * xi[j];
  const double diag = -xi[0] + 2.0 * e2 * vxi;
  const double ea[2] = {1.0 + e2 * U.a.real(), e2 * U.a.imag()};
  const double gp1 = 1.0 + model.g(e2 * U.a);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 + n, 2 + n);
  for (std::size_t r = 0; r < 2 + n; ++r) H(r, r) = diag;
  for (int r = 0; r < 2; ++r)
    for (std::size_t j = 0; j < n; ++j) {
      H(r, 2 + j) = ea[r] * xi[j];
      H(2 + j, r) = gp1 * xi[j] * ea[r];
    }
  return H;
}

inline Eigen::MatrixXd symmetrizer_S(const HydroSample& U, double eps, const NonlinearityModel& model) {
  check_symbol_args(U, eps, U.v.size());
  const double gp1 = 1.0 + model.g(eps * eps * U.a);
  if (!(gp1 > 0.0)) throw AmplitudeBound("symmetrizer: 1 + g(eps^2 a) <= 0");
  const std::size_t n = U.v.size();
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2 + n, 2 + n);
  for (std::size_t j = 0; j < n; ++j) S(2 + j, 2 + j) = 1.0 / gp1;
  return S;
}

// Fourier symbol of L(d^eps) = (1/(2c)) [[J Lap^eps, 0], [0, 0]]; xi is the scaled frequency.
inline Eigen::MatrixXd L_symbol(const std::vector<double>& xi, const NonlinearityModel& model) {
  const std::size_t n = xi.size();
  double k2 = 0.0;
  for (double x : xi) k2 += x * x;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 + n, 2 + n);
  L(0, 1) = k2 / (2.0 * model.c());
  L(1, 0) = -k2 / (2.0 * model.c());
  return L;
}

// Smallest eigenvalue of S over eps^2 a in the closed disc of radius 1/2 (sampled).
inline double measure_c0(const NonlinearityModel& model, std::size_t n = 1, int radial = 64, int angular = 128) {
  double c0 = INFINITY;
  for (int r = 0; r <= radial; ++r)
    for (int k = 0; k < angular; ++k) {
      const cplx b = std::polar(0.5 * r / radial, 2.0 * std::numbers::pi * k / angular);
      HydroSample U{b, std::vector<double>(n, 0.0)};
      double lmin;
      try {
        const Eigen::MatrixXd S = symmetrizer_S(U, 1.0 - 1e-15, model);
        lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().minCoeff();
      } catch (const AmplitudeBound&) {
        return 0.0;
      }
      c0 = std::min(c0, lmin);
    }
  return c0;
}

// V = (V1, V2, V3[, V4]) fields; (S L V, V) in L2, with S sampled from an optional state.
inline double skew_quadratic_check(const std::vector<ScalarField>& V, double eps, const NonlinearityModel& model,
                                   const GrenierState* state = nullptr) {
  if (V.size() < 3) throw PreconditionViolation("skew check: at least three components required");
  const double c = model.c();
  const ScalarField l1 = laplacian_eps(V[1], eps), l0 = laplacian_eps(V[0], eps);
  const double dv = V[0].grid.cell_volume();
  double acc = 0.0;
  for (std::size_t i = 0; i < V[0].size(); ++i) {
    double s_a = 1.0;  // S restricted to the a-block is the identity for every state
    if (state) {
      HydroSample U{state->a[i], std::vector<double>(V.size() - 2, 0.0)};
      s_a = symmetrizer_S(U, eps, model)(0, 0);
    }
    const double LV0 = -l1[i] / (2.0 * c), LV1 = l0[i] / (2.0 * c);
    acc += s_a * (LV0 * V[0][i] + LV1 * V[1][i]) * dv;
  }
  return std::abs(acc);
}

inline double h2_norm_sq(const std::vector<ScalarField>& V) {
  double s = 0.0;
  for (const auto& f : V) s += std::pow(hs_norm(f, 2.0), 2);
  return s;
}

// || d_x v_perp - eps grad_perp v_1 ||
inline double curl_constraint_deficit(const std::vector<ScalarField>& v, double eps) {
  if (v.size() != 2 || v[0].grid.dim != 2) throw PreconditionViolation("curl deficit: n = 2 required");
  const ScalarField d = derivative(v[1], Axis::x) - eps * derivative(v[0], Axis::perp);
  return l2_norm(d);
}

namespace detail {

inline void check_uniform_times(const std::vector<double>& t, std::size_t min_count) {
  if (t.size() < min_count) throw PreconditionViolation("residual: too few snapshots");
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - h) > 1e-9 * std::abs(h))
      throw PreconditionViolation("residual: snapshots must be equally spaced");
}

template <class T>
T d4(const std::vector<T>& f, std::size_t j, double h) {
  T r = f[j - 2];
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (f[j - 2][i] - 8.0 * f[j - 1][i] + 8.0 * f[j + 1][i] - f[j + 2][i]) / (12.0 * h);
  return r;
}

// Polar decompositions with consecutive phases aligned to the same 2 pi / eps branch.
inline std::vector<PolarState> aligned_polar(const std::vector<ComplexField>& psi, double eps,
                                             const std::vector<double>& t) {
  std::vector<PolarState> out;
  const double period = 2.0 * std::numbers::pi / eps;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    PolarState p = polar_decompose(psi[j], eps, t[j]);
    if (j > 0) {
      double mean = 0.0;
      for (std::size_t i = 0; i < p.phi.size(); ++i) mean += p.phi[i] - out.back().phi[i];
      mean /= double(p.phi.size());
      const double shift = period * std::round(mean / period);
      for (auto& v : p.phi.data) v -= shift;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

struct ResidualSeries {
  std::vector<double> t;
  std::vector<std::vector<double>> eq;  // eq[e][j]: L2 residual of equation e at time t[j]
  std::vector<double> max;              // per equation
};

// Polar hydrodynamic system on a trajectory of wavefunctions:
//   eps^2 c A_t - c A_x + eps^2 grad A . grad phi + (1/2)(1 + eps^2 A) Lap phi = 0
//   eps^2 c phi_t - c phi_x - eps^2 Lap A / (2(1 + eps^2 A)) + (eps^2/2)|grad phi|^2 + f((1 + eps^2 A)^2)/eps^2 = 0
inline ResidualSeries residual_phamd(const std::vector<ComplexField>& psi, const std::vector<double>& t, double eps,
                                     const NonlinearityModel& model) {
  detail::check_uniform_times(t, 5);
  const double h = t[1] - t[0], c = model.c(), e2 = eps * eps;
  const auto polar = detail::aligned_polar(psi, eps, t);
  std::vector<std::vector<double>> A, phi;
  for (const auto& p : polar) {
    A.push_back(p.A.data);
    phi.push_back(p.phi.data);
  }
  ResidualSeries rs;
  rs.eq.resize(2);
  for (std::size_t j = 2; j + 2 < polar.size(); ++j) {
    const auto& p = polar[j];
    const auto At = detail::d4(A, j, h), pt = detail::d4(phi, j, h);
    const ScalarField Ax = derivative(p.A, Axis::x);
    const ScalarField phx = phase_derivative(p.phi, eps, Axis::x);
    const ScalarField lapA = laplacian_eps(p.A, eps);
    ScalarField lapphi = derivative(phx, Axis::x);
    ScalarField g2(p.A.grid), gAgphi(p.A.grid);
    for (std::size_t i = 0; i < g2.size(); ++i) {
      g2[i] = phx[i] * phx[i];
      gAgphi[i] = Ax[i] * phx[i];
    }
    if (p.A.grid.dim == 2) {
      const ScalarField phy = phase_derivative(p.phi, eps, Axis::perp);
      const ScalarField Ay = derivative(p.A, Axis::perp);
      const ScalarField phyy = derivative(phy, Axis::perp);
      for (std::size_t i = 0; i < g2.size(); ++i) {
        g2[i] += e2 * phy[i] * phy[i];
        gAgphi[i] += e2 * Ay[i] * phy[i];
        lapphi[i] += e2 * phyy[i];
      }
    }
    ScalarField r1(p.A.grid), r2(p.A.grid);
    for (std::size_t i = 0; i < r1.size(); ++i) {
      const double rho = 1.0 + e2 * p.A[i];
      const double s = 2.0 * e2 * p.A[i] + e2 * e2 * p.A[i] * p.A[i];
      const double f_over_e2 = c * c * (2.0 * p.A[i] + e2 * p.A[i] * p.A[i]) + model.f_dev_quadratic(s) / e2;
      r1[i] = e2 * c * At[i] - c * Ax[i] + e2 * gAgphi[i] + 0.5 * rho * lapphi[i];
      r2[i] = e2 * c * pt[i] - c * phx[i] - e2 * lapA[i] / (2.0 * rho) + 0.5 * e2 * g2[i] + f_over_e2;
    }
    rs.t.push_back(t[j]);
    rs.eq[0].push_back(l2_norm(r1));
    rs.eq[1].push_back(l2_norm(r2));
  }
  for (const auto& e : rs.eq) rs.max.push_back(e.empty() ? 0.0 : *std::max_element(e.begin(), e.end()));
  return rs;
}

// Real hydrodynamic system for (A, u = grad^eps phi/(2c)):
//   A_t - A_x/eps^2 + div u/eps^2 + 2 u . grad A + A div u = 0
//   u_t - u_x/eps^2 + (1 + G(eps^2 A)) grad A/eps^2 + 2 (u . grad) u = grad(Lap A/(1 + eps^2 A))/(4c^2)
// with G(r) = f'((1+r)^2)(1+r)/c^2 - 1, the factor implied by the polar system.
inline ResidualSeries residual_euler1(const std::vector<ComplexField>& psi, const std::vector<double>& t, double eps,
                                      const NonlinearityModel& model) {
  detail::check_uniform_times(t, 5);
  const double h = t[1] - t[0], c = model.c(), e2 = eps * eps;
  const auto polar = detail::aligned_polar(psi, eps, t);
  const int n = psi[0].grid.dim;
  std::vector<std::vector<double>> A;
  std::vector<std::vector<std::vector<double>>> U(n);
  std::vector<std::vector<ScalarField>> vel;
  for (const auto& p : polar) {
    A.push_back(p.A.data);
    vel.push_back(velocity(p, c));
    for (int d = 0; d < n; ++d) U[d].push_back(vel.back()[d].data);
  }
  auto grad = [&](const ScalarField& f, int d) {
    return d == 0 ? derivative(f, Axis::x) : eps * derivative(f, Axis::perp);
  };
  ResidualSeries rs;
  rs.eq.resize(1 + n);
  for (std::size_t j = 2; j + 2 < polar.size(); ++j) {
    const auto& p = polar[j];
    const auto& u = vel[j];
    const auto At = detail::d4(A, j, h);
    std::vector<ScalarField> gA, du_dx;
    for (int d = 0; d < n; ++d) gA.push_back(grad(p.A, d));
    ScalarField div = grad(u[0], 0);
    if (n == 2) div += grad(u[1], 1);
    ScalarField q(p.A.grid);
    const ScalarField lapA = laplacian_eps(p.A, eps);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = lapA[i] / (1.0 + e2 * p.A[i]);
    ScalarField rA(p.A.grid);
    for (std::size_t i = 0; i < rA.size(); ++i) {
      double ugA = 0.0;
      for (int d = 0; d < n; ++d) ugA += u[d][i] * gA[d][i];
      rA[i] = At[i] - gA[0][i] / e2 + div[i] / e2 + 2.0 * ugA + p.A[i] * div[i];
    }
    rs.eq[0].push_back(l2_norm(rA));
    for (int d = 0; d < n; ++d) {
      const auto ut = detail::d4(U[d], j, h);
      const ScalarField gq = grad(q, d);
      std::vector<ScalarField> gu;
      for (int m = 0; m < n; ++m) gu.push_back(grad(u[d], m));
      ScalarField r(p.A.grid);
      for (std::size_t i = 0; i < r.size(); ++i) {
        double adv = 0.0;
        for (int m = 0; m < n; ++m) adv += u[m][i] * gu[m][i];
        const double G = model.g_real_amplitude(e2 * p.A[i]);
        r[i] = ut[i] - gu[0][i] / e2 + (1.0 + G) * gA[d][i] / e2 + 2.0 * adv - gq[i] / (4.0 * c * c);
      }
      rs.eq[1 + d].push_back(l2_norm(r));
    }
    rs.t.push_back(t[j]);
  }
  for (const auto& e : rs.eq) rs.max.push_back(e.empty() ? 0.0 : *std::max_element(e.begin(), e.end()));
  return rs;
}

}  // namespace nlskp
