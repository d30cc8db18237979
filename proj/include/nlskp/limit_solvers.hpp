#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "nlskp/invariants.hpp"
#include "nlskp/nls_solver.hpp"

namespace nlskp {

struct LimitState {
  ScalarField v;
  double t = 0.0;
  double c = 1.0;
  double k = 6.0;
};

// Linear symbol of v_t = v_xxx/(8c^2) - (1/2) d_x^{-1} Lap_perp v; zero on k_x = 0 in 2D.
inline cplx limit_symbol(double kx, double ky, double c, int dim) {
  if (dim == 1) return cplx(0.0, -kx * kx * kx / (8.0 * c * c));
  if (kx == 0.0) return 0.0;
  return cplx(0.0, -(kx * kx * kx / (8.0 * c * c) + ky * ky / (2.0 * kx)));
}

// Integrating-factor RK4 for KdV (1D grid) or KP-I (2D grid), nonlinearity
// -(k/4) d_x(v^2) dealiased at every stage.
class LimitStepper {
 public:
  LimitStepper(const PeriodicGrid& g, double c, double k, double dt)
      : grid_(g), c_(c), k_(k), dt_(dt), plan_(FftPlan::get(g)) {
    if (!(dt > 0.0)) throw PreconditionViolation("limit: dt must be positive");
    const std::size_t n = g.size();
    half_.resize(n);
    full_.resize(n);
    nl_.resize(n);
    keep_.resize(n);
    mask_.resize(n);
    for_each_mode(g, [&](std::size_t idx, double kx, double ky, std::size_t i, std::size_t j) {
      const bool drop = g.nyquist(0, i) || (g.dim == 2 && kx == 0.0);
      const cplx L = limit_symbol(kx, ky, c, g.dim);
      half_[idx] = drop ? 0.0 : std::exp(0.5 * dt * L);
      full_[idx] = drop ? 0.0 : std::exp(dt * L);
      keep_[idx] = drop ? 0.0 : 1.0;
      mask_[idx] = dealias_keep(g, i, j) && !drop ? 1.0 : 0.0;
      nl_[idx] = mask_[idx] * cplx(0.0, -0.25 * k * kx);
    });
  }

  double dt() const { return dt_; }

  void step(LimitState& s) const { advance(s, 1); }

  void advance(LimitState& s, std::size_t nsteps) const {
    if (!(s.v.grid == grid_)) throw PreconditionViolation("limit: state grid differs from stepper grid");
    if (grid_.dim == 2) check_zero_line_means(s.v, "kpi_step");
    if (nsteps == 0) return;
    const std::size_t n = grid_.size();
    std::vector<cplx> u(s.v.data.begin(), s.v.data.end());
    plan_->forward(u.data());
    for (std::size_t i = 0; i < n; ++i) u[i] *= keep_[i];
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), w(n);
    for (std::size_t step = 0; step < nsteps; ++step) {
      rhs(u, k1, s.t);
      for (std::size_t i = 0; i < n; ++i) w[i] = half_[i] * (u[i] + 0.5 * dt_ * k1[i]);
      rhs(w, k2, s.t);
      for (std::size_t i = 0; i < n; ++i) w[i] = half_[i] * u[i] + 0.5 * dt_ * k2[i];
      rhs(w, k3, s.t);
      for (std::size_t i = 0; i < n; ++i) w[i] = full_[i] * u[i] + dt_ * half_[i] * k3[i];
      rhs(w, k4, s.t);
      for (std::size_t i = 0; i < n; ++i)
        u[i] = full_[i] * u[i] +
               dt_ / 6.0 * (full_[i] * k1[i] + 2.0 * half_[i] * (k2[i] + k3[i]) + k4[i]);
      s.t += dt_;
    }
    plan_->backward(u.data());
    for (std::size_t i = 0; i < n; ++i) {
      s.v[i] = u[i].real();
      if (!std::isfinite(s.v[i])) throw NonFinite("limit: non-finite sample at t=" + std::to_string(s.t));
    }
  }

 private:
  // out = N(u) in Fourier space
  void rhs(const std::vector<cplx>& u, std::vector<cplx>& out, double t) const {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) out[i] = u[i] * mask_[i];
    plan_->backward(out.data());
    for (std::size_t i = 0; i < n; ++i) {
      const double v = out[i].real();
      if (!std::isfinite(v)) throw NonFinite("limit: non-finite sample at t=" + std::to_string(t));
      out[i] = v * v;
    }
    plan_->forward(out.data());
    for (std::size_t i = 0; i < n; ++i) out[i] *= nl_[i];
  }

  PeriodicGrid grid_;
  double c_, k_, dt_;
  std::shared_ptr<const FftPlan> plan_;
  std::vector<cplx> half_, full_, nl_, keep_;
  std::vector<double> mask_;
};

inline LimitState kdv_step(LimitState s, double dt) {
  if (s.v.grid.dim != 1) throw PreconditionViolation("kdv_step: 1D grid required");
  LimitStepper(s.v.grid, s.c, s.k, dt).step(s);
  return s;
}

inline LimitState kpi_step(LimitState s, double dt) {
  if (s.v.grid.dim != 2) throw PreconditionViolation("kpi_step: 2D grid required");
  LimitStepper(s.v.grid, s.c, s.k, dt).step(s);
  return s;
}

struct LimitRunConfig {
  double T = 1.0;
  double dt = 1e-3;
  double output_interval = 0.0;
  bool record_invariants = true;
};

struct LimitSample {
  double t;
  double I0;
  double I1;
};

struct LimitTrajectory {
  std::vector<LimitState> snapshots;
  std::vector<LimitSample> series;
  double dt_used = 0.0;
};

inline LimitTrajectory simulate_limit(const LimitRunConfig& cfg, double c, double k, const ScalarField& v0,
                                      const std::function<void(const LimitState&)>& on_output = {}) {
  LimitTrajectory traj;
  LimitState s{v0, 0.0, c, k};
  if (v0.grid.dim == 2) check_zero_line_means(v0, "simulate_limit");
  auto record = [&]() {
    traj.snapshots.push_back(s);
    if (cfg.record_invariants) {
      const auto inv = kdv_invariants(s.v, c, k);
      traj.series.push_back({s.t, inv.I0, inv.I1});
    }
    if (on_output) on_output(s);
  };
  record();
  const TimeGrid tg = make_time_grid(cfg.T, cfg.dt, cfg.output_interval);
  traj.dt_used = tg.dt;
  if (tg.outputs == 0) return traj;
  const LimitStepper stepper(v0.grid, c, k, tg.dt);
  for (std::size_t o = 1; o <= tg.outputs; ++o) {
    stepper.advance(s, tg.steps_per_output);
    s.t = cfg.T * double(o) / double(tg.outputs);
    record();
  }
  return traj;
}

// Exact solution of 2 v_t - v_xxx/(4c^2) = 0 (line by line in 2D).
inline ScalarField airy_exact(const ScalarField& v0, double t, double c) {
  Spectrum s = fft(v0);
  for_each_mode(s.grid, [&](std::size_t idx, double kx, double, std::size_t i, std::size_t) {
    if (s.grid.nyquist(0, i))
      s.coeffs[idx] = 0.0;
    else
      s.coeffs[idx] *= std::polar(1.0, -kx * kx * kx * t / (8.0 * c * c));
  });
  return ifft_real(s);
}

// v = a sech^2(b (x - s t)) solves 2 v_t + k v v_x - v_xxx/(4c^2) = 0
struct KdvSoliton {
  double a;
  double b;
  double s;
};

inline KdvSoliton kdv_soliton(double b, double c, double k) {
  if (k == 0.0) throw PreconditionViolation("kdv_soliton: no soliton when k = 0");
  return {-3.0 * b * b / (k * c * c), b, -b * b / (2.0 * c * c)};
}

inline ScalarField sample_kdv_soliton(const PeriodicGrid& g, const KdvSoliton& sol, double t, double x0 = 0.0) {
  const double centre = x0 + sol.s * t;
  return ScalarField::sample(g, [&](double x, double) {
    double y = x - centre;
    y -= g.L[0] * std::floor(y / g.L[0] + 0.5);
    const double ch = std::cosh(sol.b * y);
    return sol.a / (ch * ch);
  });
}

}  // namespace nlskp
