#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "nlskp/invariants.hpp"

namespace nlskp {

struct NlsState {
  ComplexField psi;
  double t = 0.0;
  double eps = 0.1;
};

// Omega/(c eps^3) for icε³ψ_t − icεψ_x + (ε²/2)ψ_xx + (ε⁴/2)Δ⊥ψ = 0; modes evolve as exp(-i t rate)
inline double linear_rate(double kx, double ky, double eps, double c) {
  const double omega = -c * eps * kx + 0.5 * eps * eps * (kx * kx + eps * eps * ky * ky);
  return omega / (c * eps * eps * eps);
}

inline void linear_flow(ComplexField& psi, double dt, double eps, double c) {
  Spectrum s = fft(psi);
  for_each_mode(s.grid, [&](std::size_t idx, double kx, double ky, std::size_t, std::size_t) {
    s.coeffs[idx] *= std::polar(1.0, -dt * linear_rate(kx, ky, eps, c));
  });
  psi = ifft(s);
}

inline void nonlinear_flow(ComplexField& psi, double dt, double eps, const NonlinearityModel& model) {
  const double scale = dt / (model.c() * eps * eps * eps);
  for (auto& p : psi.data) p *= std::polar(1.0, -scale * model.f_dev(modulus_sq_minus_one(p)));
}

// Largest dt for which the split step linearized about |psi| = 1 is stable:
// theta_max + 2 atan(c dt / eps^3) <= pi, theta_max = max (kx^2 + eps^2 ky^2) dt / (2 c eps).
inline double stability_dt_limit(const PeriodicGrid& g, double eps, double c) {
  double kmax2 = 0.0;
  for_each_mode(g, [&](std::size_t, double kx, double ky, std::size_t, std::size_t) {
    kmax2 = std::max(kmax2, kx * kx + eps * eps * ky * ky);
  });
  const double a = kmax2 / (2.0 * c * eps);
  auto h = [&](double dt) { return a * dt + 2.0 * std::atan(c * dt / (eps * eps * eps)) - std::numbers::pi; };
  double lo = 0.0, hi = std::numbers::pi / a;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) <= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

inline double default_dt_max(const PeriodicGrid& g, double eps, double c) {
  return 0.9 * stability_dt_limit(g, eps, c);
}

// Strang splitting with precomputed linear factors; consecutive nonlinear
// half steps are merged, which is exact because |psi| is invariant under them.
class NlsStepper {
 public:
  NlsStepper(const PeriodicGrid& g, double eps, NonlinearityModel model, double dt, double dt_max = 0.0)
      : grid_(g), eps_(eps), model_(std::move(model)), dt_(dt), plan_(FftPlan::get(g)) {
    if (!(eps > 0.0 && eps < 1.0)) throw PreconditionViolation("nls: eps must lie in (0,1)");
    if (!(dt > 0.0)) throw PreconditionViolation("nls: dt must be positive");
    const double cap = dt_max > 0.0 ? dt_max : default_dt_max(g, eps, model_.c());
    if (dt > cap * (1.0 + 1e-12))
      throw PreconditionViolation("nls: dt = " + std::to_string(dt) + " exceeds dt_max = " +
                                  std::to_string(cap));
    factor_.resize(g.size());
    for_each_mode(g, [&](std::size_t idx, double kx, double ky, std::size_t, std::size_t) {
      factor_[idx] = std::polar(1.0, -dt * linear_rate(kx, ky, eps, model_.c()));
    });
  }

  double dt() const { return dt_; }
  double eps() const { return eps_; }
  const NonlinearityModel& model() const { return model_; }

  void step(NlsState& s) const { advance(s, 1); }

  void advance(NlsState& s, std::size_t nsteps) const {
    if (nsteps == 0) return;
    if (!(s.psi.grid == grid_)) throw PreconditionViolation("nls: state grid differs from stepper grid");
    const double t0 = s.t;
    kick(s.psi, 0.5 * dt_, t0);
    for (std::size_t n = 0; n < nsteps; ++n) {
      drift(s.psi);
      kick(s.psi, n + 1 == nsteps ? 0.5 * dt_ : dt_, t0 + double(n + 1) * dt_);
    }
    s.t = t0 + double(nsteps) * dt_;
  }

 private:
  void drift(ComplexField& psi) const {
    plan_->forward(psi.data.data());
    for (std::size_t i = 0; i < factor_.size(); ++i) psi.data[i] *= factor_[i];
    plan_->backward(psi.data.data());
  }

  void kick(ComplexField& psi, double h, double t) const {
    const double scale = h / (model_.c() * eps_ * eps_ * eps_);
    const double floor2 = vortex_floor * vortex_floor;
    for (auto& p : psi.data) {
      const double s = modulus_sq_minus_one(p);
      if (!std::isfinite(s)) throw NonFinite("nls: non-finite sample at t=" + std::to_string(t));
      if (!(1.0 + s > floor2)) throw VortexDetected(t, std::sqrt(std::max(0.0, 1.0 + s)));
      p *= std::polar(1.0, -scale * model_.f_dev(s));
    }
  }

  PeriodicGrid grid_;
  double eps_;
  NonlinearityModel model_;
  double dt_;
  std::shared_ptr<const FftPlan> plan_;
  std::vector<cplx> factor_;
};

inline NlsState strang_step(NlsState s, double dt, const NonlinearityModel& model, double dt_max = 0.0) {
  check_vortex_floor(s.psi, s.t);
  NlsStepper(s.psi.grid, s.eps, model, dt, dt_max).step(s);
  return s;
}

struct NlsRunConfig {
  double eps = 0.1;
  double T = 1.0;
  double dt = 1e-3;
  double dt_max = 0.0;           // 0: default_dt_max
  double output_interval = 0.0;  // 0: only the endpoints
  bool record_invariants = true;
};

struct NlsSample {
  double t;
  double E;
  double P;
  double mass;
};

struct NlsTrajectory {
  std::vector<NlsState> snapshots;
  std::vector<NlsSample> series;
  double dt_used = 0.0;
  std::size_t steps = 0;
};

// Equal output spacing that divides T, and a step no larger than dt that divides it.
struct TimeGrid {
  std::size_t outputs = 0;
  std::size_t steps_per_output = 0;
  double dt = 0.0;
};

inline TimeGrid make_time_grid(double T, double dt, double output_interval) {
  if (!(T >= 0.0)) throw PreconditionViolation("time horizon must be non-negative");
  if (T == 0.0) return {0, 0, dt};
  if (!(dt > 0.0)) throw PreconditionViolation("dt must be positive");
  const double out = output_interval > 0.0 ? output_interval : T;
  const double ratio = T / out;
  const auto n_out = std::size_t(std::llround(ratio));
  if (n_out == 0 || std::abs(ratio - double(n_out)) > 1e-9 * ratio)
    throw ConfigError("output interval must divide the time horizon");
  const auto m = std::size_t(std::ceil(out / dt - 1e-9));
  return {n_out, m, out / double(m)};
}

inline NlsTrajectory simulate_nls(const NlsRunConfig& cfg, const NonlinearityModel& model,
                                  const ComplexField& psi0,
                                  const std::function<void(const NlsState&)>& on_output = {}) {
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw PreconditionViolation("nls: eps must lie in (0,1)");
  check_vortex_floor(psi0, 0.0);
  NlsTrajectory traj;
  NlsState s{psi0, 0.0, cfg.eps};
  auto record = [&]() {
    traj.snapshots.push_back(s);
    if (cfg.record_invariants)
      traj.series.push_back({s.t, energy_scaled(s.psi, s.eps, model), momentum_scaled(s.psi, s.eps),
                             mass(s.psi)});
    if (on_output) on_output(s);
  };
  record();
  const TimeGrid tg = make_time_grid(cfg.T, cfg.dt, cfg.output_interval);
  traj.dt_used = tg.dt;
  if (tg.outputs == 0) return traj;
  const NlsStepper stepper(psi0.grid, cfg.eps, model, tg.dt, cfg.dt_max);
  for (std::size_t o = 1; o <= tg.outputs; ++o) {
    stepper.advance(s, tg.steps_per_output);
    s.t = cfg.T * double(o) / double(tg.outputs);
    traj.steps += tg.steps_per_output;
    record();
  }
  return traj;
}

// Travelling wave of i Psi_tau + Psi_zz/2 = Psi(|Psi|^2 - 1) moving at speed sigma.
inline cplx dark_soliton_gp(double sigma, double z) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw PreconditionViolation("dark soliton: sigma must lie in (0,1)");
  const double e = std::sqrt((1.0 - sigma) * (1.0 + sigma));
  return {sigma, -e * std::tanh(e * z)};
}

inline double soliton_sigma(double eps) { return std::sqrt((1.0 - eps) * (1.0 + eps)); }

// Galilean boost (scaled units) that cancels the soliton's far-field phase jump across L_x.
inline double soliton_boost(double eps, double Lx) { return 2.0 * eps * std::asin(eps) / Lx; }

// Exact GP dark soliton in scaled variables (c = 1, eps = sqrt(1 - sigma^2)),
// boosted so that it is periodic on the box; centred at x = 0 when t = 0.
inline ComplexField dark_soliton_scaled(const PeriodicGrid& g, double eps, double t, bool boosted = true) {
  const double sigma = soliton_sigma(eps);
  const double v = boosted ? soliton_boost(eps, g.L[0]) : 0.0;
  const double tau = t / (eps * eps * eps);
  const double one_minus_sigma = eps * eps / (1.0 + sigma);
  // centre of the dip in x
  const double xc = -eps * tau * (one_minus_sigma - v);
  ComplexField psi(g);
  for (std::size_t j = 0; j < g.n[1]; ++j)
    for (std::size_t i = 0; i < g.n[0]; ++i) {
      double x = g.coord(0, i);
      x -= g.L[0] * std::floor((x - xc) / g.L[0] + 0.5);
      const double z = x / eps + tau;
      const double arg = x / eps + tau * (one_minus_sigma - v);
      psi(i, j) = dark_soliton_gp(sigma, arg) * std::polar(1.0, v * z - 0.5 * v * v * tau);
    }
  return psi;
}

}  // namespace nlskp
