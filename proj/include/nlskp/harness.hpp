#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nlskp/config.hpp"
#include "nlskp/field_io.hpp"
#include "nlskp/invariants.hpp"
#include "nlskp/limit_solvers.hpp"
#include "nlskp/nls_solver.hpp"

namespace nlskp {

// ---- tables ----

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// short form for names and labels
inline std::string fmt_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw PreconditionViolation("table: row width differs from header");
    rows.push_back(std::move(row));
  }
  void add(const std::vector<double>& row) {
    std::vector<std::string> r;
    for (double v : row) r.push_back(fmt_num(v));
    add(std::move(r));
  }
};

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_cell(t.columns[i]);
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
    os << '\n';
  }
  return os.str();
}

// whitespace-separated columns, '#' header; text cells have blanks replaced by '_'
inline std::string to_plotdata(const Table& t) {
  auto clean = [](std::string s) {
    for (char& ch : s)
      if (ch == ' ' || ch == '\t' || ch == '\n') ch = '_';
    return s.empty() ? std::string("-") : s;
  };
  std::ostringstream os;
  os << '#';
  for (const auto& c : t.columns) os << ' ' << clean(c);
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << clean(r[i]);
    os << '\n';
  }
  return os.str();
}

enum class ExportFormat { csv, plotdata, nlskp1 };

inline void export_table(const Table& t, const std::filesystem::path& path, ExportFormat fmt) {
  switch (fmt) {
    case ExportFormat::csv: atomic_write(path, to_csv(t)); return;
    case ExportFormat::plotdata: atomic_write(path, to_plotdata(t)); return;
    case ExportFormat::nlskp1: throw FormatError("NLSKP1 holds fields, not tables: " + path.string());
  }
}

template <class T>
void export_field(const Field<T>& f, const std::filesystem::path& path, ExportFormat fmt) {
  if (fmt == ExportFormat::nlskp1) {
    write_field(path, f);
    return;
  }
  Table t;
  t.columns = f.grid.dim == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
  if constexpr (std::is_same_v<T, cplx>) {
    t.columns.push_back("re");
    t.columns.push_back("im");
  } else {
    t.columns.push_back("value");
  }
  for (std::size_t j = 0; j < f.grid.n[1]; ++j)
    for (std::size_t i = 0; i < f.grid.n[0]; ++i) {
      std::vector<double> r{f.grid.coord(0, i)};
      if (f.grid.dim == 2) r.push_back(f.grid.coord(1, j));
      if constexpr (std::is_same_v<T, cplx>) {
        r.push_back(f(i, j).real());
        r.push_back(f(i, j).imag());
      } else {
        r.push_back(f(i, j));
      }
      t.add(r);
    }
  export_table(t, path, fmt);
}

inline Table nls_series_table(const std::vector<NlsSample>& s) {
  Table t{{"t", "E_eps", "P_eps", "mass"}, {}};
  for (const auto& r : s) t.add(std::vector<double>{r.t, r.E, r.P, r.mass});
  return t;
}

inline Table limit_series_table(const std::vector<LimitSample>& s) {
  Table t{{"t", "I0", "I1"}, {}};
  for (const auto& r : s) t.add(std::vector<double>{r.t, r.I0, r.I1});
  return t;
}

// ---- initial data ----

inline ScalarField profile_amplitude(const ProfileSpec& p, const PeriodicGrid& g) {
  auto envelope = [&](double y) { return g.dim == 2 ? std::exp(-y * y / (p.y_width * p.y_width)) : 1.0; };
  if (p.name == "sech2")
    return ScalarField::sample(g, [&](double x, double y) {
      const double ch = std::cosh(x / p.width);
      return p.amplitude / (ch * ch) * envelope(y);
    });
  if (p.name == "gaussian")
    return ScalarField::sample(g, [&](double x, double y) {
      return p.amplitude * std::exp(-x * x / (p.width * p.width)) * envelope(y);
    });
  if (p.name == "random_band_limited") {
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Spectrum s{g, std::vector<cplx>(g.size(), 0.0)};
    const long K = p.kmax;
    const long ky_max = g.dim == 2 ? K : 0;
    for (long my = -ky_max; my <= ky_max; ++my)
      for (long mx = -K; mx <= K; ++mx) {
        const double re = normal(rng), im = normal(rng);
        if (mx == 0 && my == 0) continue;
        if (std::abs(mx) * 2 >= long(g.n[0]) || (g.dim == 2 && std::abs(my) * 2 >= long(g.n[1])))
          throw ConfigError("profile.kmax exceeds the grid's resolved modes");
        const std::size_t i = std::size_t((mx + long(g.n[0])) % long(g.n[0]));
        const std::size_t j = g.dim == 2 ? std::size_t((my + long(g.n[1])) % long(g.n[1])) : 0;
        s.coeffs[g.index(i, j)] += cplx(re, im);
        const std::size_t ic = std::size_t((-mx + long(g.n[0])) % long(g.n[0]));
        const std::size_t jc = g.dim == 2 ? std::size_t((-my + long(g.n[1])) % long(g.n[1])) : 0;
        s.coeffs[g.index(ic, jc)] += cplx(re, -im);
      }
    ScalarField f = ifft_real(s);
    const double m = linf_norm(f);
    if (m > 0.0) f *= std::abs(p.amplitude) / m;
    return f;
  }
  throw ConfigError("profile '" + p.name + "' has no amplitude form");
}

struct InitialData {
  ComplexField psi0;
  PolarState polar0;
  ScalarField limit_v0;
  std::vector<double> removed_line_means;
  double delta = 0.0;  // ||d_x phi0 - 2c A0||
  double M = 0.0;      // ||A0||_{H^1} + delta / eps
};

inline InitialData build_initial_data(const RunConfig& cfg, double eps) {
  const NonlinearityModel model = cfg.model();
  const double c = model.c();
  const PeriodicGrid g = cfg.grid.make(eps);
  if (cfg.profile.name == "soliton") {
    if (cfg.nonlinearity != "gp") throw ConfigError("profile soliton requires model.nonlinearity = gp");
    if (cfg.profile.sigma && std::abs(*cfg.profile.sigma - soliton_sigma(eps)) > 1e-12)
      throw ConfigError("profile.sigma must equal sqrt(1 - eps^2) for the simulated eps");
    ComplexField psi = dark_soliton_scaled(g, eps, 0.0);
    PolarState p = polar_decompose(psi, eps);
    const double d = constraint_deficit(p, c).raw;
    InitialData out{psi, p, p.A, {}, d, hs_norm(p.A, 1.0) + d / eps};
    if (g.dim == 2) {
      out.removed_line_means = line_means(p.A);
      out.limit_v0 = remove_line_means(p.A);
    }
    return out;
  }
  ScalarField A0 = profile_amplitude(cfg.profile, g);
  const auto means = line_means(A0);
  A0 = remove_line_means(A0);
  {
    Spectrum s = fft(A0);
    for_each_mode(g, [&](std::size_t idx, double, double, std::size_t i, std::size_t) {
      if (g.nyquist(0, i)) s.coeffs[idx] = 0.0;
    });
    A0 = ifft_real(s);
  }
  if (!(eps * eps * linf_norm(A0) < 0.5)) throw AmplitudeBound("initial data: eps^2 ||A0||_inf >= 1/2");
  const ScalarField base = x_antiderivative(A0);
  ScalarField phi0(g);
  switch (cfg.prep.mode) {
    case Preparedness::well_prepared: phi0 = (2.0 * c) * base; break;
    case Preparedness::slightly_prepared: {
      const double n = l2_norm(A0);
      if (!(n > 0.0)) throw ConfigError("slightly_prepared needs a non-zero profile");
      phi0 = (2.0 * c) * base + (cfg.prep.theta * eps / n) * base;
      break;
    }
    case Preparedness::ill_prepared: phi0 = (cfg.prep.phase_scale * 2.0 * c) * base; break;
  }
  PolarState p{A0, phi0, eps};
  ComplexField psi = reconstruct(p);
  ScalarField lim = A0;
  if (cfg.prep.mode != Preparedness::well_prepared) {
    const ScalarField phx = derivative(phi0, Axis::x);
    for (std::size_t i = 0; i < lim.size(); ++i) lim[i] = 0.5 * (A0[i] + phx[i] / (2.0 * c));
  }
  const double d = constraint_deficit(p, c).raw;
  return {psi, p, lim, means, d, hs_norm(A0, 1.0) + d / eps};
}

// dt used for the NLS branch at this eps
inline double harness_dt(const RunConfig& cfg, const PeriodicGrid& g, double eps, double c) {
  const double cap = cfg.run.dt_max > 0.0 ? cfg.run.dt_max : default_dt_max(g, eps, c);
  double dt = std::min(cfg.run.dt, cap);
  if (cfg.run.dt_eps3_factor > 0.0) dt = std::min(dt, cfg.run.dt_eps3_factor * c * eps * eps * eps);
  return dt;
}

// ---- sweep ----

struct SeriesRow {
  double t = 0.0;
  double err_L2 = 0.0;
  std::vector<double> err_Hs;
  double deficit = 0.0;
  double half_sum = 0.0;
  double grad_perp = 0.0;
  double modulus = 0.0;  // || |psi|^2 - 1 ||_inf / eps^2
  double nu_term = 0.0;
  double E = 0.0, P = 0.0, mass = 0.0;
  double I0 = 0.0, I1 = 0.0;
};

struct BranchReport {
  double eps = 0.0;
  std::size_t nx = 0, ny = 1;
  double dt = 0.0, limit_dt = 0.0;
  std::string status = "ok";
  double M = 0.0, delta = 0.0;
  double max_removed_mean = 0.0;
  std::vector<SeriesRow> rows;
  double sup_err_L2 = 0.0;
  std::vector<double> sup_err_Hs;
  double sup_deficit = 0.0, sup_deficit_over_eps = 0.0, sup_half_sum = 0.0, sup_grad_perp = 0.0;
  double nu = 0.0, sup_modulus = 0.0;
  double drift_E = 0.0, drift_P = 0.0, drift_I0 = 0.0, drift_I1 = 0.0;
  bool ok() const { return status == "ok"; }
};

struct OrderEstimate {
  std::string quantity;
  double eps_a, eps_b;
  double order;
};

struct ConvergenceReport {
  std::vector<double> hs_orders;
  std::vector<BranchReport> branches;
  std::vector<OrderEstimate> orders;
};

inline double rel_drift(double v, double v0) {
  return std::abs(v0) > 0.0 ? std::abs(v - v0) / std::abs(v0) : std::abs(v - v0);
}

inline BranchReport run_branch(const RunConfig& cfg, double eps) {
  BranchReport br;
  br.eps = eps;
  br.sup_err_Hs.assign(cfg.sweep.hs_orders.size(), 0.0);
  try {
    const NonlinearityModel model = cfg.model();
    const double c = model.c(), k = model.k();
    const InitialData data = build_initial_data(cfg, eps);
    const PeriodicGrid& g = data.psi0.grid;
    br.nx = g.n[0];
    br.ny = g.n[1];
    br.M = data.M;
    br.delta = data.delta;
    for (double m : data.removed_line_means) br.max_removed_mean = std::max(br.max_removed_mean, std::abs(m));
    br.dt = harness_dt(cfg, g, eps, c);
    br.limit_dt = cfg.run.limit_dt > 0.0 ? cfg.run.limit_dt : cfg.run.dt;

    LimitRunConfig lc{cfg.run.T, br.limit_dt, cfg.run.output_interval, true};
    const LimitTrajectory lim = simulate_limit(lc, c, k, data.limit_v0);

    NlsRunConfig nc{eps, cfg.run.T, br.dt, cfg.run.dt_max > 0.0 ? cfg.run.dt_max : 0.0,
                    cfg.run.output_interval, false};
    if (nc.dt_max == 0.0) nc.dt_max = default_dt_max(g, eps, c);
    std::size_t idx = 0;
    auto on_output = [&](const NlsState& s) {
      const PolarState p = polar_decompose(s.psi, eps, s.t);
      const ScalarField& A = lim.snapshots.at(idx).v;
      SeriesRow r;
      r.t = s.t;
      const ScalarField diff = p.A - A;
      r.err_L2 = l2_norm(diff);
      for (double so : cfg.sweep.hs_orders) r.err_Hs.push_back(hs_norm(diff, so));
      const ScalarField phx = phase_derivative(p.phi, eps, Axis::x);
      ScalarField hs(g);
      for (std::size_t i = 0; i < hs.size(); ++i) hs[i] = 0.5 * (p.A[i] + phx[i] / (2.0 * c)) - A[i];
      r.half_sum = l2_norm(hs);
      r.deficit = constraint_deficit(p, c).raw;
      if (g.dim == 2) r.grad_perp = l2_norm(phase_derivative(p.phi, eps, Axis::perp));
      double m = 0.0;
      for (const cplx& v : s.psi.data) m = std::max(m, std::abs(modulus_sq_minus_one(v)));
      r.modulus = m / (eps * eps);
      r.nu_term = nu_term(p, A, c);
      r.E = energy_scaled(s.psi, eps, model);
      r.P = momentum_scaled(s.psi, eps);
      r.mass = nlskp::mass(s.psi);
      r.I0 = lim.series.at(idx).I0;
      r.I1 = lim.series.at(idx).I1;
      br.rows.push_back(std::move(r));
      ++idx;
    };
    simulate_nls(nc, model, data.psi0, on_output);
    const SeriesRow& r0 = br.rows.front();
    for (const auto& r : br.rows) {
      br.sup_err_L2 = std::max(br.sup_err_L2, r.err_L2);
      for (std::size_t q = 0; q < r.err_Hs.size(); ++q) br.sup_err_Hs[q] = std::max(br.sup_err_Hs[q], r.err_Hs[q]);
      br.sup_deficit = std::max(br.sup_deficit, r.deficit);
      br.sup_half_sum = std::max(br.sup_half_sum, r.half_sum);
      br.sup_grad_perp = std::max(br.sup_grad_perp, r.grad_perp);
      br.nu = std::max(br.nu, r.nu_term);
      br.sup_modulus = std::max(br.sup_modulus, r.modulus);
      br.drift_E = std::max(br.drift_E, rel_drift(r.E, r0.E));
      br.drift_P = std::max(br.drift_P, rel_drift(r.P, r0.P));
      br.drift_I0 = std::max(br.drift_I0, rel_drift(r.I0, r0.I0));
      br.drift_I1 = std::max(br.drift_I1, rel_drift(r.I1, r0.I1));
    }
    br.sup_deficit_over_eps = br.sup_deficit / eps;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    br.status = e.what();
  }
  return br;
}

inline ConvergenceReport run_convergence_sweep(const RunConfig& cfg, unsigned threads = 0) {
  validate(cfg);
  const auto& eps = cfg.sweep.eps_list;
  ConvergenceReport rep;
  rep.hs_orders = cfg.sweep.hs_orders;
  rep.branches.resize(eps.size());
  const unsigned nt = std::max(1u, std::min<unsigned>(threads ? threads : cfg.sweep.threads, unsigned(eps.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(nt);
  auto worker = [&](unsigned w) {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < eps.size();) rep.branches[i] = run_branch(cfg, eps[i]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (nt == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  auto add_orders = [&](const std::string& name, auto get) {
    for (std::size_t i = 0; i + 1 < rep.branches.size(); ++i) {
      const auto &a = rep.branches[i], &b = rep.branches[i + 1];
      if (!a.ok() || !b.ok()) continue;
      const double va = get(a), vb = get(b);
      if (!(va > 0.0 && vb > 0.0)) continue;
      rep.orders.push_back({name, a.eps, b.eps, std::log(va / vb) / std::log(a.eps / b.eps)});
    }
  };
  add_orders("sup_err_L2", [](const BranchReport& b) { return b.sup_err_L2; });
  for (std::size_t q = 0; q < rep.hs_orders.size(); ++q)
    add_orders("sup_err_H" + fmt_label(rep.hs_orders[q]), [q](const BranchReport& b) { return b.sup_err_Hs[q]; });
  add_orders("sup_deficit", [](const BranchReport& b) { return b.sup_deficit; });
  add_orders("sup_half_sum", [](const BranchReport& b) { return b.sup_half_sum; });
  add_orders("nu", [](const BranchReport& b) { return b.nu; });
  return rep;
}

inline Table summary_table(const ConvergenceReport& rep) {
  Table t;
  t.columns = {"eps", "nx", "ny", "dt", "limit_dt", "status", "M", "delta", "max_removed_mean", "sup_err_L2"};
  for (double s : rep.hs_orders) t.columns.push_back("sup_err_H" + fmt_label(s));
  for (const char* c : {"sup_deficit", "sup_deficit_over_eps", "sup_half_sum", "sup_grad_perp", "nu",
                        "sup_modulus", "drift_E", "drift_P", "drift_I0", "drift_I1"})
    t.columns.push_back(c);
  for (const auto& b : rep.branches) {
    std::vector<std::string> r{fmt_num(b.eps), std::to_string(b.nx), std::to_string(b.ny), fmt_num(b.dt),
                               fmt_num(b.limit_dt), b.status, fmt_num(b.M), fmt_num(b.delta),
                               fmt_num(b.max_removed_mean), fmt_num(b.sup_err_L2)};
    for (double v : b.sup_err_Hs) r.push_back(fmt_num(v));
    for (double v : {b.sup_deficit, b.sup_deficit_over_eps, b.sup_half_sum, b.sup_grad_perp, b.nu, b.sup_modulus,
                     b.drift_E, b.drift_P, b.drift_I0, b.drift_I1})
      r.push_back(fmt_num(v));
    t.add(std::move(r));
  }
  return t;
}

inline Table orders_table(const ConvergenceReport& rep) {
  Table t{{"quantity", "eps_a", "eps_b", "order"}, {}};
  for (const auto& o : rep.orders) t.add({o.quantity, fmt_num(o.eps_a), fmt_num(o.eps_b), fmt_num(o.order)});
  return t;
}

inline Table series_table(const BranchReport& b, const std::vector<double>& hs_orders) {
  Table t;
  t.columns = {"t", "err_L2"};
  for (double s : hs_orders) t.columns.push_back("err_H" + fmt_label(s));
  for (const char* c : {"deficit", "half_sum", "grad_perp", "modulus", "nu_term", "E_eps", "P_eps", "mass", "I0", "I1"})
    t.columns.push_back(c);
  for (const auto& r : b.rows) {
    std::vector<double> v{r.t, r.err_L2};
    v.insert(v.end(), r.err_Hs.begin(), r.err_Hs.end());
    for (double x : {r.deficit, r.half_sum, r.grad_perp, r.modulus, r.nu_term, r.E, r.P, r.mass, r.I0, r.I1})
      v.push_back(x);
    t.add(v);
  }
  return t;
}

inline void write_report(const ConvergenceReport& rep, const std::filesystem::path& dir) {
  export_table(summary_table(rep), dir / "summary.csv", ExportFormat::csv);
  export_table(orders_table(rep), dir / "orders.csv", ExportFormat::csv);
  for (const auto& b : rep.branches) {
    const std::string stem = "series_eps_" + fmt_label(b.eps);
    const Table t = series_table(b, rep.hs_orders);
    export_table(t, dir / (stem + ".csv"), ExportFormat::csv);
    export_table(t, dir / (stem + ".dat"), ExportFormat::plotdata);
  }
}

}  // namespace nlskp
