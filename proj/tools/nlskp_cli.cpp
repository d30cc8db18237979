#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "nlskp/nlskp.hpp"

using namespace nlskp;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config;
  std::string out = "out";
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

RunConfig load(const Globals& g) {
  RunConfig c = g.config.empty() ? parse_config_string("") : load_config(g.config);
  if (g.seed) c.profile.seed = *g.seed;
  if (g.threads) c.sweep.threads = g.threads;
  return c;
}

fs::path out_dir(const Globals& g) {
  fs::create_directories(g.out);
  return g.out;
}

void both(const Table& t, const fs::path& dir, const std::string& stem) {
  export_table(t, dir / (stem + ".csv"), ExportFormat::csv);
  export_table(t, dir / (stem + ".dat"), ExportFormat::plotdata);
}

std::string snap_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "psi_%05zu.nlskp", i);
  return buf;
}

int simulate_nls_cmd(const Globals& gl) {
  const RunConfig cfg = load(gl);
  const double eps = cfg.run.eps;
  const NonlinearityModel model = cfg.model();
  const InitialData data = build_initial_data(cfg, eps);
  const PeriodicGrid& g = data.psi0.grid;
  const double dt = harness_dt(cfg, g, eps, model.c());
  NlsRunConfig nc{eps, cfg.run.T, dt, cfg.run.dt_max > 0.0 ? cfg.run.dt_max : default_dt_max(g, eps, model.c()),
                  cfg.run.output_interval, true};
  const fs::path dir = out_dir(gl), traj = dir / "traj";
  fs::create_directories(traj);
  Table times{{"index", "t", "file"}, {}};
  std::size_t n = 0;
  const auto tr = simulate_nls(nc, model, data.psi0, [&](const NlsState& s) {
    write_field(traj / snap_name(n), s.psi);
    times.add(std::vector<std::string>{std::to_string(n), fmt_num(s.t), snap_name(n)});
    ++n;
  });
  export_table(times, traj / "times.csv", ExportFormat::csv);
  both(nls_series_table(tr.series), dir, "nls_series");
  std::printf("simulate-nls: eps=%g dt=%g steps=%zu snapshots=%zu -> %s\n", eps, tr.dt_used, tr.steps, n,
              dir.string().c_str());
  return 0;
}

int simulate_limit_cmd(const Globals& gl, bool kp) {
  const RunConfig cfg = load(gl);
  if (kp != (cfg.grid.ny > 1))
    throw ConfigError(kp ? "simulate-kpi needs grid.ny > 1" : "simulate-kdv needs grid.ny = 1");
  const NonlinearityModel model = cfg.model();
  const InitialData data = build_initial_data(cfg, cfg.run.eps);
  const double dt = cfg.run.limit_dt > 0.0 ? cfg.run.limit_dt : cfg.run.dt;
  const auto tr = simulate_limit({cfg.run.T, dt, cfg.run.output_interval, true}, model.c(), model.k(), data.limit_v0);
  const fs::path dir = out_dir(gl);
  const std::string tag = kp ? "kpi" : "kdv";
  both(limit_series_table(tr.series), dir, tag + "_series");
  write_field(dir / (tag + "_v0.nlskp"), data.limit_v0);
  write_field(dir / (tag + "_final.nlskp"), tr.snapshots.back().v);
  export_field(tr.snapshots.back().v, dir / (tag + "_final.csv"), ExportFormat::csv);
  std::printf("simulate-%s: c=%g k=%g dt=%g outputs=%zu -> %s\n", tag.c_str(), model.c(), model.k(), tr.dt_used,
              tr.snapshots.size(), dir.string().c_str());
  return 0;
}

int sweep_cmd(const Globals& gl) {
  const RunConfig cfg = load(gl);
  const ConvergenceReport rep = run_convergence_sweep(cfg, gl.threads);
  const fs::path dir = out_dir(gl);
  write_report(rep, dir);
  std::cout << to_csv(summary_table(rep)) << to_csv(orders_table(rep));
  int failed = 0;
  for (const auto& b : rep.branches) failed += !b.ok();
  if (failed) std::fprintf(stderr, "sweep: %d branch(es) aborted, see summary.csv\n", failed);
  return 0;
}

int invariants_cmd(const Globals& gl, const std::string& in, std::optional<double> eps_opt) {
  const RunConfig cfg = load(gl);
  const double eps = eps_opt.value_or(cfg.run.eps);
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("--eps must lie in (0,1)");
  const ComplexField psi = read_complex_field(in);
  const InvariantReport r = evaluate_invariants(psi, eps, cfg.model());
  Table t{{"quantity", "value"}, {}};
  for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{
           {"E_eps", r.E_eps}, {"P_eps", r.P_eps}, {"E_minus_2cP", r.E_minus_2cP}, {"E_plus_2cP", r.E_plus_2cP},
           {"mass", r.mass}, {"I0", r.I0}, {"I1", r.I1}, {"residual_energy", r.residual_energy},
           {"residual_momentum", r.residual_momentum}, {"residual_energy_minus", r.residual_energy_minus}})
    t.add(std::vector<std::string>{k, fmt_num(v)});
  export_table(t, out_dir(gl) / "invariants.csv", ExportFormat::csv);
  std::cout << to_csv(t);
  return 0;
}

int transport_cmd(const Globals& gl, const std::string& eps_s, const std::string& R_s, double T, bool wrap) {
  const RunConfig cfg = load(gl);
  const std::vector<double> eps = detail::parse_list("--eps", eps_s);
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0 && eps[i] < 1.0) || (i && !(eps[i] < eps[i - 1])))
      throw ConfigError("--eps must be strictly decreasing values in (0,1)");
  const double R = detail::parse_length("--R", R_s);
  const PeriodicGrid g = cfg.grid.make();
  if (g.dim != 1) throw ConfigError("transport-probe needs a 1D grid");
  // u0 = d_x phi0 / (2c) of ill-prepared data with the configured phase_scale
  const ScalarField A0 = remove_line_means(profile_amplitude(cfg.profile, g));
  const ScalarField u0 = cfg.prep.phase_scale * A0;
  const WindowReport rep = window_norm_scaling(A0, u0, eps, T, R, wrap);
  Table t{{"eps", "T", "samples", "windowed", "bound", "ratio", "holds"}, {}};
  bool all = true;
  for (const auto& r : rep.rows) {
    t.add(std::vector<std::string>{fmt_num(r.eps), fmt_num(r.T), std::to_string(r.samples), fmt_num(r.windowed),
                                   fmt_num(r.bound), fmt_num(r.ratio), r.holds ? "1" : "0"});
    all = all && r.holds;
  }
  both(t, out_dir(gl), "transport");
  std::cout << to_csv(t);
  return all || wrap ? 0 : 1;
}

int hydro_cmd(const Globals& gl, const std::string& traj, std::optional<double> eps_opt) {
  const RunConfig cfg = load(gl);
  const double eps = eps_opt.value_or(cfg.run.eps);
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("--eps must lie in (0,1)");
  const fs::path dir(traj);
  std::ifstream in(dir / "times.csv");
  if (!in) throw IoError("cannot open " + (dir / "times.csv").string());
  std::string line;
  std::getline(in, line);
  std::vector<ComplexField> psi;
  std::vector<double> t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string idx, tv, file;
    std::getline(ss, idx, ',');
    std::getline(ss, tv, ',');
    std::getline(ss, file);
    t.push_back(std::stod(tv));
    psi.push_back(read_complex_field(dir / file));
  }
  const NonlinearityModel model = cfg.model();
  const ResidualSeries a = residual_phamd(psi, t, eps, model), b = residual_euler1(psi, t, eps, model);
  Table tab{{"t", "phamd_mass", "phamd_phase", "euler1_mass", "euler1_velocity"}, {}};
  for (std::size_t j = 0; j < a.t.size(); ++j)
    tab.add(std::vector<double>{a.t[j], a.eq[0][j], a.eq[1][j], b.eq[0][j], b.eq[1][j]});
  both(tab, out_dir(gl), "hydro_residual");
  std::printf("hydro-check: %zu snapshots, max residual phamd %.3e %.3e, euler1 %.3e %.3e\n", psi.size(), a.max[0],
              a.max[1], b.max[0], b.max[1]);
  return 0;
}

int soliton_cmd(const Globals& gl) {
  const RunConfig cfg = load(gl);
  const NonlinearityModel model = cfg.model();
  if (model.kind() != NonlinearityKind::gross_pitaevskii) throw ConfigError("soliton-check needs the gp model");
  const double eps = cfg.run.eps, T = cfg.run.T;
  const PeriodicGrid g = cfg.grid.make(eps);
  if (g.dim != 1) throw ConfigError("soliton-check needs a 1D grid");
  const double dt = harness_dt(cfg, g, eps, model.c());
  const auto nls = simulate_nls({eps, T, dt, cfg.run.dt_max, 0.0, true}, model, dark_soliton_scaled(g, eps, 0.0));
  const double e_nls = l2_norm(nls.snapshots.back().psi - dark_soliton_scaled(g, eps, T));
  const double dE = rel_drift(nls.series.back().E, nls.series.front().E);
  const KdvSoliton sol = kdv_soliton(1.0, model.c(), model.k());
  const double ldt = cfg.run.limit_dt > 0.0 ? cfg.run.limit_dt : cfg.run.dt;
  const auto lim = simulate_limit({T, ldt, 0.0, false}, model.c(), model.k(), sample_kdv_soliton(g, sol, 0.0));
  const double e_kdv = l2_norm(lim.snapshots.back().v - sample_kdv_soliton(g, sol, T));
  const bool ok = e_nls < 1e-4 && e_kdv < 1e-6;
  Table t{{"quantity", "value"}, {}};
  for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{
           {"eps", eps}, {"T", T}, {"dt", nls.dt_used}, {"nls_err_L2", e_nls}, {"nls_drift_E", dE},
           {"kdv_a", sol.a}, {"kdv_speed", sol.s}, {"kdv_err_L2", e_kdv}})
    t.add(std::vector<std::string>{k, fmt_num(v)});
  export_table(t, out_dir(gl) / "soliton_check.csv", ExportFormat::csv);
  std::printf("soliton-check: nls err %.3e (tol 1e-4), kdv err %.3e (tol 1e-6): %s\n", e_nls, e_kdv,
              ok ? "ok" : "FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlskp: NLS to KdV / KP-I long-wave limit experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals gl;
  app.add_option("--config", gl.config, "key = value config file")->option_text("PATH");
  app.add_option("--out", gl.out, "output directory")->capture_default_str();
  app.add_option("--threads", gl.threads, "worker threads for sweep branches");
  app.add_option("--seed", gl.seed, "overrides profile.seed");

  auto* nls = app.add_subcommand("simulate-nls", "scaled NLS run from the configured initial data");
  auto* kdv = app.add_subcommand("simulate-kdv", "KdV limit run (1D grid)");
  auto* kpi = app.add_subcommand("simulate-kpi", "KP-I limit run (2D grid)");
  auto* sweep = app.add_subcommand("sweep", "eps sweep pairing NLS with its limit equation");

  auto* inv = app.add_subcommand("invariants", "invariants of a stored wave function");
  std::string inv_in;
  std::optional<double> inv_eps;
  inv->add_option("--in", inv_in, "NLSKP1 field file")->required();
  inv->add_option("--eps", inv_eps, "defaults to run.eps");

  auto* tp = app.add_subcommand("transport-probe", "windowed norm of free transport against its bound");
  std::string tp_eps = "0.2,0.1,0.05", tp_R = "4pi";
  double tp_T = 0.0;
  bool tp_wrap = false;
  tp->add_option("--eps", tp_eps, "comma separated, strictly decreasing")->capture_default_str();
  tp->add_option("--R", tp_R, "window half width, 'pi' suffix allowed")->capture_default_str();
  tp->add_option("--T", tp_T, "horizon; 0 means one traversal")->capture_default_str();
  tp->add_flag("--allow-wrap", tp_wrap, "do not cap T at one traversal");

  auto* hc = app.add_subcommand("hydro-check", "hydrodynamic residuals along a stored trajectory");
  std::string hc_traj;
  std::optional<double> hc_eps;
  hc->add_option("--traj", hc_traj, "directory written by simulate-nls (traj/)")->required();
  hc->add_option("--eps", hc_eps, "defaults to run.eps");

  auto* sc = app.add_subcommand("soliton-check", "dark soliton and KdV soliton propagation errors");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*nls) return simulate_nls_cmd(gl);
    if (*kdv) return simulate_limit_cmd(gl, false);
    if (*kpi) return simulate_limit_cmd(gl, true);
    if (*sweep) return sweep_cmd(gl);
    if (*inv) return invariants_cmd(gl, inv_in, inv_eps);
    if (*tp) return transport_cmd(gl, tp_eps, tp_R, tp_T, tp_wrap);
    if (*hc) return hydro_cmd(gl, hc_traj, hc_eps);
    if (*sc) return soliton_cmd(gl);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
