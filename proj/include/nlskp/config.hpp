#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "nlskp/grid.hpp"
#include "nlskp/nonlinearity.hpp"

namespace nlskp {

enum class Preparedness { well_prepared, slightly_prepared, ill_prepared };

struct ProfileSpec {
  std::string name = "sech2";  // sech2 | gaussian | random_band_limited | soliton
  double amplitude = -0.5;
  double width = 1.0;
  double y_width = 4.0;  // transverse envelope exp(-y^2 / y_width^2), 2D only
  int kmax = 4;          // random_band_limited: retained mode indices |m| <= kmax
  std::uint64_t seed = 1;
  std::optional<double> sigma;  // soliton: must equal sqrt(1 - eps^2) when given
};

struct PrepSpec {
  Preparedness mode = Preparedness::well_prepared;
  double theta = 1.0;        // slightly_prepared: deficit = theta * eps
  double phase_scale = 0.0;  // ill_prepared: phi0 = phase_scale * 2c d_x^{-1} A0
};

struct GridSpec {
  std::size_t nx = 1024;
  std::size_t ny = 1;  // 1 selects a 1D grid
  double lx = 32.0 * std::numbers::pi;
  double ly = 16.0 * std::numbers::pi;
  double resolution_coupling = 0.0;  // C > 0: nx = pow2 >= C/eps

  PeriodicGrid make(double eps = 0.0) const {
    std::size_t n = nx;
    if (resolution_coupling > 0.0 && eps > 0.0) {
      n = 8;
      while (double(n) < std::ceil(resolution_coupling / eps)) n *= 2;
      n = std::max(n, nx);
    }
    return ny <= 1 ? PeriodicGrid(n, lx) : PeriodicGrid(n, ny, lx, ly);
  }
};

struct RunSpec {
  double eps = 0.1;
  double T = 1.0;
  double dt = 1e-3;
  double dt_max = 0.0;           // 0: stability-derived default
  double dt_eps3_factor = 0.01;  // dt also capped at factor * c * eps^3; 0 disables
  double output_interval = 0.05;
  double limit_dt = 0.0;  // 0: same as dt
};

struct SweepSpec {
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  std::vector<double> hs_orders{0.5};
  unsigned threads = 1;
};

struct RunConfig {
  std::string nonlinearity = "gp";
  GridSpec grid;
  RunSpec run;
  ProfileSpec profile;
  PrepSpec prep;
  SweepSpec sweep;

  NonlinearityModel model() const { return NonlinearityModel::parse(nonlinearity); }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// number with an optional trailing "pi" factor: "32pi", "2.5 pi", "pi"
inline double parse_length(const std::string& key, std::string v) {
  v = trim(v);
  double factor = 1.0;
  if (v.size() >= 2 && v.compare(v.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    v = trim(v.substr(0, v.size() - 2));
    if (v.empty()) return factor;
  }
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x * factor;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_length(key, item));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(c.grid.nx >= 8 && (c.grid.nx & (c.grid.nx - 1)) == 0, "grid.nx must be a power of two >= 8");
  need(c.grid.ny == 1 || (c.grid.ny >= 8 && (c.grid.ny & (c.grid.ny - 1)) == 0),
       "grid.ny must be 1 or a power of two >= 8");
  need(c.grid.lx > 0.0 && c.grid.ly > 0.0, "grid lengths must be positive");
  need(c.run.eps > 0.0 && c.run.eps < 1.0, "run.eps must lie in (0,1)");
  need(c.run.T >= 0.0, "run.T must be non-negative");
  need(c.run.dt > 0.0, "run.dt must be positive");
  need(c.run.dt_max >= 0.0 && c.run.dt_eps3_factor >= 0.0 && c.run.limit_dt >= 0.0,
       "run.dt_max, run.dt_eps3_factor and run.limit_dt must be non-negative");
  need(c.run.output_interval >= 0.0, "run.output_interval must be non-negative");
  const auto& l = c.sweep.eps_list;
  need(!l.empty(), "sweep.eps_list must not be empty");
  for (std::size_t i = 0; i < l.size(); ++i) {
    need(l[i] > 0.0 && l[i] < 1.0, "sweep.eps_list entries must lie in (0,1)");
    need(i == 0 || l[i] < l[i - 1], "sweep.eps_list must be strictly decreasing");
  }
  need(c.sweep.threads >= 1, "sweep.threads must be >= 1");
  const auto& n = c.profile.name;
  need(n == "sech2" || n == "gaussian" || n == "random_band_limited" || n == "soliton",
       "profile.name must be sech2, gaussian, random_band_limited or soliton");
  need(c.profile.width > 0.0 && c.profile.y_width > 0.0, "profile widths must be positive");
  need(c.profile.kmax >= 1, "profile.kmax must be >= 1");
  if (c.profile.sigma) need(*c.profile.sigma > 0.0 && *c.profile.sigma < 1.0, "profile.sigma must lie in (0,1)");
  try {
    (void)c.model();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model.nonlinearity: ") + e.what());
  }
}

inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  static const std::vector<std::string> known = {
      "model.nonlinearity", "grid.nx", "grid.ny", "grid.lx", "grid.ly", "grid.resolution_coupling",
      "run.eps", "run.T", "run.dt", "run.dt_max", "run.dt_eps3_factor", "run.output_interval",
      "run.limit_dt", "profile.name", "profile.amplitude", "profile.width", "profile.y_width",
      "profile.kmax", "profile.seed", "profile.sigma", "prep.mode", "prep.theta", "prep.phase_scale",
      "sweep.eps_list", "sweep.hs_orders", "sweep.threads"};
  for (const auto& [sec, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + sec + "' outside a section");
    for (const auto& [key, val] : body) {
      const std::string full = sec + "." + key;
      if (std::find(known.begin(), known.end(), full) == known.end())
        throw ConfigError("config: unknown key '" + full + "'");
    }
  }
  auto str = [&](const std::string& k) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(k)) {
      std::string t = detail::trim(*v);
      if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front())
        t = detail::trim(t.substr(1, t.size() - 2));
      return t;
    }
    return std::nullopt;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (auto v = str(k)) dst = detail::parse_length(k, *v);
  };
  auto integer = [&](const std::string& k, auto& dst) {
    if (auto v = str(k)) {
      const double x = detail::parse_length(k, *v);
      if (x < 0.0 || x != std::floor(x)) throw ConfigError("config key '" + k + "': expected a non-negative integer");
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(x);
    }
  };
  if (auto v = str("model.nonlinearity")) c.nonlinearity = *v;
  integer("grid.nx", c.grid.nx);
  integer("grid.ny", c.grid.ny);
  num("grid.lx", c.grid.lx);
  num("grid.ly", c.grid.ly);
  num("grid.resolution_coupling", c.grid.resolution_coupling);
  num("run.eps", c.run.eps);
  num("run.T", c.run.T);
  num("run.dt", c.run.dt);
  num("run.dt_max", c.run.dt_max);
  num("run.dt_eps3_factor", c.run.dt_eps3_factor);
  num("run.output_interval", c.run.output_interval);
  num("run.limit_dt", c.run.limit_dt);
  if (auto v = str("profile.name")) c.profile.name = *v;
  num("profile.amplitude", c.profile.amplitude);
  num("profile.width", c.profile.width);
  num("profile.y_width", c.profile.y_width);
  integer("profile.kmax", c.profile.kmax);
  if (auto v = str("profile.seed")) {
    try {
      c.profile.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key 'profile.seed': expected an unsigned integer");
    }
  }
  if (auto v = str("profile.sigma")) c.profile.sigma = detail::parse_length("profile.sigma", *v);
  if (auto v = str("prep.mode")) {
    if (*v == "well_prepared") c.prep.mode = Preparedness::well_prepared;
    else if (*v == "slightly_prepared") c.prep.mode = Preparedness::slightly_prepared;
    else if (*v == "ill_prepared") c.prep.mode = Preparedness::ill_prepared;
    else throw ConfigError("prep.mode must be well_prepared, slightly_prepared or ill_prepared");
  }
  num("prep.theta", c.prep.theta);
  num("prep.phase_scale", c.prep.phase_scale);
  if (auto v = str("sweep.eps_list")) c.sweep.eps_list = detail::parse_list("sweep.eps_list", *v);
  if (auto v = str("sweep.hs_orders")) c.sweep.hs_orders = detail::parse_list("sweep.hs_orders", *v);
  integer("sweep.threads", c.sweep.threads);
  validate(c);
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_config(in);
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline const char* to_string(Preparedness p) {
  switch (p) {
    case Preparedness::well_prepared: return "well_prepared";
    case Preparedness::slightly_prepared: return "slightly_prepared";
    case Preparedness::ill_prepared: return "ill_prepared";
  }
  return "?";
}

}  // namespace nlskp
