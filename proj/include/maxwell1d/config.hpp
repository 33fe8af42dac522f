#pragma once

// Flat key=value run configuration shared by the command-line tool.

#include <cmath>
#include <filesystem>
#include <map>
#include <string>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/solver.hpp"
#include "maxwell1d/spectral.hpp"

namespace maxwell1d {

struct RunConfig {
  double p = 0.7;
  double q = 0.3;
  Scheme scheme = Scheme::scaled;
  std::string init = "gaussian"; // gaussian | twopoint | steady | file:<path>
  double xi_max = 40.0;
  int n_points = 4097;
  SolverConfig solver;
  std::string out = "run";

  /// Mirrors the module preconditions so that nothing is computed on a bad config.
  void validate() const {
    const MixingParams mp(p, q);
    (void)FrequencyGrid(xi_max, n_points);
    solver.validate();
    if (init != "gaussian" && init != "twopoint" && init != "steady" &&
        init.rfind("file:", 0) != 0) {
      throw InvalidArgument("init must be gaussian, twopoint, steady or file:<path> (got '" +
                            init + "')");
    }
    if (scheme == Scheme::scaled) (void)SemiImplicitStepper(mp, solver.dt, solver.quad_nodes);
    if (out.empty()) throw InvalidArgument("output directory must not be empty");
  }
};

namespace detail {

inline double config_number(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v) throw InvalidArgument("config key '" + key + "' needs a number (got '" + value + "')");
  return *v;
}

inline int config_int(const std::string& key, const std::string& value) {
  const double v = config_number(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw InvalidArgument("config key '" + key + "' needs an integer (got '" + value + "')");
  }
  return static_cast<int>(v);
}

} // namespace detail

/// Applies key=value pairs on top of cfg. Unknown keys are rejected.
inline void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "p") cfg.p = detail::config_number(k, v);
    else if (k == "q") cfg.q = detail::config_number(k, v);
    else if (k == "scheme") {
      if (v == "scaled") cfg.scheme = Scheme::scaled;
      else if (v == "unscaled") cfg.scheme = Scheme::unscaled;
      else throw InvalidArgument("scheme must be scaled or unscaled (got '" + v + "')");
    }
    else if (k == "init") cfg.init = v;
    else if (k == "xi_max") cfg.xi_max = detail::config_number(k, v);
    else if (k == "n_points") cfg.n_points = detail::config_int(k, v);
    else if (k == "dt") cfg.solver.dt = detail::config_number(k, v);
    else if (k == "t_end") cfg.solver.t_end = detail::config_number(k, v);
    else if (k == "quad_nodes") cfg.solver.quad_nodes = detail::config_int(k, v);
    else if (k == "snapshot_every") cfg.solver.snapshot_every = detail::config_int(k, v);
    else if (k == "tail_tol") cfg.solver.tail_tol = detail::config_number(k, v);
    else if (k == "out") cfg.out = v;
    else throw InvalidArgument("unknown config key '" + k + "'");
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg;
  apply_config(cfg, read_key_values(path));
  return cfg;
}

/// Initial state named by cfg.init, tagged for cfg.scheme.
inline SpectralState make_initial(const RunConfig& cfg) {
  const MixingParams mp(cfg.p, cfg.q);
  const SpectralKind kind =
      cfg.scheme == Scheme::scaled ? SpectralKind::scaled : SpectralKind::unscaled;
  if (cfg.init.rfind("file:", 0) == 0) {
    const SpectralState s = load(cfg.init.substr(5));
    return s.with_meta(mp, s.time(), kind);
  }
  const FrequencyGrid grid(cfg.xi_max, cfg.n_points);
  if (cfg.init == "gaussian") return make_gaussian(grid, mp, kind);
  if (cfg.init == "twopoint") return make_two_point(grid, mp, kind);
  if (cfg.init == "steady") return make_explicit_steady(grid, mp, kind);
  throw InvalidArgument("unknown init '" + cfg.init + "'");
}

} // namespace maxwell1d
