#pragma once

// Command-line front end: classify, evolve, steady, metrics, lyapunov, sweep.
// Exit codes: 0 success, 1 usage/validation, 2 numerical failure, 3 I/O.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "maxwell1d/config.hpp"
#include "maxwell1d/maxwell1d.hpp"
#include "maxwell1d/svg.hpp"

namespace maxwell1d::app {

namespace fs = std::filesystem;

inline int exit_code(ErrorCategory c) {
  switch (c) {
  case ErrorCategory::usage: return 1;
  case ErrorCategory::numerical: return 2;
  case ErrorCategory::io: return 3;
  }
  return 2;
}

inline std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

inline ParamRange parse_range(const std::string& s) {
  const auto colon = s.find(':');
  const auto lo = detail::parse_double(s.substr(0, colon));
  const auto hi = colon == std::string::npos ? lo : detail::parse_double(s.substr(colon + 1));
  if (!lo || !hi) throw InvalidArgument("range must be lo:hi (got '" + s + "')");
  return {*lo, *hi};
}

struct EvolveOptions {
  std::string config;
  std::optional<double> p, q, xi_max, dt, t_end, tail_tol;
  std::optional<int> n_points, quad_nodes, snapshot_every;
  std::optional<std::string> scheme, init, out;
};

inline RunConfig resolve(const EvolveOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  std::map<std::string, std::string> kv;
  auto put = [&](const char* k, const auto& v) {
    if (!v) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) kv[k] = *v;
    else if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, int>) kv[k] = std::to_string(*v);
    else kv[k] = detail::fmt17(*v);
  };
  put("p", o.p);
  put("q", o.q);
  put("xi_max", o.xi_max);
  put("dt", o.dt);
  put("t_end", o.t_end);
  put("tail_tol", o.tail_tol);
  put("n_points", o.n_points);
  put("quad_nodes", o.quad_nodes);
  put("snapshot_every", o.snapshot_every);
  put("scheme", o.scheme);
  put("init", o.init);
  put("out", o.out);
  apply_config(cfg, kv);
  cfg.validate();
  return cfg;
}

inline void cmd_classify(double p, double q, std::ostream& out) {
  const auto r = classify(MixingParams(p, q));
  out << "p=" << detail::fmt17(p) << "\nq=" << detail::fmt17(q)
      << "\nregime=" << to_string(r.regime) << "\nr=" << detail::fmt17(r.r)
      << "\nlambda=" << detail::fmt17(r.lambda) << "\ndelta_tilde=" << detail::fmt17(r.delta_tilde)
      << "\nadmissible=" << (r.admissible ? "true" : "false") << '\n';
}

inline void cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  const SpectralState init = make_initial(cfg);
  const auto traj = evolve(init, MixingParams(cfg.p, cfg.q), cfg.solver, cfg.scheme, cfg.init);
  save_trajectory(traj, cfg.out);

  svg::Series s{"max |g|", {}, {}};
  for (const auto& d : traj.diagnostics) {
    s.x.push_back(d.t);
    s.y.push_back(d.max_modulus);
  }
  auto os = open_out(fs::path(cfg.out) / "diagnostics.svg");
  svg::line_chart(os, {s}, {"max modulus", "t", "max |g|", false});
  out << "wrote " << traj.snapshots.size() << " snapshots to " << cfg.out << '\n';
}

struct SteadyOptions {
  double p = 0.7, q = 0.3, delta = 0.5, tol = 1e-8, xi_max = 40.0;
  int n_points = 4097, max_iter = 1000, quad_nodes = 64;
  std::string out = "steady";
};

inline void cmd_steady(const SteadyOptions& o, std::ostream& out) {
  const MixingParams mp(o.p, o.q);
  const FrequencyGrid grid(o.xi_max, o.n_points);
  const auto res = fixed_point_steady(mp, grid, o.delta, o.tol, o.max_iter, o.quad_nodes);
  const fs::path dir(o.out);
  save(res.state, (dir / "state.csv").string());
  {
    auto os = open_out(dir / "sweep_log.csv");
    write_sweep_log_csv(os, res.log);
  }
  svg::Series s{"d_{2+delta}", {}, {}};
  for (const auto& r : res.log) {
    s.x.push_back(r.sweep);
    s.y.push_back(r.d_distance);
  }
  auto os = open_out(dir / "sweep_log.svg");
  svg::line_chart(os, {s}, {"fixed-point sweeps", "sweep", "successive distance", true});

  out << "sweeps=" << res.log.size() << "\nlast_distance=" << detail::fmt17(res.log.back().d_distance)
      << '\n';
  if (std::abs(o.p + o.q - 1.0) <= 1e-12) {
    const auto ref = make_explicit_steady(grid, mp);
    out << "explicit_d=" << detail::fmt17(fourier_distance(res.state, ref, 2.0 + o.delta))
        << "\nexplicit_sup=" << detail::fmt17(sup_distance(res.state, ref)) << '\n';
  }
}

struct MetricsOptions {
  std::string run;
  std::string reference = "explicit";
  double alpha = 2.5, eta = 1.0, v_max = 20.0;
  int n_v = 4097;
  std::string out;
};

inline void cmd_metrics(const MetricsOptions& o, std::ostream& out) {
  const Trajectory traj = load_trajectory(o.run);
  const SpectralState ref = o.reference == "explicit"
                                ? make_explicit_steady(traj.snapshots.front().grid())
                                : load(o.reference);
  std::vector<MetricRow> rows;
  for (const auto& s : traj.snapshots) {
    rows.push_back({s.time(), fourier_distance(s, ref, o.alpha), sup_distance(s, ref),
                    l1_distance(s, ref, o.v_max, o.n_v), sobolev_norm(s, o.eta)});
  }
  const fs::path dir = o.out.empty() ? fs::path(o.run) : fs::path(o.out);
  {
    auto os = open_out(dir / "metrics.csv");
    write_metrics_csv(os, rows);
  }
  svg::Series d{"d_alpha", {}, {}}, sup{"sup", {}, {}}, l1{"L1", {}, {}};
  for (const auto& r : rows) {
    for (auto* s : {&d, &sup, &l1}) s->x.push_back(r.t);
    d.y.push_back(r.d_alpha);
    sup.y.push_back(r.sup);
    l1.y.push_back(r.l1);
  }
  auto os = open_out(dir / "metrics.svg");
  svg::line_chart(os, {d, sup, l1}, {"distance to reference", "t", "distance", true});

  const double sd = s_function(traj.manifest.params, o.alpha - 2.0);
  if (rows.size() >= 5 && sd < 0.0 && rows.back().d_alpha > 0.0) {
    try {
      const auto f = decay_rate_fit(traj, ref, o.alpha, traj.t_first(), traj.t_last());
      out << "decay_rate=" << detail::fmt17(f.rate) << "\nbound_rate=" << detail::fmt17(-sd)
          << "\nbound_ok=" << (f.bound_ok ? "true" : "false") << '\n';
    } catch (const DegenerateFit& e) {
      out << "decay fit skipped: " << e.what() << '\n';
    }
  }
  out << "wrote " << rows.size() << " rows to " << (dir / "metrics.csv").string() << '\n';
}

struct LyapunovOptions {
  std::string run, input;
  bool corpus = false;
  double p = 0.7, q = 0.3, v_max = 60.0, xi_max = 40.0;
  int n_v = 8193, n_points = 8193;
  std::string out = "lyapunov.csv";
};

inline void cmd_lyapunov(const LyapunovOptions& o, std::ostream& out) {
  const int sources = !o.run.empty() + !o.input.empty() + o.corpus;
  if (sources != 1) throw InvalidArgument("give exactly one of --run, --input, --corpus");
  std::vector<std::pair<std::string, SpectralState>> samples;
  std::optional<MixingParams> mp;
  if (!o.run.empty()) {
    const Trajectory traj = load_trajectory(o.run);
    mp = traj.manifest.params;
    detail::require_unit_line(*mp);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      samples.emplace_back(snapshot_name(i).substr(0, 8), traj.snapshots[i]);
    }
  } else {
    mp = MixingParams(o.p, o.q);
    detail::require_unit_line(*mp);
    if (!o.input.empty()) {
      samples.emplace_back(fs::path(o.input).stem().string(), load(o.input));
    } else {
      for (auto& c : builtin_corpus(FrequencyGrid(o.xi_max, o.n_points))) {
        samples.emplace_back(c.id, c.state);
      }
    }
  }
  std::vector<LyapunovRow> rows;
  for (const auto& [id, s] : samples) {
    const auto rep = main_inequality(s, *mp, o.v_max, o.n_v);
    const double h = h_functional(inverse_transform(s, o.v_max, o.n_v));
    rows.push_back({id, mp->p(), mp->q(), rep});
    out << id << ": H=" << detail::fmt17(h) << " gap=" << detail::fmt17(rep.gap)
        << (rep.saturated ? " saturated" : "") << '\n';
  }
  auto os = open_out(o.out);
  write_lyapunov_csv(os, rows);
}

struct SweepOptions {
  std::string p_range = "0.05:1.5", q_range = "0.05:1.5";
  int steps = 30;
  std::string out = "sweep";
};

inline void cmd_sweep(const SweepOptions& o, std::ostream& out) {
  const ParamRange pr = parse_range(o.p_range), qr = parse_range(o.q_range);
  const auto cells = sweep_region(pr, qr, o.steps);
  const fs::path dir(o.out);
  {
    auto os = open_out(dir / "sweep.csv");
    write_sweep_csv(os, cells);
  }
  auto width = [&](ParamRange r) {
    return o.steps > 1 && r.hi > r.lo ? (r.hi - r.lo) / (o.steps - 1) : 0.05;
  };
  std::vector<svg::HeatCell> hc;
  for (const auto& c : cells) {
    hc.push_back({c.params.p(), c.params.q(),
                  c.delta_tilde ? *c.delta_tilde : std::numeric_limits<double>::quiet_NaN()});
  }
  auto os = open_out(dir / "sweep.svg");
  svg::heatmap(os, hc, width(pr), width(qr),
               {"delta_tilde (grey: not admissible)", "p", "q", false});
  out << "wrote " << cells.size() << " cells to " << (dir / "sweep.csv").string() << '\n';
}

/// Parses argv and runs one subcommand; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App cli{"Spectral solver and verification toolkit for the 1-D dissipative Maxwell model"};
  cli.require_subcommand(1);

  double cp = 0.0, cq = 0.0;
  auto* classify_cmd = cli.add_subcommand("classify", "regime, r, lambda and delta_tilde for (p,q)");
  classify_cmd->add_option("--p", cp)->required();
  classify_cmd->add_option("--q", cq)->required();

  EvolveOptions eo;
  auto* evolve_cmd = cli.add_subcommand("evolve", "time-step a run and persist it");
  evolve_cmd->add_option("--config", eo.config, "key=value config file");
  evolve_cmd->add_option("--p", eo.p);
  evolve_cmd->add_option("--q", eo.q);
  evolve_cmd->add_option("--scheme", eo.scheme, "scaled | unscaled");
  evolve_cmd->add_option("--init", eo.init, "gaussian | twopoint | steady | file:<path>");
  evolve_cmd->add_option("--xi-max", eo.xi_max);
  evolve_cmd->add_option("--n-points", eo.n_points);
  evolve_cmd->add_option("--dt", eo.dt);
  evolve_cmd->add_option("--t-end", eo.t_end);
  evolve_cmd->add_option("--quad-nodes", eo.quad_nodes);
  evolve_cmd->add_option("--snapshot-every", eo.snapshot_every);
  evolve_cmd->add_option("--tail-tol", eo.tail_tol);
  evolve_cmd->add_option("--out", eo.out, "run directory");

  SteadyOptions so;
  auto* steady_cmd = cli.add_subcommand("steady", "fixed-point iteration for the steady profile");
  steady_cmd->add_option("--p", so.p);
  steady_cmd->add_option("--q", so.q);
  steady_cmd->add_option("--delta", so.delta);
  steady_cmd->add_option("--tol", so.tol);
  steady_cmd->add_option("--max-iter", so.max_iter);
  steady_cmd->add_option("--quad-nodes", so.quad_nodes);
  steady_cmd->add_option("--xi-max", so.xi_max);
  steady_cmd->add_option("--n-points", so.n_points);
  steady_cmd->add_option("--out", so.out);

  MetricsOptions mo;
  auto* metrics_cmd = cli.add_subcommand("metrics", "distance and norm time series of a run");
  metrics_cmd->add_option("--run", mo.run)->required();
  metrics_cmd->add_option("--reference", mo.reference, "snapshot file or 'explicit'");
  metrics_cmd->add_option("--alpha", mo.alpha);
  metrics_cmd->add_option("--eta", mo.eta);
  metrics_cmd->add_option("--v-max", mo.v_max);
  metrics_cmd->add_option("--n-v", mo.n_v);
  metrics_cmd->add_option("--out", mo.out, "output directory (default: the run)");

  LyapunovOptions lo;
  auto* lyap_cmd = cli.add_subcommand("lyapunov", "H functional and inequality report");
  lyap_cmd->add_option("--run", lo.run);
  lyap_cmd->add_option("--input", lo.input);
  lyap_cmd->add_flag("--corpus", lo.corpus);
  lyap_cmd->add_option("--p", lo.p);
  lyap_cmd->add_option("--q", lo.q);
  lyap_cmd->add_option("--v-max", lo.v_max);
  lyap_cmd->add_option("--n-v", lo.n_v);
  lyap_cmd->add_option("--xi-max", lo.xi_max);
  lyap_cmd->add_option("--n-points", lo.n_points);
  lyap_cmd->add_option("--out", lo.out);

  SweepOptions wo;
  auto* sweep_cmd = cli.add_subcommand("sweep", "regime classification over a (p,q) box");
  sweep_cmd->add_option("--p-range", wo.p_range, "lo:hi");
  sweep_cmd->add_option("--q-range", wo.q_range, "lo:hi");
  sweep_cmd->add_option("--steps", wo.steps);
  sweep_cmd->add_option("--out", wo.out);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*classify_cmd) cmd_classify(cp, cq, out);
    else if (*evolve_cmd) cmd_evolve(resolve(eo), out);
    else if (*steady_cmd) cmd_steady(so, out);
    else if (*metrics_cmd) cmd_metrics(mo, out);
    else if (*lyap_cmd) cmd_lyapunov(lo, out);
    else if (*sweep_cmd) cmd_sweep(wo, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

} // namespace maxwell1d::app
