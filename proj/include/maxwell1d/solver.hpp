#pragma once

// Time stepping for the unscaled Fourier equation and the semi-implicit
// scheme for the self-similar (unit variance) equation.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/parallel.hpp"
#include "maxwell1d/params.hpp"
#include "maxwell1d/quadrature.hpp"
#include "maxwell1d/spectral.hpp"

namespace maxwell1d {

struct SolverConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  int quad_nodes = 32;
  int snapshot_every = 1;
  double tail_tol = 1e-8;

  void validate() const {
    if (!(dt > 0.0) || !(dt < 1.0)) throw InvalidArgument("dt must lie in (0,1)");
    // t_end = dt is allowed: a single step
    if (!(t_end >= dt)) throw InvalidArgument("t_end must be >= dt");
    if (quad_nodes < 8) throw InvalidArgument("quad_nodes must be >= 8");
    if (snapshot_every < 1) throw InvalidArgument("snapshot_every must be >= 1");
    if (!(tail_tol > 0.0)) throw InvalidArgument("tail_tol must be positive");
  }
};

enum class Scheme { unscaled, scaled };

inline const char* to_string(Scheme s) { return s == Scheme::unscaled ? "unscaled" : "scaled"; }

namespace detail {

inline void check_tail(const SpectralState& s, double tail_tol) {
  const double edge = s.edge_modulus();
  if (edge > tail_tol) {
    throw TailViolation("|g(xi_max)| = " + fmt17(edge) + " exceeds tail_tol = " +
                        fmt17(tail_tol) + "; enlarge xi_max");
  }
}

// Fills the xi >= 0 half via node(k, miss) and mirrors it by conjugation.
template <class NodeFn>
std::vector<cplx> hermitian_map(const FrequencyGrid& grid, NodeFn&& node, std::uint64_t& miss) {
  const int c = grid.center();
  std::vector<cplx> out(grid.n_points());
  std::vector<std::uint64_t> misses(worker_count(), 0);
  parallel_for(static_cast<std::size_t>(c + 1), [&](std::size_t b, std::size_t e, std::size_t w) {
    std::uint64_t local = 0;
    for (std::size_t k = b; k < e; ++k) {
      const cplx z = node(static_cast<int>(k), local);
      out[c + k] = z;
      out[c - k] = std::conj(z);
    }
    misses[w] += local;
  });
  for (auto m : misses) miss += m;
  out[c] = 1.0;
  return out;
}

} // namespace detail

/// Duhamel step f+ = e^{-dt} f + (1-e^{-dt}) f(p.) f(q.).
inline SpectralState step_unscaled(const SpectralState& state, const MixingParams& mp, double dt,
                                   double tail_tol = 1e-8, std::uint64_t* misses = nullptr) {
  if (state.kind() != SpectralKind::unscaled) {
    throw InvalidArgument("step_unscaled expects an unscaled state");
  }
  if (!(dt > 0.0) || !(dt < 1.0)) throw InvalidArgument("dt must lie in (0,1)");
  detail::check_tail(state, tail_tol);
  const double a = std::exp(-dt);
  const double b = -std::expm1(-dt);
  const double h = state.grid().spacing();
  const double p = mp.p();
  const double q = mp.q();
  std::uint64_t miss = 0;
  auto vals = detail::hermitian_map(
      state.grid(),
      [&](int k, std::uint64_t& m) {
        const double x = k * h;
        return a * state[state.grid().center() + k] +
               b * state.sample_extended(p * x, m) * state.sample_extended(q * x, m);
      },
      miss);
  state.count_out_of_range(miss);
  if (misses) *misses += miss;
  return SpectralState(state.grid(), std::move(vals), mp, state.time() + dt,
                       SpectralKind::unscaled);
}

inline SpectralState step_unscaled(const SpectralState& state, double dt, double tail_tol = 1e-8) {
  if (!state.params()) throw InvalidArgument("state carries no mixing parameters");
  return step_unscaled(state, *state.params(), dt, tail_tol);
}

/// One step of the semi-implicit scheme, written as an average over u in (0,1):
///   g+(xi) = int_0^1 [dt g(p tau xi) g(q tau xi) + (1-dt) g(tau xi)] du,  tau = u^{-dt/r}.
/// Works for r > 0 (tau >= 1) and r < 0 (tau <= 1).
class SemiImplicitStepper {
public:
  SemiImplicitStepper(const MixingParams& mp, double dt, int quad_nodes)
      : mp_(mp), dt_(dt) {
    if (mp.is_elastic()) {
      throw ElasticSingularity("the scaled scheme is undefined for p^2+q^2 = 1; use the "
                               "unscaled stepper");
    }
    if (!(dt > 0.0) || !(dt < 1.0)) throw InvalidArgument("dt must lie in (0,1)");
    const double r = jacobian_r(mp);
    if (r > 0.0 && !(dt < 0.5 * r)) {
      throw InvalidArgument("dt must be below r/2 for the dilation kernel to keep the variance");
    }
    const QuadratureRule rule = graded_unit_rule(quad_nodes);
    tau_.resize(rule.size());
    w_ = rule.weights;
    for (std::size_t j = 0; j < rule.size(); ++j) tau_[j] = std::pow(rule.nodes[j], -dt / r);
  }

  SpectralState operator()(const SpectralState& state, double tail_tol,
                           std::uint64_t* misses = nullptr) const {
    detail::check_tail(state, tail_tol);
    const double h = state.grid().spacing();
    const double p = mp_.p();
    const double q = mp_.q();
    std::uint64_t miss = 0;
    auto vals = detail::hermitian_map(
        state.grid(),
        [&](int k, std::uint64_t& m) {
          const double x = k * h;
          cplx acc = 0.0;
          for (std::size_t j = 0; j < tau_.size(); ++j) {
            const double y = tau_[j] * x;
            const cplx gain = state.sample_extended(p * y, m) * state.sample_extended(q * y, m);
            acc += w_[j] * (dt_ * gain + (1.0 - dt_) * state.sample_extended(y, m));
          }
          return acc;
        },
        miss);
    state.count_out_of_range(miss);
    if (misses) *misses += miss;
    return SpectralState(state.grid(), std::move(vals), mp_, state.time() + dt_,
                         SpectralKind::scaled);
  }

private:
  MixingParams mp_;
  double dt_;
  std::vector<double> tau_;
  std::vector<double> w_;
};

inline SpectralState step_scaled_semi_implicit(const SpectralState& state, const MixingParams& mp,
                                               double dt, int quad_nodes = 32,
                                               double tail_tol = 1e-8) {
  if (state.kind() != SpectralKind::scaled) {
    throw InvalidArgument("step_scaled_semi_implicit expects a scaled state");
  }
  return SemiImplicitStepper(mp, dt, quad_nodes)(state, tail_tol);
}

struct StepDiagnostic {
  long step;
  double t;
  double max_modulus;
  std::uint64_t out_of_range;
};

struct RunManifest {
  MixingParams params;
  SolverConfig config;
  Scheme scheme;
  std::string init;
  std::string created;
};

struct Trajectory {
  std::vector<SpectralState> snapshots;
  RunManifest manifest;
  std::vector<StepDiagnostic> diagnostics;

  double t_first() const { return snapshots.front().time(); }
  double t_last() const { return snapshots.back().time(); }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Steps from initial to config.t_end. Snapshots at t=0, every
/// snapshot_every steps, and at the final time.
inline Trajectory evolve(const SpectralState& initial, const MixingParams& mp,
                         const SolverConfig& config, Scheme scheme,
                         const std::string& init_descriptor = "custom") {
  config.validate();
  const auto norm = check_normalization(initial, 1e-3);
  if (!norm.pass) {
    throw InvalidArgument("initial data fails normalization (mass " + detail::fmt17(norm.mass_err) +
                          ", mean " + detail::fmt17(norm.mean_err) + ", var " +
                          detail::fmt17(norm.var_err) + ")");
  }
  const SpectralKind kind = scheme == Scheme::unscaled ? SpectralKind::unscaled
                                                       : SpectralKind::scaled;
  std::optional<SemiImplicitStepper> scaled;
  if (scheme == Scheme::scaled) scaled.emplace(mp, config.dt, config.quad_nodes);

  const double t0 = initial.time();
  const long n_steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));

  Trajectory traj{{}, {mp, config, scheme, init_descriptor, utc_timestamp()}, {}};
  SpectralState cur = initial.with_meta(mp, t0, kind);
  traj.snapshots.push_back(cur);

  for (long k = 1; k <= n_steps; ++k) {
    const double t_next = k == n_steps ? t0 + config.t_end : t0 + k * config.dt;
    std::uint64_t miss = 0;
    if (scheme == Scheme::unscaled) {
      cur = step_unscaled(cur, mp, t_next - cur.time(), config.tail_tol, &miss);
    } else if (k == n_steps && std::abs((t_next - cur.time()) - config.dt) > 1e-12) {
      cur = SemiImplicitStepper(mp, t_next - cur.time(), config.quad_nodes)(cur, config.tail_tol,
                                                                             &miss);
    } else {
      cur = (*scaled)(cur, config.tail_tol, &miss);
    }
    cur = cur.with_meta(mp, t_next, kind);
    const double mod = cur.max_modulus();
    traj.diagnostics.push_back({k, t_next, mod, miss});
    if (!(mod <= 1.5)) {
      throw Divergence("max modulus " + detail::fmt17(mod) + " at t=" + detail::fmt17(t_next));
    }
    if (k % config.snapshot_every == 0 || k == n_steps) traj.snapshots.push_back(cur);
  }
  return traj;
}

/// Linear-in-time interpolation between bracketing snapshots.
inline cplx trajectory_eval(const Trajectory& traj, double xi, double t) {
  const auto& s = traj.snapshots;
  if (s.empty() || t < s.front().time() || t > s.back().time()) {
    throw OutOfWindow("t=" + detail::fmt17(t) + " outside the trajectory window");
  }
  std::size_t k = 0;
  while (k + 1 < s.size() && s[k + 1].time() <= t) ++k;
  if (s[k].time() == t || k + 1 == s.size()) return s[k].eval(xi);
  const double alpha = (s[k + 1].time() - t) / (s[k + 1].time() - s[k].time());
  return alpha * s[k].eval(xi) + (1.0 - alpha) * s[k + 1].eval(xi);
}

/// g(xi,t) = f(xi / sqrt(E(t)), t) with E(t) = e^{(p^2+q^2-1)t}.
inline SpectralState rescale_to_selfsimilar(const SpectralState& state, const MixingParams& mp) {
  if (state.kind() != SpectralKind::unscaled) {
    throw InvalidArgument("rescale_to_selfsimilar expects an unscaled state");
  }
  const double s = 1.0 / std::sqrt(std::exp(mp.energy_rate() * state.time()));
  std::uint64_t miss = 0;
  const double h = state.grid().spacing();
  auto vals = detail::hermitian_map(
      state.grid(), [&](int k, std::uint64_t& m) { return state.sample(k * h * s, m); }, miss);
  state.count_out_of_range(miss);
  return SpectralState(state.grid(), std::move(vals), mp, state.time(), SpectralKind::scaled);
}

// ---- persistence ----

inline std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t_%06zu.csv", index);
  return buf;
}

inline void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream m(dir / "manifest.txt", std::ios::binary);
    if (!m) throw IoError("cannot write manifest in " + dir.string());
    const auto& mf = traj.manifest;
    const auto& g = traj.snapshots.front().grid();
    m << "p=" << detail::fmt17(mf.params.p()) << '\n'
      << "q=" << detail::fmt17(mf.params.q()) << '\n'
      << "scheme=" << to_string(mf.scheme) << '\n'
      << "init=" << mf.init << '\n'
      << "dt=" << detail::fmt17(mf.config.dt) << '\n'
      << "t_end=" << detail::fmt17(mf.config.t_end) << '\n'
      << "quad_nodes=" << mf.config.quad_nodes << '\n'
      << "snapshot_every=" << mf.config.snapshot_every << '\n'
      << "tail_tol=" << detail::fmt17(mf.config.tail_tol) << '\n'
      << "xi_max=" << detail::fmt17(g.xi_max()) << '\n'
      << "n_points=" << g.n_points() << '\n'
      << "n_snapshots=" << traj.snapshots.size() << '\n'
      << "created=" << mf.created << '\n';
  }
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    save(traj.snapshots[i], (dir / snapshot_name(i)).string());
  }
  std::ofstream d(dir / "diagnostics.csv", std::ios::binary);
  if (!d) throw IoError("cannot write diagnostics in " + dir.string());
  d << "step,t,max_modulus,out_of_range\n";
  for (const auto& r : traj.diagnostics) {
    d << r.step << ',' << detail::fmt17(r.t) << ',' << detail::fmt17(r.max_modulus) << ','
      << r.out_of_range << '\n';
  }
}

inline std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) continue;
    kv[detail::trim(std::string_view(t).substr(0, eq))] =
        detail::trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

inline Trajectory load_trajectory(const std::filesystem::path& dir) {
  auto kv = read_key_values(dir / "manifest.txt");
  auto get = [&](const char* k) {
    if (!kv.count(k)) throw IoError(std::string("manifest lacks '") + k + "'");
    return kv[k];
  };
  auto num = [&](const char* k) {
    auto v = detail::parse_double(get(k));
    if (!v) throw IoError(std::string("manifest value for '") + k + "' is not a number");
    return *v;
  };
  SolverConfig cfg;
  cfg.dt = num("dt");
  cfg.t_end = num("t_end");
  cfg.quad_nodes = static_cast<int>(num("quad_nodes"));
  cfg.snapshot_every = static_cast<int>(num("snapshot_every"));
  cfg.tail_tol = num("tail_tol");
  const std::string scheme = get("scheme");
  Trajectory traj{{},
                  {MixingParams(num("p"), num("q")), cfg,
                   scheme == "unscaled" ? Scheme::unscaled : Scheme::scaled,
                   kv.count("init") ? kv["init"] : "", kv.count("created") ? kv["created"] : ""},
                  {}};
  const auto n = static_cast<std::size_t>(num("n_snapshots"));
  for (std::size_t i = 0; i < n; ++i) traj.snapshots.push_back(load((dir / snapshot_name(i)).string()));
  if (traj.snapshots.empty()) throw IoError("trajectory has no snapshots");
  return traj;
}

} // namespace maxwell1d
