#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/params.hpp"
#include "maxwell1d/physical.hpp"
#include "maxwell1d/solver.hpp"
#include "maxwell1d/spectral.hpp"

namespace maxwell1d {

namespace detail {
inline void require_same_grid(const SpectralState& a, const SpectralState& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("states live on different grids");
}
} // namespace detail

struct DistanceReport {
  double value;
  double argmax_xi;
};

/// sup_{|xi| >= xi_min} |a - b| / |xi|^alpha, without the moment precondition.
inline DistanceReport fourier_distance_raw(const SpectralState& a, const SpectralState& b,
                                           double alpha, double xi_min = 0.0) {
  detail::require_same_grid(a, b);
  if (!(xi_min > 0.0)) xi_min = 2.0 * a.grid().spacing();
  DistanceReport r{0.0, 0.0};
  for (int i = 0; i < a.grid().n_points(); ++i) {
    const double x = std::abs(a.xi(i));
    if (x < xi_min * (1.0 - 1e-12)) continue;
    const double d = std::abs(a[i] - b[i]) / std::pow(x, alpha);
    if (d > r.value) r = {d, a.xi(i)};
  }
  return r;
}

/// Fourier metric d_alpha. xi_min <= 0 selects the default 2h.
inline DistanceReport fourier_distance_report(const SpectralState& a, const SpectralState& b,
                                              double alpha, double xi_min = 0.0) {
  if (!(alpha > 2.0) || alpha > 3.0) throw InvalidArgument("alpha must lie in (2,3]");
  for (const SpectralState* s : {&a, &b}) {
    const auto n = check_normalization(*s, 1e-3);
    if (!n.pass) {
      throw IncompatibleMoments("state at t=" + detail::fmt17(s->time()) +
                                " fails normalization (mass " + detail::fmt17(n.mass_err) +
                                ", mean " + detail::fmt17(n.mean_err) + ", var " +
                                detail::fmt17(n.var_err) + ")");
    }
  }
  return fourier_distance_raw(a, b, alpha, xi_min);
}

inline double fourier_distance(const SpectralState& a, const SpectralState& b, double alpha,
                               double xi_min = 0.0) {
  return fourier_distance_report(a, b, alpha, xi_min).value;
}

inline double sup_distance(const SpectralState& a, const SpectralState& b) {
  detail::require_same_grid(a, b);
  double m = 0.0;
  for (int i = 0; i < a.grid().n_points(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---- tail bounds ----

/// |g(xi)| <= c / (1 + kappa |xi|)^mu_exp for |xi| > rho.
struct TailBound {
  double c = 1.0;
  double kappa = 1.0;
  double mu_exp = 1.0;
  double rho = 0.0;
};

struct TailReport {
  bool pass;
  double worst_xi;
  double worst_value; // max of |g| (1+kappa|xi|)^mu over the checked nodes
  double margin;      // c - worst_value
};

inline TailReport tail_bound_check(const SpectralState& s, const TailBound& b) {
  TailReport r{true, 0.0, 0.0, b.c};
  for (int i = 0; i < s.grid().n_points(); ++i) {
    const double x = std::abs(s.xi(i));
    if (x <= b.rho) continue;
    const double w = std::abs(s[i]) * std::pow(1.0 + b.kappa * x, b.mu_exp);
    if (w > r.worst_value) {
      r.worst_value = w;
      r.worst_xi = s.xi(i);
    }
  }
  r.margin = b.c - r.worst_value;
  r.pass = r.worst_value <= b.c;
  return r;
}

/// Smallest admissible c (at least 1) for the given shape, times c_factor.
inline TailBound fit_tail_bound(const SpectralState& s, double kappa = 1.0, double mu_exp = 1.0,
                                double rho = 0.0, double c_factor = 1.0) {
  TailBound b{1.0, kappa, mu_exp, rho};
  b.c = std::max(1.0, tail_bound_check(s, b).worst_value) * c_factor;
  return b;
}

struct PropagationReport {
  bool pass;
  std::optional<double> first_failure_time;
  double worst_margin;
};

inline PropagationReport uniform_tail_propagation(const Trajectory& traj, const TailBound& b) {
  PropagationReport r{true, std::nullopt, std::numeric_limits<double>::infinity()};
  for (const auto& s : traj.snapshots) {
    const auto t = tail_bound_check(s, b);
    r.worst_margin = std::min(r.worst_margin, t.margin);
    if (!t.pass && r.pass) {
      r.pass = false;
      r.first_failure_time = s.time();
    }
  }
  return r;
}

// ---- decay ----

struct DecayFit {
  double rate;
  double intercept;
  bool bound_ok;
  double worst_ratio; // max of d(t) / (e^{-|S|(t-t0)} d(t0)) over the window
  int n_points;
};

/// Log-linear fit of a distance series on [t0,t1] and the domination test
/// d(t) <= 1.05 e^{-bound_rate (t - t_first)} d(t_first).
inline DecayFit decay_rate_fit_series(std::span<const double> ts, std::span<const double> ds,
                                      double bound_rate, double t0, double t1) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < t0 - 1e-12 || ts[i] > t1 + 1e-12) continue;
    if (!(ds[i] >= 1e-14)) {
      throw DegenerateFit("distance " + detail::fmt17(ds[i]) + " at t=" + detail::fmt17(ts[i]) +
                          " is below 1e-14");
    }
    x.push_back(ts[i]);
    y.push_back(std::log(ds[i]));
  }
  if (x.size() < 5) throw InvalidArgument("decay fit needs at least 5 samples in the window");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  DecayFit f{};
  f.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.rate * sx) / n;
  f.n_points = static_cast<int>(x.size());
  f.worst_ratio = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ratio = std::exp(y[i] - y[0] + bound_rate * (x[i] - x[0]));
    f.worst_ratio = std::max(f.worst_ratio, ratio);
  }
  f.bound_ok = f.worst_ratio <= 1.05;
  return f;
}

struct DecaySeries {
  std::vector<double> t;
  std::vector<double> d;
};

inline DecaySeries distance_series(const Trajectory& traj, const SpectralState& reference,
                                   double alpha, double xi_min = 0.0) {
  DecaySeries s;
  for (const auto& snap : traj.snapshots) {
    s.t.push_back(snap.time());
    s.d.push_back(fourier_distance(snap, reference, alpha, xi_min));
  }
  return s;
}

/// Rate bound |S_{p,q}(alpha-2)| from the trajectory's parameters.
inline DecayFit decay_rate_fit(const Trajectory& traj, const SpectralState& reference,
                               double alpha, double t0, double t1) {
  DecaySeries s;
  for (const auto& snap : traj.snapshots) {
    if (snap.time() < t0 - 1e-12 || snap.time() > t1 + 1e-12) continue;
    s.t.push_back(snap.time());
    s.d.push_back(fourier_distance(snap, reference, alpha));
  }
  const double rate = std::abs(s_function(traj.manifest.params, alpha - 2.0));
  return decay_rate_fit_series(s.t, s.d, rate, t0, t1);
}

// ---- Sobolev ----

/// Squared homogeneous norm int |xi|^{2 eta} |g|^2 dxi (trapezoid).
inline double sobolev_norm(const SpectralState& s, double eta) {
  if (eta < 0.0) throw InvalidArgument("eta must be >= 0");
  const int n = s.grid().n_points();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = std::abs(s.xi(i));
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double weight = eta == 0.0 ? 1.0 : std::pow(x, 2.0 * eta);
    acc += w * weight * std::norm(s[i]);
  }
  return acc * s.grid().spacing();
}

/// C = -1 - ((1-p^2-q^2)/2)(2 eta + 1) + (q^{-(2eta+1)} + p^{-(2eta+1)})/2.
inline double sobolev_growth_constant(const MixingParams& mp, double eta) {
  const double a = 2.0 * eta + 1.0;
  return -1.0 + 0.5 * mp.energy_rate() * a + 0.5 * (std::pow(mp.q(), -a) + std::pow(mp.p(), -a));
}

struct UniformityReport {
  bool pass;
  double max_ratio;
  double tail_growth_early; // ratio growth over the first half of the last third
  double tail_growth_late;  // ... and over the second half
  std::vector<double> t;
  std::vector<double> ratio;
};

/// Ratios ||g(t)||^2 / max(||g(t0)||^2, 1) for t >= t0. Fails when the last
/// third of the sequence keeps increasing without slowing down (or a value is
/// not finite); a sequence that creeps up to a limit passes.
inline UniformityReport sobolev_uniformity_ratios(std::span<const double> ts,
                                                  std::span<const double> norms, double t0) {
  UniformityReport r{true, 0.0, 0.0, 0.0, {}, {}};
  double base = -1.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < t0 - 1e-12) continue;
    if (base < 0.0) base = std::max(norms[i], 1.0);
    r.t.push_back(ts[i]);
    r.ratio.push_back(norms[i] / base);
  }
  const std::size_t n = r.ratio.size();
  for (double x : r.ratio) {
    if (!std::isfinite(x)) r.pass = false;
    r.max_ratio = std::max(r.max_ratio, x);
  }
  if (n < 3 || !r.pass) return r;
  const std::size_t start = n - std::max<std::size_t>(3, n / 3);
  bool monotone = true;
  for (std::size_t i = start + 1; i < n; ++i) monotone = monotone && r.ratio[i] > r.ratio[i - 1];
  const std::size_t mid = start + (n - 1 - start) / 2;
  r.tail_growth_early = r.ratio[mid] - r.ratio[start];
  r.tail_growth_late = r.ratio[n - 1] - r.ratio[mid];
  const double rel = (r.ratio[n - 1] - r.ratio[start]) / std::abs(r.ratio[start]);
  if (monotone && rel > 1e-6 && r.tail_growth_late >= r.tail_growth_early) r.pass = false;
  return r;
}

inline UniformityReport sobolev_uniformity_check(const Trajectory& traj, double eta, double t0) {
  std::vector<double> ts, ns;
  for (const auto& s : traj.snapshots) {
    ts.push_back(s.time());
    ns.push_back(sobolev_norm(s, eta));
  }
  return sobolev_uniformity_ratios(ts, ns, t0);
}

// ---- L1 ----

inline double l1_distance(const SpectralState& a, const SpectralState& b, double v_max = 20.0,
                          int n_points = 4097) {
  detail::require_same_grid(a, b);
  detail::check_velocity_grid(v_max, n_points);
  std::vector<cplx> diff(a.values().size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[static_cast<int>(i)] - b[static_cast<int>(i)];
  std::vector<double> re, im;
  detail::inverse_transform_raw(a.grid(), diff, v_max, n_points, re, im);
  for (double& x : re) x = std::abs(x);
  return detail::trapezoid(re, 2.0 * v_max / (n_points - 1));
}

struct MetricRow {
  double t;
  double d_alpha;
  double sup;
  double l1;
  double sobolev;
};

inline void write_metrics_csv(std::ostream& os, std::span<const MetricRow> rows) {
  os << "t,d_alpha,sup,l1,sobolev_eta\n";
  for (const auto& r : rows) {
    os << detail::fmt17(r.t) << ',' << detail::fmt17(r.d_alpha) << ',' << detail::fmt17(r.sup)
       << ',' << detail::fmt17(r.l1) << ',' << detail::fmt17(r.sobolev) << '\n';
  }
}

} // namespace maxwell1d
