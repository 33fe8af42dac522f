#pragma once

// The functional H(f) = -int sqrt(f) and the inequalities that would make it
// a Lyapunov functional of the self-similar dynamics on p + q = 1.

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/params.hpp"
#include "maxwell1d/physical.hpp"
#include "maxwell1d/solver.hpp"
#include "maxwell1d/spectral.hpp"

namespace maxwell1d {

struct InequalityReport {
  double lhs;
  double rhs;
  double gap; // rhs - lhs
  bool saturated;
  double excluded_mass = 0.0;
};

inline InequalityReport make_report(double lhs, double rhs, double tol) {
  const double gap = rhs - lhs;
  return {lhs, rhs, gap, std::abs(gap) < tol, 0.0};
}

inline double h_functional(const VelocityDensity& f) {
  if (f.neg_mass >= 1e-4) {
    throw ExcessNegativity("clipped mass " + detail::fmt17(f.neg_mass) + " is not below 1e-4");
  }
  std::vector<double> y(f.values.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::sqrt(std::max(f.values[j], 0.0));
  return -tail_closed_integral(y, f.v_max);
}

namespace detail {
inline void require_unit_line(const MixingParams& mp) {
  if (std::abs(mp.p() + mp.q() - 1.0) > 1e-12) {
    throw InvalidArgument("this inequality is stated for p + q = 1 (got p+q=" +
                          fmt17(mp.p() + mp.q()) + ")");
  }
}
} // namespace detail

/// lhs = ((1+p^2+q^2)/2) int sqrt(f), rhs = int (f_p * f_q) / sqrt(f),
/// the quotient taken where f >= 1e-12.
inline InequalityReport main_inequality(const VelocityDensity& f, const VelocityDensity& conv,
                                        const MixingParams& mp, double tol = 1e-4) {
  detail::require_unit_line(mp);
  if (f.n_points != conv.n_points || f.v_max != conv.v_max) {
    throw InvalidArgument("density and convolution must share a velocity grid");
  }
  if (f.neg_mass >= 1e-4) {
    throw ExcessNegativity("clipped mass " + detail::fmt17(f.neg_mass) + " is not below 1e-4");
  }
  const std::size_t n = f.values.size();
  std::vector<double> root(n), quot(n), excl(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double fv = f.values[j];
    root[j] = std::sqrt(std::max(fv, 0.0));
    if (fv >= 1e-12) {
      quot[j] = conv.values[j] / std::sqrt(fv);
    } else {
      excl[j] = std::abs(conv.values[j]);
    }
  }
  const double excluded = detail::trapezoid(excl, f.spacing());
  if (excluded > 1e-3) {
    throw MassExclusionTooLarge("excluded mass " + detail::fmt17(excluded) + " exceeds 1e-3");
  }
  const double p2q2 = mp.p() * mp.p() + mp.q() * mp.q();
  auto rep = make_report(0.5 * (1.0 + p2q2) * tail_closed_integral(root, f.v_max),
                         tail_closed_integral(quot, f.v_max), tol);
  rep.excluded_mass = excluded;
  return rep;
}

inline InequalityReport main_inequality(const SpectralState& s, const MixingParams& mp,
                                        double v_max = 60.0, int n_points = 8193,
                                        double tol = 1e-4) {
  detail::require_unit_line(mp);
  const auto f = inverse_transform(s, v_max, n_points);
  const auto conv = scaled_convolution(s, mp, v_max, n_points);
  return main_inequality(f, conv, mp, tol);
}

struct ReverseYoungReport {
  InequalityReport conjectured; // A(p,q) sqrt||f|| vs sqrt||f_p*f_q||
  InequalityReport weak;        // same with coefficient p
  InequalityReport leindler;    // p ||f|| vs ||f_p*f_q|| (no square roots)
  bool proven_ok;               // weak.gap >= -1e-6 and leindler.gap >= -1e-6
};

inline ReverseYoungReport reverse_young(const VelocityDensity& f, const VelocityDensity& conv,
                                        const MixingParams& mp, double tol = 1e-4) {
  detail::require_unit_line(mp);
  const double nf = half_norm(f);
  const double nc = half_norm(conv);
  ReverseYoungReport r{};
  r.conjectured = make_report(lyapunov_coefficient(mp) * std::sqrt(nf), std::sqrt(nc), tol);
  r.weak = make_report(mp.p() * std::sqrt(nf), std::sqrt(nc), tol);
  r.leindler = make_report(mp.p() * nf, nc, tol);
  r.proven_ok = r.weak.gap >= -1e-6 && r.leindler.gap >= -1e-6;
  return r;
}

inline ReverseYoungReport reverse_young(const SpectralState& s, const MixingParams& mp,
                                        double v_max = 60.0, int n_points = 8193,
                                        double tol = 1e-4) {
  detail::require_unit_line(mp);
  const auto f = inverse_transform(s, v_max, n_points);
  const auto conv = scaled_convolution(s, mp, v_max, n_points);
  return reverse_young(f, conv, mp, tol);
}

struct HSample {
  double t;
  double h;
  double slope; // centred difference; one-sided at the ends
};

struct HScan {
  std::vector<HSample> series;
  bool non_increasing;
};

inline HScan h_scan(const Trajectory& traj, double v_max = 60.0, int n_points = 8193) {
  detail::require_unit_line(traj.manifest.params);
  HScan out{{}, true};
  for (const auto& s : traj.snapshots) {
    out.series.push_back({s.time(), h_functional(inverse_transform(s, v_max, n_points)), 0.0});
  }
  auto& v = out.series;
  const std::size_t n = v.size();
  for (std::size_t i = 0; n >= 2 && i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    v[i].slope = (v[b].h - v[a].h) / (v[b].t - v[a].t);
    if (i > 0 && v[i].h > v[i - 1].h + 1e-12) out.non_increasing = false;
  }
  return out;
}

/// Normalized (mass 1, mean 0, variance 1) samples used by corpus scans.
struct CorpusSample {
  std::string id;
  SpectralState state;
};

inline std::vector<CorpusSample> builtin_corpus(const FrequencyGrid& grid) {
  const double a = 0.6;
  const double s2 = 1.0 - a * a; // bimodal: +-0.6 with spread 0.8^2
  std::vector<CorpusSample> c;
  c.push_back({"gaussian", make_gaussian(grid)});
  c.push_back({"explicit_steady", make_explicit_steady(grid)});
  c.push_back({"bimodal", make_from_function(grid, [=](double x) {
                 return cplx(std::cos(a * x) * std::exp(-0.5 * s2 * x * x));
               })});
  c.push_back({"mixture", make_from_function(grid, [](double x) {
                 const double ax = std::abs(x);
                 return cplx(0.5 * std::exp(-0.5 * x * x) + 0.5 * (1.0 + ax) * std::exp(-ax));
               })});
  return c;
}

struct LyapunovRow {
  std::string sample_id;
  double p;
  double q;
  InequalityReport report;
};

inline void write_lyapunov_csv(std::ostream& os, std::span<const LyapunovRow> rows) {
  os << "sample_id,p,q,lhs,rhs,gap,excluded_mass\n";
  for (const auto& r : rows) {
    os << r.sample_id << ',' << detail::fmt17(r.p) << ',' << detail::fmt17(r.q) << ','
       << detail::fmt17(r.report.lhs) << ',' << detail::fmt17(r.report.rhs) << ','
       << detail::fmt17(r.report.gap) << ',' << detail::fmt17(r.report.excluded_mass) << '\n';
  }
}

} // namespace maxwell1d
