#pragma once

// Mixing parameters of the linear collision rule v* = p v + q w,
// w* = q v + p w, and the closed-form regime analysis built on them.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "maxwell1d/errors.hpp"

namespace maxwell1d {

/// |p^2 + q^2 - 1| below this is treated as the elastic (energy-conserving) case.
inline constexpr double elastic_tolerance = 1e-14;

/// S_{p,q}(delta) counts as negative only below this threshold.
inline constexpr double negative_threshold = -1e-15;

class MixingParams {
public:
  MixingParams(double p, double q) : p_(p), q_(q) {
    if (!(q > 0.0) || !(q <= p) || !std::isfinite(p)) {
      throw InvalidArgument("mixing parameters must satisfy 0 < q <= p (got p=" +
                            std::to_string(p) + ", q=" + std::to_string(q) + ")");
    }
  }

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

  /// J = p^2 - q^2, Jacobian of (v,w) -> (v*,w*).
  double jacobian() const noexcept { return p_ * p_ - q_ * q_; }

  /// p^2 + q^2 - 1: exponential rate of the kinetic energy.
  double energy_rate() const noexcept { return p_ * p_ + q_ * q_ - 1.0; }

  bool is_elastic() const noexcept { return std::abs(energy_rate()) < elastic_tolerance; }

  friend bool operator==(const MixingParams&, const MixingParams&) = default;

private:
  double p_;
  double q_;
};

enum class Regime { dissipative, elastic, energy_producing };

inline const char* to_string(Regime r) {
  switch (r) {
  case Regime::dissipative: return "dissipative";
  case Regime::elastic: return "elastic";
  case Regime::energy_producing: return "energy-producing";
  }
  return "unknown";
}

inline Regime regime(const MixingParams& mp) {
  if (mp.is_elastic()) return Regime::elastic;
  return mp.energy_rate() < 0.0 ? Regime::dissipative : Regime::energy_producing;
}

/// S_{p,q}(delta) = p^{2+delta} + q^{2+delta} - 1 - (2+delta)/2 (p^2+q^2-1).
/// Its sign decides whether d_{2+delta} contracts along the scaled flow.
inline double s_function(const MixingParams& mp, double delta) {
  if (delta < 0.0) throw InvalidArgument("s_function requires delta >= 0");
  if (delta == 0.0) return 0.0;
  const double a = 2.0 + delta;
  return std::pow(mp.p(), a) + std::pow(mp.q(), a) - 1.0 - 0.5 * a * mp.energy_rate();
}

/// Largest delta_tilde in (0,1] with S < 0 on (0, delta_tilde), or nullopt when
/// S is not negative just to the right of 0. Dense scan, then bisection.
inline std::optional<double> delta_tilde(const MixingParams& mp) {
  constexpr double scan_step = 1e-3;
  constexpr double bisect_tol = 1e-10;
  auto negative = [&](double d) { return s_function(mp, d) < negative_threshold; };

  if (!negative(scan_step)) return std::nullopt;
  double lo = scan_step;
  for (int k = 2; k <= 1000; ++k) {
    const double d = k * scan_step;
    if (!negative(d)) {
      double hi = d;
      while (hi - lo > bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        (negative(mid) ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    lo = d;
  }
  return 1.0;
}

/// The exponent lambda with p^lambda + q^lambda = 1 (Gevrey class of the
/// steady state). Requires p < 1 so that the decreasing map crosses 1.
inline double gevrey_exponent(const MixingParams& mp) {
  if (mp.p() >= 1.0) {
    throw NoRoot("p^l + q^l = 1 has no root for p >= 1 (bracket [0, inf) tried, p=" +
                 std::to_string(mp.p()) + ")");
  }
  auto f = [&](double l) { return std::pow(mp.p(), l) + std::pow(mp.q(), l) - 1.0; };
  double lo = 0.0;
  double hi = 2.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NoRoot("bracket [0, 1e6] does not contain a root");
  }
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// r = 2 / (1 - p^2 - q^2); negative when energy is produced.
inline double jacobian_r(const MixingParams& mp) {
  if (mp.is_elastic()) {
    throw ElasticSingularity("r = 2/(1-p^2-q^2) is undefined for p^2+q^2 = 1");
  }
  return -2.0 / mp.energy_rate();
}

/// A(p,q) = (3 + p^2 + q^2)/4, the coefficient that would make -int sqrt(f)
/// non-increasing along the semi-implicit scheme.
inline double lyapunov_coefficient(const MixingParams& mp) {
  return (3.0 + mp.p() * mp.p() + mp.q() * mp.q()) / 4.0;
}

struct RegimeReport {
  MixingParams params;
  Regime regime;
  std::optional<double> r;
  std::optional<double> lambda;
  std::optional<double> delta_tilde;
  bool admissible;
};

inline RegimeReport classify(const MixingParams& mp) {
  RegimeReport rep{mp, regime(mp), std::nullopt, std::nullopt, std::nullopt, false};
  if (rep.regime != Regime::elastic) rep.r = jacobian_r(mp);
  // p just below 1 puts the root beyond the bracket; reported as absent
  try {
    if (mp.p() < 1.0) rep.lambda = gevrey_exponent(mp);
  } catch (const NoRoot&) {
  }
  rep.delta_tilde = delta_tilde(mp);
  rep.admissible = rep.delta_tilde.has_value();
  return rep;
}

struct ParamRange {
  double lo;
  double hi;
};

/// classify() over a steps x steps lattice, keeping cells with q <= p.
/// Output order is p-major, q-minor. A range with lo == hi yields one value.
inline std::vector<RegimeReport> sweep_region(ParamRange p_range, ParamRange q_range,
                                              int steps) {
  auto check = [](ParamRange r, const char* name) {
    if (!(r.lo > 0.0) || r.hi > 2.0 || r.hi < r.lo) {
      throw InvalidArgument(std::string(name) + " range must lie within (0,2] with lo <= hi");
    }
  };
  check(p_range, "p");
  check(q_range, "q");
  if (steps < 1) throw InvalidArgument("sweep needs steps >= 1");

  auto axis = [steps](ParamRange r) {
    std::vector<double> v;
    if (r.lo == r.hi || steps == 1) {
      v.push_back(r.lo);
      return v;
    }
    for (int i = 0; i < steps; ++i) v.push_back(r.lo + (r.hi - r.lo) * i / (steps - 1));
    return v;
  };
  std::vector<RegimeReport> out;
  for (double p : axis(p_range)) {
    for (double q : axis(q_range)) {
      if (q > p) continue;
      out.push_back(classify(MixingParams(p, q)));
    }
  }
  return out;
}

namespace detail {
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
inline std::string fmt17(const std::optional<double>& x) { return x ? fmt17(*x) : "NA"; }
} // namespace detail

inline void write_sweep_csv(std::ostream& os, std::span<const RegimeReport> cells) {
  os << "p,q,regime,r,lambda,delta_tilde,admissible\n";
  for (const auto& c : cells) {
    os << detail::fmt17(c.params.p()) << ',' << detail::fmt17(c.params.q()) << ','
       << to_string(c.regime) << ',' << detail::fmt17(c.r) << ',' << detail::fmt17(c.lambda)
       << ',' << detail::fmt17(c.delta_tilde) << ',' << (c.admissible ? "true" : "false")
       << '\n';
  }
}

} // namespace maxwell1d
