#pragma once

// Moment hierarchy of the unscaled equation:
//   dm_n/dt = sum_k C(n,k) p^k q^{n-k} m_k m_{n-k} - m_n,
// obtained by differentiating the Fourier equation n times at xi = 0.

#include <cmath>
#include <complex>
#include <ostream>
#include <span>
#include <vector>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/params.hpp"
#include "maxwell1d/spectral.hpp"

namespace maxwell1d {

struct MomentVector {
  std::vector<double> values; // m_0 .. m_{n_max}
  double time = 0.0;

  int n_max() const { return static_cast<int>(values.size()) - 1; }
  double operator[](int n) const { return values[n]; }
};

/// Moments of a centered law with m_2 = 1 given up to n_max; higher entries
/// default to those of the standard Gaussian.
inline MomentVector gaussian_moments(int n_max) {
  MomentVector m{std::vector<double>(n_max + 1, 0.0), 0.0};
  double dbl_fact = 1.0;
  for (int n = 0; n <= n_max; n += 2) {
    m.values[n] = dbl_fact;
    dbl_fact *= (n + 1);
  }
  return m;
}

/// E(t) = e^{(p^2+q^2-1)t}.
inline double energy_at(const MixingParams& mp, double t) {
  if (t < 0.0) throw InvalidArgument("energy_at requires t >= 0");
  return std::exp(mp.energy_rate() * t);
}

inline std::vector<double> hierarchy_rhs(const MomentVector& m, const MixingParams& mp) {
  const int n_max = m.n_max();
  if (n_max < 2) throw InvalidArgument("moment vector needs n_max >= 2");
  std::vector<double> rhs(n_max + 1, 0.0);
  std::vector<double> pp(n_max + 1), qp(n_max + 1);
  pp[0] = qp[0] = 1.0;
  for (int k = 1; k <= n_max; ++k) {
    pp[k] = pp[k - 1] * mp.p();
    qp[k] = qp[k - 1] * mp.q();
  }
  for (int n = 2; n <= n_max; ++n) {
    double binom = 1.0;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      s += binom * pp[k] * qp[n - k] * m.values[k] * m.values[n - k];
      binom = binom * (n - k) / (k + 1);
    }
    rhs[n] = s - m.values[n];
  }
  return rhs;
}

/// Classical RK4 with fixed step; the last step is shortened to land on t_end.
inline MomentVector integrate_hierarchy(const MomentVector& m0, const MixingParams& mp,
                                        double t_end, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (t_end < m0.time) throw InvalidArgument("t_end precedes the initial time");
  MomentVector m = m0;
  auto axpy = [](const std::vector<double>& x, double a, const std::vector<double>& k) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * k[i];
    return y;
  };
  const long n = static_cast<long>(std::ceil((t_end - m0.time) / dt - 1e-9));
  for (long s = 0; s < n; ++s) {
    const double t_next = s + 1 == n ? t_end : m0.time + (s + 1) * dt;
    const double h = t_next - m.time;
    const auto k1 = hierarchy_rhs(m, mp);
    const auto k2 = hierarchy_rhs({axpy(m.values, 0.5 * h, k1), 0.0}, mp);
    const auto k3 = hierarchy_rhs({axpy(m.values, 0.5 * h, k2), 0.0}, mp);
    const auto k4 = hierarchy_rhs({axpy(m.values, h, k3), 0.0}, mp);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      m.values[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    m.time = t_next;
  }
  return m;
}

/// Scaled moments mu_n = m_n / E^{n/2}.
inline MomentVector scaled_moments(const MomentVector& m, const MixingParams& mp) {
  MomentVector out = m;
  const double e = energy_at(mp, m.time);
  for (int n = 0; n <= m.n_max(); ++n) out.values[n] = m.values[n] / std::pow(e, 0.5 * n);
  return out;
}

/// B_{p,q}(delta) = p^delta q^2 + q^delta p^2.
inline double moment_forcing(const MixingParams& mp, double delta) {
  return std::pow(mp.p(), delta) * mp.q() * mp.q() + std::pow(mp.q(), delta) * mp.p() * mp.p();
}

/// d_{j+1} = d_j - (dt/2)|S| d_j + 2 dt B; returns d_0..d_steps.
inline std::vector<double> discrete_moment_bound(double d0, const MixingParams& mp, double delta,
                                                 double dt, int steps) {
  const double s = s_function(mp, delta);
  if (!(s < 0.0)) {
    throw InadmissibleDelta("S_{p,q}(" + detail::fmt17(delta) + ") = " + detail::fmt17(s) +
                            " is not negative");
  }
  if (!(dt > 0.0) || !(0.5 * dt * std::abs(s) < 1.0)) {
    throw InvalidArgument("dt must satisfy 0 < dt |S|/2 < 1");
  }
  if (d0 < 0.0 || steps < 0) throw InvalidArgument("need d0 >= 0 and steps >= 0");
  const double b = moment_forcing(mp, delta);
  std::vector<double> d(steps + 1);
  d[0] = d0;
  for (int j = 0; j < steps; ++j) d[j + 1] = d[j] - 0.5 * dt * std::abs(s) * d[j] + 2.0 * dt * b;
  return d;
}

/// Limit of discrete_moment_bound: 4B/|S|.
inline double moment_bound_limit(const MixingParams& mp, double delta) {
  return 4.0 * moment_forcing(mp, delta) / std::abs(s_function(mp, delta));
}

/// m_n = g^{(n)}(0) / i^n from finite differences, n <= 4.
inline MomentVector spectral_moments(const SpectralState& s, int n_max = 4) {
  if (n_max < 2 || n_max > 4) throw InvalidArgument("spectral moments available for n_max in 2..4");
  MomentVector m{std::vector<double>(n_max + 1, 0.0), s.time()};
  m.values[0] = s[s.grid().center()].real();
  cplx ipow = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    ipow *= cplx(0.0, 1.0);
    m.values[n] = (s.derivative_at_zero(n) / ipow).real();
  }
  return m;
}

inline void write_moment_csv(std::ostream& os, std::span<const MomentVector> series) {
  if (series.empty()) return;
  os << "t";
  for (int n = 0; n <= series.front().n_max(); ++n) os << ",m" << n;
  os << '\n';
  for (const auto& m : series) {
    os << detail::fmt17(m.time);
    for (double v : m.values) os << ',' << detail::fmt17(v);
    os << '\n';
  }
}

} // namespace maxwell1d
