#pragma once

// Velocity-space densities reconstructed from characteristic functions:
// f(v) = (1/2pi) int g^(xi) e^{-i xi v} dxi, trapezoid over the frequency grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/parallel.hpp"
#include "maxwell1d/params.hpp"
#include "maxwell1d/spectral.hpp"

namespace maxwell1d {

struct VelocityDensity {
  double v_max = 0.0;
  int n_points = 0;
  std::vector<double> values;
  double neg_mass = 0.0;
  double imag_residue = 0.0;

  double spacing() const { return 2.0 * v_max / (n_points - 1); }
  double v(int j) const { return -v_max + j * spacing(); }
};

namespace detail {

inline void check_velocity_grid(double v_max, int n_points) {
  if (!(v_max > 0.0)) throw InvalidArgument("v_max must be positive");
  if (n_points < 3 || n_points % 2 == 0) throw InvalidArgument("velocity n_points must be odd >= 3");
}

/// Real and imaginary parts of the trapezoid inverse transform of raw
/// frequency samples. Pairs +xi and -xi and walks e^{-i k h v} by a phasor
/// recurrence, re-synchronised every 64 steps.
inline void inverse_transform_raw(const FrequencyGrid& grid, std::span<const cplx> vals,
                                  double v_max, int n_points, std::vector<double>& re,
                                  std::vector<double>& im) {
  const int c = grid.center();
  const double h = grid.spacing();
  const double hv = 2.0 * v_max / (n_points - 1);
  re.assign(n_points, 0.0);
  im.assign(n_points, 0.0);
  parallel_for(static_cast<std::size_t>(n_points), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t j = b; j < e; ++j) {
      const double v = -v_max + static_cast<double>(j) * hv;
      const double theta = h * v;
      const cplx step(std::cos(theta), -std::sin(theta));
      cplx w = 1.0;
      cplx acc = vals[c];
      for (int k = 1; k <= c; ++k) {
        if (k % 64 == 0) {
          w = cplx(std::cos(k * theta), -std::sin(k * theta));
        } else {
          w *= step;
        }
        const double wt = k == c ? 0.5 : 1.0;
        // g(xi_k) e^{-i xi_k v} + g(-xi_k) e^{+i xi_k v}
        acc += wt * (vals[c + k] * w + vals[c - k] * std::conj(w));
      }
      re[j] = acc.real() * h / (2.0 * std::numbers::pi);
      im[j] = acc.imag() * h / (2.0 * std::numbers::pi);
    }
  }, 16);
}

inline double trapezoid(std::span<const double> y, double dx) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dx;
}

// Integral of a positive power-law tail beyond |v| = V, estimated from the
// local log-slope between the edge node and the node nearest 0.9 V.
inline double power_tail(double y_edge, double y_in, double v_edge, double v_in) {
  if (!(y_edge > 0.0) || !(y_in > y_edge) || !(v_edge > v_in) || v_in <= 0.0) return 0.0;
  const double s = std::log(y_in / y_edge) / std::log(v_edge / v_in);
  if (!(s > 1.05)) return 0.0;
  return y_edge * v_edge / (s - 1.0);
}

} // namespace detail

/// Trapezoid on the velocity grid plus power-law closures for both tails.
/// Heavy-tailed integrands (v^{-2}, v^{-4}) otherwise lose O(1/V) mass.
inline double tail_closed_integral(std::span<const double> y, double v_max) {
  const int n = static_cast<int>(y.size());
  const double hv = 2.0 * v_max / (n - 1);
  double s = detail::trapezoid(y, hv);
  const int back = std::max(1, static_cast<int>(std::lround(0.1 * v_max / hv)));
  if (back < n / 2) {
    s += detail::power_tail(y[n - 1], y[n - 1 - back], v_max, v_max - back * hv);
    s += detail::power_tail(y[0], y[back], v_max, v_max - back * hv);
  }
  return s;
}

inline double integrate(const VelocityDensity& f) {
  return tail_closed_integral(f.values, f.v_max);
}

/// int v^n f dv with tail closure.
inline double velocity_moment(const VelocityDensity& f, int n) {
  std::vector<double> y(f.values.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::pow(f.v(static_cast<int>(j)), n) * f.values[j];
  if (n % 2 == 0) return tail_closed_integral(y, f.v_max);
  return detail::trapezoid(y, f.spacing());
}

inline double clipped_mass(std::span<const double> values, double hv) {
  std::vector<double> neg(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) neg[j] = std::max(-values[j], 0.0);
  return detail::trapezoid(neg, hv);
}

namespace detail {

inline VelocityDensity density_from_values(const FrequencyGrid& grid, std::span<const cplx> vals,
                                           double v_max, int n_points) {
  check_velocity_grid(v_max, n_points);
  VelocityDensity f;
  f.v_max = v_max;
  f.n_points = n_points;
  std::vector<double> im;
  inverse_transform_raw(grid, vals, v_max, n_points, f.values, im);
  for (double x : im) f.imag_residue = std::max(f.imag_residue, std::abs(x));
  if (f.imag_residue > 1e-6) {
    throw AsymmetryError("imaginary residue " + fmt17(f.imag_residue) + " exceeds 1e-6");
  }
  f.neg_mass = clipped_mass(f.values, f.spacing());
  return f;
}

} // namespace detail

inline VelocityDensity inverse_transform(const SpectralState& s, double v_max = 20.0,
                                         int n_points = 4097) {
  if (s.edge_modulus() >= 1e-8) {
    throw TailViolation("|g(xi_max)| = " + detail::fmt17(s.edge_modulus()) +
                        " is not below 1e-8; the transform would be truncated");
  }
  return detail::density_from_values(s.grid(), s.values(), v_max, n_points);
}

/// g^(p xi) g^(q xi) on the grid of s.
inline std::vector<cplx> convolution_symbol(const SpectralState& s, const MixingParams& mp) {
  const int n = s.grid().n_points();
  std::vector<cplx> out(n);
  std::uint64_t miss = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.xi(i);
    out[i] = s.sample(mp.p() * x, miss) * s.sample(mp.q() * x, miss);
  }
  s.count_out_of_range(miss);
  return out;
}

/// f_p * f_q with f_p(v) = f(v/p)/p, computed as the inverse transform of
/// g^(p xi) g^(q xi).
inline VelocityDensity scaled_convolution(const SpectralState& s, const MixingParams& mp,
                                          double v_max = 20.0, int n_points = 4097) {
  if (s.edge_modulus() >= 1e-8) {
    throw TailViolation("|g(xi_max)| = " + detail::fmt17(s.edge_modulus()) +
                        " is not below 1e-8; the transform would be truncated");
  }
  const auto sym = convolution_symbol(s, mp);
  return detail::density_from_values(s.grid(), sym, v_max, n_points);
}

/// (int sqrt(max(f,0)) dv)^2.
inline double half_norm(const VelocityDensity& f) {
  if (f.neg_mass >= 1e-6) {
    throw ExcessNegativity("clipped mass " + detail::fmt17(f.neg_mass) + " is not below 1e-6");
  }
  std::vector<double> y(f.values.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::sqrt(std::max(f.values[j], 0.0));
  const double s = tail_closed_integral(y, f.v_max);
  return s * s;
}

struct PositivityReport {
  double min_value;
  double neg_mass;
};

inline PositivityReport positivity_report(const VelocityDensity& f) {
  PositivityReport r{0.0, f.neg_mass};
  if (!f.values.empty()) r.min_value = *std::min_element(f.values.begin(), f.values.end());
  r.neg_mass = clipped_mass(f.values, f.spacing());
  return r;
}

/// Samples a closed-form density on the velocity grid.
inline VelocityDensity make_density(const std::function<double(double)>& fn, double v_max,
                                    int n_points) {
  detail::check_velocity_grid(v_max, n_points);
  VelocityDensity f;
  f.v_max = v_max;
  f.n_points = n_points;
  f.values.resize(n_points);
  for (int j = 0; j < n_points; ++j) f.values[j] = fn(f.v(j));
  f.neg_mass = clipped_mass(f.values, f.spacing());
  return f;
}

inline void write_density_csv(std::ostream& os, const VelocityDensity& f) {
  os << "v,f\n";
  char buf[64];
  for (int j = 0; j < f.n_points; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.v(j), f.values[j]);
    os << buf;
  }
}

} // namespace maxwell1d
