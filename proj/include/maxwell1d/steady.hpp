#pragma once

// Stationary states of the self-similar equation
//   0 = (1/r) xi g' + g(p xi) g(q xi) - g,
// in integral form g(xi) = int_0^1 g(p tau xi) g(q tau xi) dw, tau = w^{-1/r}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/metrics.hpp"
#include "maxwell1d/parallel.hpp"
#include "maxwell1d/params.hpp"
#include "maxwell1d/quadrature.hpp"
#include "maxwell1d/solver.hpp"
#include "maxwell1d/spectral.hpp"

namespace maxwell1d {

/// Max over nodes of |(1/r) xi g'(xi) + g(p xi) g(q xi) - g(xi)|, with g' from
/// five-point differences taken on one side of the origin only.
inline double residual(const SpectralState& s, const MixingParams& mp) {
  const double inv_r = 1.0 / jacobian_r(mp);
  const int c = s.grid().center();
  const double h = s.grid().spacing();
  double worst = 0.0;
  std::uint64_t miss = 0;
  for (int sign : {1, -1}) {
    auto f = [&](int k) { return s[c + sign * k]; };
    for (int k = 1; k <= c - 2; ++k) {
      cplx d;
      if (k == 1) {
        d = (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h);
      } else {
        d = (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * h);
      }
      d *= sign; // derivative along +xi
      const double x = s.xi(c + sign * k);
      const cplx res = inv_r * x * d + s.sample(mp.p() * x, miss) * s.sample(mp.q() * x, miss) -
                       f(k);
      worst = std::max(worst, std::abs(res));
    }
  }
  s.count_out_of_range(miss);
  return worst;
}

/// r (p^{2+delta} + q^{2+delta}) / (r - 2 - delta); below 1 exactly when S(delta) < 0.
inline double contraction_factor(const MixingParams& mp, double delta) {
  if (regime(mp) != Regime::dissipative) {
    throw InadmissibleDelta("contraction factor needs the dissipative regime (p^2+q^2 < 1)");
  }
  const double r = jacobian_r(mp);
  if (!(r - 2.0 - delta > 0.0)) {
    throw InadmissibleDelta("r - 2 - delta = " + detail::fmt17(r - 2.0 - delta) +
                            " is not positive");
  }
  const double a = 2.0 + delta;
  return r * (std::pow(mp.p(), a) + std::pow(mp.q(), a)) / (r - a);
}

struct SweepLogRow {
  int sweep;
  double d_distance; // d_{2+delta}(psi_n, psi_{n-1})
  double sup_change;
  double var_err;
};

struct SteadyResult {
  SpectralState state;
  std::vector<SweepLogRow> log;
  bool converged;
};

/// The stationary map T applied once.
class StationaryMap {
public:
  explicit StationaryMap(const MixingParams& mp, int quad_nodes = 64) : mp_(mp) {
    const double r = jacobian_r(mp);
    const QuadratureRule rule = graded_unit_rule(quad_nodes);
    w_ = rule.weights;
    tau_.resize(rule.size());
    for (std::size_t j = 0; j < rule.size(); ++j) tau_[j] = std::pow(rule.nodes[j], -1.0 / r);
  }

  SpectralState operator()(const SpectralState& s) const {
    const double h = s.grid().spacing();
    std::uint64_t miss = 0;
    auto vals = detail::hermitian_map(
        s.grid(),
        [&](int k, std::uint64_t& m) {
          const double x = k * h;
          cplx acc = 0.0;
          for (std::size_t j = 0; j < tau_.size(); ++j) {
            const double y = tau_[j] * x;
            acc += w_[j] * s.sample_extended(mp_.p() * y, m) *
                   s.sample_extended(mp_.q() * y, m);
          }
          return acc;
        },
        miss);
    s.count_out_of_range(miss);
    return SpectralState(s.grid(), std::move(vals), mp_, 0.0, SpectralKind::steady);
  }

private:
  MixingParams mp_;
  std::vector<double> tau_;
  std::vector<double> w_;
};

/// psi(xi / sigma) with sigma^2 the measured variance, so the result has unit
/// variance. T commutes with dilations, so this only picks a member of the
/// fixed-point family; without it, discretisation bias drifts the variance.
/// Near-unit dilations use psi + eps xi psi' instead of resampling, which
/// would otherwise add interpolation noise of ~1e-8 on every sweep.
inline SpectralState unit_variance_dilation(const SpectralState& s) {
  const double m2 = -s.derivative_at_zero(2).real();
  if (!(m2 > 0.0) || !std::isfinite(m2)) {
    throw NoConvergence("variance estimate " + detail::fmt17(m2) + " is not positive");
  }
  const double inv = 1.0 / std::sqrt(m2);
  const double eps = inv - 1.0;
  const double h = s.grid().spacing();
  const int c = s.grid().center();
  std::uint64_t miss = 0;
  auto vals = detail::hermitian_map(
      s.grid(),
      [&](int k, std::uint64_t& m) -> cplx {
        if (std::abs(eps) >= 1e-6) return s.sample(k * h * inv, m);
        const int i = c + k;
        cplx d = 0.0;
        if (k + 2 <= c) {
          d = (8.0 * (s[i + 1] - s[i - 1]) - (s[i + 2] - s[i - 2])) / (12.0 * h);
        } else if (k + 1 <= c) {
          d = (s[i + 1] - s[i - 1]) / (2.0 * h);
        }
        return s[i] + eps * (k * h) * d;
      },
      miss);
  return SpectralState(s.grid(), std::move(vals), s.params(), s.time(), s.kind());
}

/// Iterates T from the Gaussian until successive d_{2+delta} distances drop below tol.
inline SteadyResult fixed_point_steady(const MixingParams& mp, const FrequencyGrid& grid,
                                       double delta, double tol, int max_iter = 1000,
                                       int quad_nodes = 64) {
  if (mp.is_elastic()) {
    throw InadmissibleDelta("no stationary map for p^2+q^2 = 1 (r undefined)");
  }
  const double sd = s_function(mp, delta);
  if (!(delta > 0.0) || !(sd < 0.0)) {
    throw InadmissibleDelta("S_{p,q}(" + detail::fmt17(delta) + ") = " + detail::fmt17(sd) +
                            " is not negative");
  }
  contraction_factor(mp, delta); // checks the regime and r - 2 - delta > 0
  if (!(tol > 0.0) || max_iter < 1) throw InvalidArgument("need tol > 0 and max_iter >= 1");

  const StationaryMap T(mp, quad_nodes);
  SpectralState cur = make_gaussian(grid, mp, SpectralKind::steady);
  std::vector<SweepLogRow> log;
  for (int it = 1; it <= max_iter; ++it) {
    SpectralState next = unit_variance_dilation(T(cur));
    const double d = fourier_distance_raw(next, cur, 2.0 + delta).value;
    const double sup = sup_distance(next, cur);
    const double var = check_normalization(next, 1.0).var_err;
    log.push_back({it, d, sup, var});
    cur = std::move(next);
    if (d < tol) return {cur, log, true};
  }
  throw NoConvergence("no convergence after " + std::to_string(max_iter) +
                      " sweeps (last distance " + detail::fmt17(log.back().d_distance) + ")");
}

inline void write_sweep_log_csv(std::ostream& os, std::span<const SweepLogRow> log) {
  os << "sweep,d_distance,sup_change,var_err\n";
  for (const auto& r : log) {
    os << r.sweep << ',' << detail::fmt17(r.d_distance) << ',' << detail::fmt17(r.sup_change)
       << ',' << detail::fmt17(r.var_err) << '\n';
  }
}

// ---- Gevrey tails ----

struct GevreyFit {
  double mu;
  double lambda_fit;
  double rho;
  double rms_residual;
  double beta;          // power prefactor exponent of the fitted model
  double loglog_slope;  // plain regression slope of ln(-ln|g|) on ln xi
  int n_nodes;
};

namespace detail {

struct ProjectionFit {
  double c, beta, mu, sse;
};

// Least squares for y = c + beta ln x - mu x^lam at fixed lam.
inline ProjectionFit project_fixed_lambda(std::span<const double> lx, std::span<const double> y,
                                          double lam) {
  double a[3][3] = {};
  double rhs[3] = {};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double phi[3] = {1.0, lx[i], -std::exp(lam * lx[i])};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += phi[r] * y[i];
      for (int s = 0; s < 3; ++s) a[r][s] += phi[r] * phi[s];
    }
  }
  // Gaussian elimination with partial pivoting
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int s = col; s < 3; ++s) a[r][s] -= f * a[col][s];
      rhs[r] -= f * rhs[col];
    }
  }
  double x[3];
  for (int r = 2; r >= 0; --r) {
    double s = rhs[r];
    for (int k = r + 1; k < 3; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  ProjectionFit f{x[0], x[1], x[2], 0.0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - (f.c + f.beta * lx[i] - f.mu * std::exp(lam * lx[i]));
    f.sse += e * e;
  }
  if (!std::isfinite(f.sse)) f.sse = std::numeric_limits<double>::infinity();
  return f;
}

} // namespace detail

/// Fits ln|g| = c + beta ln xi - mu xi^lambda on xi > rho, |g| > 1e-14.
/// The power prefactor keeps (1+xi) e^{-xi}-type tails from biasing lambda.
inline GevreyFit gevrey_fit(const SpectralState& s, double rho) {
  std::vector<double> lx, y;
  const int c = s.grid().center();
  for (int k = 1; k <= c; ++k) {
    const double x = k * s.grid().spacing();
    if (x <= rho) continue;
    const double m = std::abs(s[c + k]);
    if (!(m > 1e-14)) break;
    lx.push_back(std::log(x));
    y.push_back(std::log(m));
  }
  if (lx.size() < 50) {
    throw InsufficientTail("only " + std::to_string(lx.size()) +
                           " usable nodes beyond rho=" + detail::fmt17(rho) + " (need 50)");
  }
  // coarse scan, then golden section around the best cell
  double best_lam = 0.1;
  double best = std::numeric_limits<double>::infinity();
  for (double lam = 0.1; lam <= 4.0 + 1e-12; lam += 0.01) {
    const double sse = detail::project_fixed_lambda(lx, y, lam).sse;
    if (sse < best) {
      best = sse;
      best_lam = lam;
    }
  }
  double lo = std::max(0.05, best_lam - 0.01);
  double hi = best_lam + 0.01;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = detail::project_fixed_lambda(lx, y, x1).sse;
  double f2 = detail::project_fixed_lambda(lx, y, x2).sse;
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = detail::project_fixed_lambda(lx, y, x1).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = detail::project_fixed_lambda(lx, y, x2).sse;
    }
  }
  const double lam = 0.5 * (lo + hi);
  const auto fit = detail::project_fixed_lambda(lx, y, lam);

  // plain double-log regression, reported alongside
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    if (!(y[i] < 0.0)) continue;
    const double yy = std::log(-y[i]);
    sx += lx[i];
    sy += yy;
    sxx += lx[i] * lx[i];
    sxy += lx[i] * yy;
    ++m;
  }
  const double slope = m > 1 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;

  GevreyFit out{};
  out.mu = fit.mu;
  out.lambda_fit = lam;
  out.rho = rho;
  out.rms_residual = std::sqrt(fit.sse / static_cast<double>(lx.size()));
  out.beta = fit.beta;
  out.loglog_slope = slope;
  out.n_nodes = static_cast<int>(lx.size());
  return out;
}

struct CertificateReport {
  bool pass;
  double worst_xi;
  double margin; // min over nodes of e^{-mu|xi|^lam} - |g(xi)|
};

/// |g(xi)| <= e^{-mu |xi|^lam} at every node with |xi| > rho.
inline CertificateReport tail_certificate(const SpectralState& s, double rho, double mu,
                                          double lam) {
  CertificateReport r{true, 0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < s.grid().n_points(); ++i) {
    const double x = std::abs(s.xi(i));
    if (x <= rho) continue;
    const double bound = std::exp(-mu * std::pow(x, lam));
    const double m = std::abs(s[i]);
    const double margin = bound - m;
    if (margin < r.margin) {
      r.margin = margin;
      r.worst_xi = s.xi(i);
    }
    if (m > bound * (1.0 + 1e-12)) r.pass = false;
  }
  return r;
}

} // namespace maxwell1d
