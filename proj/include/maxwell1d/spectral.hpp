#pragma once

// Characteristic functions sampled on a uniform symmetric frequency grid.
// Convention: g^(xi) = int f(v) e^{i xi v} dv, so g^(0) = 1 is the mass and
// the n-th derivative at 0 is i^n m_n.

#include <atomic>
#include <charconv>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "maxwell1d/errors.hpp"
#include "maxwell1d/params.hpp"

namespace maxwell1d {

using cplx = std::complex<double>;

class FrequencyGrid {
public:
  FrequencyGrid(double xi_max, int n_points) : xi_max_(xi_max), n_(n_points) {
    if (!(xi_max > 0.0) || !std::isfinite(xi_max)) {
      throw InvalidArgument("xi_max must be positive and finite");
    }
    if (n_points < 33 || n_points % 2 == 0) {
      throw InvalidArgument("n_points must be odd and >= 33 (got " + std::to_string(n_points) +
                            ")");
    }
    h_ = 2.0 * xi_max / (n_points - 1);
  }

  double xi_max() const noexcept { return xi_max_; }
  int n_points() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  /// Index of the xi = 0 node.
  int center() const noexcept { return (n_ - 1) / 2; }
  double node(int i) const noexcept { return (i - center()) * h_; }

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
    return a.xi_max_ == b.xi_max_ && a.n_ == b.n_;
  }

private:
  double xi_max_;
  int n_;
  double h_;
};

enum class SpectralKind { unscaled, scaled, steady };

inline const char* to_string(SpectralKind k) {
  switch (k) {
  case SpectralKind::unscaled: return "unscaled";
  case SpectralKind::scaled: return "scaled";
  case SpectralKind::steady: return "steady";
  }
  return "unknown";
}

inline std::optional<SpectralKind> parse_kind(std::string_view s) {
  if (s == "unscaled") return SpectralKind::unscaled;
  if (s == "scaled") return SpectralKind::scaled;
  if (s == "steady") return SpectralKind::steady;
  return std::nullopt;
}

/// Counter that survives copies of its owner (copies start from the current value).
class EvalCounter {
public:
  EvalCounter() = default;
  EvalCounter(const EvalCounter& o) : n_(o.load()) {}
  EvalCounter& operator=(const EvalCounter& o) {
    n_.store(o.load(), std::memory_order_relaxed);
    return *this;
  }
  void add(std::uint64_t k) const { n_.fetch_add(k, std::memory_order_relaxed); }
  std::uint64_t load() const { return n_.load(std::memory_order_relaxed); }
  void reset() const { n_.store(0, std::memory_order_relaxed); }

private:
  mutable std::atomic<std::uint64_t> n_{0};
};

/// Tolerance for treating a query as sitting on a grid node (in units of h).
inline constexpr double node_snap = 1e-9;

class SpectralState {
public:
  SpectralState(FrequencyGrid grid, std::vector<cplx> values,
                std::optional<MixingParams> params = std::nullopt, double time = 0.0,
                SpectralKind kind = SpectralKind::scaled)
      : grid_(grid), values_(std::move(values)), params_(params), time_(time), kind_(kind) {
    if (static_cast<int>(values_.size()) != grid_.n_points()) {
      throw InvalidArgument("value count does not match grid size");
    }
    if (!(time >= 0.0)) throw InvalidArgument("time must be >= 0");
    cplx& v0 = values_[grid_.center()];
    if (std::abs(v0 - 1.0) > 1e-9) {
      throw InvalidArgument("value at xi=0 must be 1 (got " + std::to_string(v0.real()) + ")");
    }
    v0 = 1.0;
    const int c = grid_.center();
    for (int k = 1; k <= c; ++k) {
      if (std::abs(values_[c + k] - std::conj(values_[c - k])) > 1e-12) {
        throw InvalidArgument("values are not Hermitian-symmetric at xi=" +
                              std::to_string(grid_.node(c + k)));
      }
    }
  }

  const FrequencyGrid& grid() const noexcept { return grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  const std::optional<MixingParams>& params() const noexcept { return params_; }
  double time() const noexcept { return time_; }
  SpectralKind kind() const noexcept { return kind_; }
  double xi(int i) const noexcept { return grid_.node(i); }
  cplx operator[](int i) const noexcept { return values_[i]; }

  /// Number of evaluations that fell outside [-xi_max, xi_max].
  std::uint64_t out_of_range_count() const { return oob_.load(); }
  void reset_out_of_range_count() const { oob_.reset(); }
  void count_out_of_range(std::uint64_t k) const {
    if (k) oob_.add(k);
  }

  /// Off-grid value: 6-point Lagrange interpolation on the nonnegative half,
  /// extended by conjugation. Outside the grid: 0, counted.
  cplx eval(double xi) const {
    std::uint64_t miss = 0;
    const cplx v = sample(xi, miss);
    if (miss) oob_.add(miss);
    return v;
  }

  /// sample() but continued by the edge value beyond xi_max (still counted).
  /// Used by the evolution maps: once the tail check has passed this differs
  /// from zero-fill by at most tail_tol, and it keeps g = 1 an exact fixed point.
  cplx sample_extended(double xi, std::uint64_t& miss) const {
    if (std::abs(xi) > grid_.xi_max() * (1.0 + 1e-12)) {
      ++miss;
      return xi < 0.0 ? values_.front() : values_.back();
    }
    return sample(xi, miss);
  }

  /// eval() with the out-of-range tally kept by the caller; lets hot loops
  /// count locally and publish once.
  cplx sample(double xi, std::uint64_t& miss) const {
    const double h = grid_.spacing();
    const int c = grid_.center();
    const double ax = std::abs(xi);
    const double x = ax / h;
    if (x > c * (1.0 + 1e-12)) {
      ++miss;
      return 0.0;
    }
    const double xr = std::nearbyint(x);
    if (std::abs(x - xr) < node_snap) {
      const int k = static_cast<int>(xr);
      return values_[xi < 0.0 ? c - k : c + k];
    }
    int i0 = static_cast<int>(x) - 2;
    if (i0 < 0) i0 = 0;
    if (i0 > c - 5) i0 = c - 5;
    const double t = x - i0;
    // Lagrange basis on nodes 0..5 at t
    const double d0 = t, d1 = t - 1, d2 = t - 2, d3 = t - 3, d4 = t - 4, d5 = t - 5;
    const double w0 = -(d1 * d2 * d3 * d4 * d5) / 120.0;
    const double w1 = (d0 * d2 * d3 * d4 * d5) / 24.0;
    const double w3 = (d0 * d1 * d2 * d4 * d5) / 12.0;
    const double w4 = -(d0 * d1 * d2 * d3 * d5) / 24.0;
    const double w5 = (d0 * d1 * d2 * d3 * d4) / 120.0;
    const cplx* v = values_.data() + c + i0;
    // weights sum to 1, so interpolate offsets from v[2]; constants come out exact
    const cplx b = v[2];
    cplx r = b + (w0 * (v[0] - b) + w1 * (v[1] - b) + w3 * (v[3] - b) + w4 * (v[4] - b) +
                  w5 * (v[5] - b));
    if (i0 == 0) {
      // The real part is even, so its one-sided interpolant must have zero
      // slope at 0; otherwise the mirror image carries a spurious |xi| kink.
      // Adding (L'(0)/120) t(t-1)...(t-5) enforces this without moving nodes.
      const double a = v[0].real();
      const double slope = 5.0 * (v[1].real() - a) - 5.0 * (v[2].real() - a) +
                           10.0 / 3.0 * (v[3].real() - a) - 1.25 * (v[4].real() - a) +
                           0.2 * (v[5].real() - a);
      r += slope * (d0 * d1 * d2 * d3 * d4 * d5) / 120.0;
    }
    return xi < 0.0 ? std::conj(r) : r;
  }

  double max_modulus() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// |g^(xi_max)|, the larger of the two edge moduli.
  double edge_modulus() const {
    return std::max(std::abs(values_.front()), std::abs(values_.back()));
  }

  /// Central finite-difference derivative of order 1..4 at xi = 0.
  /// Order 2 combines second differences at spacings h..4h so that xi^2,
  /// |xi|^3, xi^4 and |xi|^5 are all differentiated exactly; states with a
  /// |xi|^3 cusp at the origin keep an accurate variance.
  cplx derivative_at_zero(int order) const {
    const int c = grid_.center();
    const double h = grid_.spacing();
    auto f = [&](int k) { return values_[c + k]; };
    switch (order) {
    case 1: return (8.0 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12.0 * h);
    case 2: {
      auto d = [&](int k) { return (f(k) + f(-k) - 2.0 * f(0)) / (double(k * k) * h * h); };
      return 4.0 * d(1) - 6.0 * d(2) + 4.0 * d(3) - d(4);
    }
    case 3:
      return (f(-3) - 8.0 * f(-2) + 13.0 * f(-1) - 13.0 * f(1) + 8.0 * f(2) - f(3)) /
             (8.0 * h * h * h);
    case 4:
      return (-f(3) + 12.0 * f(2) - 39.0 * f(1) + 56.0 * f(0) - 39.0 * f(-1) + 12.0 * f(-2) -
              f(-3)) /
             (6.0 * h * h * h * h);
    default: throw InvalidArgument("derivative order must be 1..4");
    }
  }

  SpectralState with_values(std::vector<cplx> values, double time) const {
    return SpectralState(grid_, std::move(values), params_, time, kind_);
  }
  SpectralState with_meta(std::optional<MixingParams> params, double time,
                          SpectralKind kind) const {
    SpectralState s = *this;
    s.params_ = params;
    s.time_ = time;
    s.kind_ = kind;
    return s;
  }

private:
  FrequencyGrid grid_;
  std::vector<cplx> values_;
  std::optional<MixingParams> params_;
  double time_;
  SpectralKind kind_;
  EvalCounter oob_;
};

inline cplx eval(const SpectralState& s, double xi) { return s.eval(xi); }

/// Samples fn on the nonnegative half and fills the rest by conjugation.
inline SpectralState make_from_function(const FrequencyGrid& grid,
                                        const std::function<cplx(double)>& fn,
                                        std::optional<MixingParams> params = std::nullopt,
                                        double time = 0.0,
                                        SpectralKind kind = SpectralKind::scaled) {
  std::vector<cplx> v(grid.n_points());
  const int c = grid.center();
  for (int k = 0; k <= c; ++k) {
    const cplx z = fn(k * grid.spacing());
    v[c + k] = z;
    v[c - k] = std::conj(z);
  }
  v[c] = 1.0;
  return SpectralState(grid, std::move(v), params, time, kind);
}

inline SpectralState make_gaussian(const FrequencyGrid& grid,
                                   std::optional<MixingParams> params = std::nullopt,
                                   SpectralKind kind = SpectralKind::scaled) {
  return make_from_function(
      grid, [](double x) { return cplx(std::exp(-0.5 * x * x)); }, params, 0.0, kind);
}

/// cos(xi): the symmetric two-point law at v = +-1.
inline SpectralState make_two_point(const FrequencyGrid& grid,
                                    std::optional<MixingParams> params = std::nullopt,
                                    SpectralKind kind = SpectralKind::scaled) {
  return make_from_function(
      grid, [](double x) { return cplx(std::cos(x)); }, params, 0.0, kind);
}

/// (1+|xi|) e^{-|xi|}, stationary for every p+q = 1.
inline SpectralState make_explicit_steady(const FrequencyGrid& grid,
                                          std::optional<MixingParams> params = std::nullopt,
                                          SpectralKind kind = SpectralKind::steady) {
  return make_from_function(
      grid, [](double x) { return cplx((1.0 + std::abs(x)) * std::exp(-std::abs(x))); },
      params, 0.0, kind);
}

struct NormalizationReport {
  double mass_err;
  double mean_err;
  double var_err;
  bool pass;
};

inline NormalizationReport check_normalization(const SpectralState& s, double tol) {
  NormalizationReport r{};
  r.mass_err = std::abs(s[s.grid().center()] - 1.0);
  r.mean_err = std::abs(s.derivative_at_zero(1));
  r.var_err = std::abs(s.derivative_at_zero(2) + 1.0);
  r.pass = r.mass_err <= tol && r.mean_err <= tol && r.var_err <= tol;
  return r;
}

// ---- snapshot files ----

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

inline std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  double x = 0.0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (!t.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e) {
    // from_chars rejects "inf"/"nan" spellings on some libraries; fall back
    if (t == "inf") return HUGE_VAL;
    if (t == "-inf") return -HUGE_VAL;
    return std::nullopt;
  }
  return x;
}

} // namespace detail

inline void write_snapshot(std::ostream& os, const SpectralState& s) {
  const auto& p = s.params();
  os << "p=" << (p ? detail::fmt17(p->p()) : "NA") << '\n';
  os << "q=" << (p ? detail::fmt17(p->q()) : "NA") << '\n';
  os << "time=" << detail::fmt17(s.time()) << '\n';
  os << "kind=" << to_string(s.kind()) << '\n';
  os << "xi_max=" << detail::fmt17(s.grid().xi_max()) << '\n';
  os << "n_points=" << s.grid().n_points() << '\n';
  char buf[128];
  for (int i = 0; i < s.grid().n_points(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.xi(i), s[i].real(), s[i].imag());
    os << buf;
  }
}

inline void save(const SpectralState& s, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_snapshot(os, s);
  if (!os) throw IoError("write failed: " + path);
}

inline SpectralState read_snapshot(std::istream& is) {
  static const char* keys[] = {"p", "q", "time", "kind", "xi_max", "n_points"};
  std::map<std::string, std::string> header;
  std::string line;
  std::size_t lineno = 0;
  std::streampos data_start = is.tellg();
  while (header.size() < 6) {
    data_start = is.tellg();
    if (!std::getline(is, line)) break;
    ++lineno;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      --lineno;
      is.clear();
      is.seekg(data_start);
      break;
    }
    header[detail::trim(std::string_view(line).substr(0, eq))] =
        detail::trim(std::string_view(line).substr(eq + 1));
  }
  for (const char* k : keys) {
    if (!header.count(k)) {
      throw MalformedSnapshot(std::string("missing header key '") + k + "'", lineno + 1);
    }
  }
  auto num = [&](const char* k) {
    auto v = detail::parse_double(header[k]);
    if (!v) throw MalformedSnapshot(std::string("bad value for '") + k + "'", lineno);
    return *v;
  };
  std::optional<MixingParams> params;
  if (header["p"] != "NA" || header["q"] != "NA") {
    try {
      params = MixingParams(num("p"), num("q"));
    } catch (const InvalidArgument& e) {
      throw MalformedSnapshot(e.what(), lineno);
    }
  }
  const double time = num("time");
  const auto kind = parse_kind(header["kind"]);
  if (!kind) throw MalformedSnapshot("unknown kind '" + header["kind"] + "'", lineno);
  const double xi_max = num("xi_max");
  const double n_real = num("n_points");
  if (n_real != std::floor(n_real) || n_real < 1 || n_real > 1e9) {
    throw MalformedSnapshot("bad n_points", lineno);
  }
  const int n = static_cast<int>(n_real);
  std::optional<FrequencyGrid> grid;
  try {
    grid.emplace(xi_max, n);
  } catch (const InvalidArgument& e) {
    throw MalformedSnapshot(e.what(), lineno);
  }

  std::vector<cplx> values;
  values.reserve(n);
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::string_view sv(line);
    const auto c1 = sv.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw MalformedSnapshot("expected xi,re,im", lineno);
    const auto xi = detail::parse_double(sv.substr(0, c1));
    const auto re = detail::parse_double(sv.substr(c1 + 1, c2 - c1 - 1));
    const auto im = detail::parse_double(sv.substr(c2 + 1));
    if (!xi || !re || !im) throw MalformedSnapshot("unparsable number", lineno);
    if (static_cast<int>(values.size()) >= n) throw MalformedSnapshot("too many rows", lineno);
    const double expect = grid->node(static_cast<int>(values.size()));
    if (std::abs(*xi - expect) > 1e-9 * std::max(1.0, xi_max)) {
      throw MalformedSnapshot("xi does not match the grid", lineno);
    }
    values.emplace_back(*re, *im);
  }
  if (static_cast<int>(values.size()) != n) {
    throw MalformedSnapshot("expected " + std::to_string(n) + " rows, found " +
                                std::to_string(values.size()),
                            lineno);
  }
  const int c = grid->center();
  if (std::abs(values[c] - 1.0) > 1e-9) {
    throw MalformedSnapshot("value at xi=0 differs from 1", lineno - (n - 1 - c));
  }
  try {
    return SpectralState(*grid, std::move(values), params, time, *kind);
  } catch (const InvalidArgument& e) {
    throw MalformedSnapshot(e.what(), lineno);
  }
}

inline SpectralState load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_snapshot(is);
}

} // namespace maxwell1d
