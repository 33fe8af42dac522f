#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "maxwell1d/metrics.hpp"

using namespace maxwell1d;

namespace {
const MixingParams kMp(0.7, 0.3);
const FrequencyGrid kGrid(40.0, 4097);
const double kSqrtPi = std::sqrt(std::numbers::pi);

Trajectory trajectory_of(std::vector<SpectralState> snaps) {
  return Trajectory{std::move(snaps), RunManifest{kMp, SolverConfig{}, Scheme::scaled, "test", ""},
                    {}};
}

SpectralState dilated(const SpectralState& s, double scale) {
  return make_from_function(s.grid(), [&](double x) { return s.eval(x / scale); });
}
} // namespace

TEST(FourierDistance, IdentityIsZero) {
  const auto g = make_gaussian(kGrid);
  EXPECT_EQ(fourier_distance(g, g, 2.5), 0.0);
}

TEST(FourierDistance, GaussianVersusSteadyMatchesDenseGrid) {
  const double d = fourier_distance(make_gaussian(kGrid), make_explicit_steady(kGrid), 2.5, 0.1);
  const FrequencyGrid dense(40.0, 65537);
  const double ref =
      fourier_distance(make_gaussian(dense), make_explicit_steady(dense), 2.5, 0.1);
  EXPECT_GT(d, 0.0);
  EXPECT_NEAR(d / ref, 1.0, 1e-3);
}

TEST(FourierDistance, ExclusionWindow) {
  const auto a = make_gaussian(kGrid);
  auto v = a.values();
  const int c = kGrid.center();
  v[c + 1] += 1e-8;
  v[c - 1] += 1e-8;
  const SpectralState b(kGrid, v);
  EXPECT_EQ(fourier_distance(a, b, 2.5), 0.0);
  EXPECT_GT(fourier_distance(a, b, 2.5, 0.5 * kGrid.spacing()), 0.0);
}

TEST(FourierDistance, Preconditions) {
  const auto g = make_gaussian(kGrid);
  const auto one = make_from_function(kGrid, [](double) { return cplx(1.0); });
  EXPECT_THROW(fourier_distance(g, one, 2.5), IncompatibleMoments);
  EXPECT_THROW(fourier_distance(g, g, 2.0), InvalidArgument);
  EXPECT_THROW(fourier_distance(g, g, 3.5), InvalidArgument);
  EXPECT_THROW(fourier_distance(g, make_gaussian(FrequencyGrid(20.0, 4097)), 2.5),
               InvalidArgument);
}

TEST(FourierDistance, HomogeneousUnderDilation) {
  const auto a = make_gaussian(kGrid);
  const auto b = make_explicit_steady(kGrid);
  const double s = 1.25;
  const double d = fourier_distance_raw(a, b, 2.5, 0.1).value;
  const double ds = fourier_distance_raw(dilated(a, s), dilated(b, s), 2.5, 0.1 * s).value;
  // both sups are taken over nodes, which sit differently relative to the peak
  EXPECT_NEAR(ds * std::pow(s, 2.5) / d, 1.0, 2e-4);
}

TEST(SupDistance, Values) {
  const auto g = make_gaussian(kGrid);
  const auto e = make_explicit_steady(kGrid);
  const auto one = make_from_function(kGrid, [](double) { return cplx(1.0); });
  EXPECT_EQ(sup_distance(g, g), 0.0);
  EXPECT_NEAR(sup_distance(g, one), 1.0, 1e-15);
  EXPECT_EQ(sup_distance(g, e), sup_distance(e, g));
}

TEST(TailBoundCheck, Gaussian) {
  const auto g = make_gaussian(kGrid);
  const auto ok = tail_bound_check(g, {1.1, 0.2, 1.0, 0.0});
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.worst_value, 1.0195, 1e-3);
  const auto bad = tail_bound_check(g, {1.0, 0.2, 1.0, 0.0});
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(std::abs(bad.worst_xi), 0.19, 0.02);
  EXPECT_LT(bad.margin, 0.0);
}

TEST(TailBoundCheck, TwoPointHasNoDecay) {
  const auto t = make_two_point(kGrid);
  // |cos| keeps returning to 1, so any c is beaten once (1+xi)^mu > c on the grid
  for (double mu : {0.5, 1.0, 2.0}) {
    EXPECT_FALSE(tail_bound_check(t, {5.0, 1.0, mu, 0.0}).pass) << mu;
    EXPECT_FALSE(tail_bound_check(t, {5.0, 1.0, mu, 40.0 - std::numbers::pi - 1.0}).pass) << mu;
  }
}

TEST(UniformTailPropagation, SingleSnapshotAndFailureTime) {
  const auto g = make_gaussian(kGrid);
  const TailBound b{1.1, 0.2, 1.0, 0.0};
  const auto one = uniform_tail_propagation(trajectory_of({g}), b);
  EXPECT_EQ(one.pass, tail_bound_check(g, b).pass);
  auto cosine = make_two_point(kGrid).with_meta(kMp, 2.0, SpectralKind::scaled);
  const auto r = uniform_tail_propagation(trajectory_of({g, cosine}), b);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.first_failure_time.has_value());
  EXPECT_EQ(*r.first_failure_time, 2.0);
}

TEST(FitTailBound, TightAndScaled) {
  const auto g = make_gaussian(kGrid);
  const auto b = fit_tail_bound(g, 1.0, 1.0, 0.0, 2.0);
  EXPECT_TRUE(tail_bound_check(g, b).pass);
  EXPECT_FALSE(tail_bound_check(g, {b.c / 2.0 * 0.999, 1.0, 1.0, 0.0}).pass);
}

TEST(DecayRateFit, ExactExponential) {
  std::vector<double> ts, ds;
  for (int i = 0; i <= 20; ++i) {
    ts.push_back(0.5 * i);
    ds.push_back(std::exp(-0.1 * ts.back()));
  }
  const auto f = decay_rate_fit_series(ts, ds, 0.05, 0.0, 10.0);
  EXPECT_NEAR(f.rate, -0.1, 1e-6);
  EXPECT_NEAR(f.intercept, 0.0, 1e-6);
  EXPECT_TRUE(f.bound_ok);
  EXPECT_EQ(f.n_points, 21);
  EXPECT_FALSE(decay_rate_fit_series(ts, ds, 0.2, 0.0, 10.0).bound_ok);
  // the window restricts the samples
  EXPECT_EQ(decay_rate_fit_series(ts, ds, 0.05, 2.0, 5.0).n_points, 7);
}

TEST(DecayRateFit, DegenerateAndShortSeries) {
  const std::vector<double> ts{0, 1, 2, 3, 4, 5};
  const std::vector<double> zero(6, 0.0);
  EXPECT_THROW(decay_rate_fit_series(ts, zero, 0.1, 0.0, 5.0), DegenerateFit);
  const std::vector<double> ds{1, 0.9, 0.8, 0.7, 0.6, 0.5};
  EXPECT_THROW(decay_rate_fit_series(ts, ds, 0.1, 0.0, 3.0), InvalidArgument);

  const auto g = make_gaussian(kGrid, kMp, SpectralKind::scaled);
  std::vector<SpectralState> snaps;
  for (int i = 0; i < 6; ++i) snaps.push_back(g.with_meta(kMp, i, SpectralKind::scaled));
  EXPECT_THROW(decay_rate_fit(trajectory_of(snaps), g, 2.5, 0.0, 5.0), DegenerateFit);
}

TEST(SobolevNorm, ClosedForms) {
  const auto g = make_gaussian(kGrid);
  EXPECT_NEAR(sobolev_norm(g, 0.0), kSqrtPi, 1e-6);
  EXPECT_NEAR(sobolev_norm(g, 1.0), kSqrtPi / 2.0, 1e-6);
  std::vector<cplx> z(kGrid.n_points(), 0.0);
  z[kGrid.center()] = 1.0;
  EXPECT_NEAR(sobolev_norm(SpectralState(kGrid, z), 1.0), 0.0, 1e-300);
  EXPECT_THROW(sobolev_norm(g, -1.0), InvalidArgument);
}

TEST(SobolevNorm, MonotoneInModulus) {
  const auto narrow = make_gaussian(kGrid);
  const auto wide = make_from_function(kGrid, [](double x) { return cplx(std::exp(-0.25 * x * x)); });
  for (double eta : {0.0, 0.5, 1.0, 2.0}) EXPECT_GT(sobolev_norm(wide, eta), sobolev_norm(narrow, eta));
}

TEST(SobolevGrowthConstant, ClosedForms) {
  EXPECT_NEAR(sobolev_growth_constant(kMp, 1.0), 18.3462444660403844077, 1e-12);
  EXPECT_NEAR(sobolev_growth_constant(MixingParams(0.5, 0.5), 0.0), 0.75, 1e-15);
  EXPECT_NEAR(sobolev_growth_constant(MixingParams(0.5, 0.5), 0.5), 2.5, 1e-15);
  EXPECT_NEAR(sobolev_growth_constant(MixingParams(0.9, 0.2), 2.0), 1561.97175439042151434, 1e-9);
  const double e = std::sqrt(0.5);
  EXPECT_NEAR(sobolev_growth_constant(MixingParams(e, e), 0.0), std::sqrt(2.0) - 1.0, 1e-14);
}

TEST(SobolevUniformity, SyntheticSeries) {
  std::vector<double> ts, flat, growing, saturating;
  for (int i = 0; i <= 30; ++i) {
    const double t = 0.5 * i;
    ts.push_back(t);
    flat.push_back(3.0);
    growing.push_back(std::exp(t));
    saturating.push_back(2.0 - std::exp(-t));
  }
  const auto f = sobolev_uniformity_ratios(ts, flat, 1.0);
  EXPECT_TRUE(f.pass);
  EXPECT_DOUBLE_EQ(f.max_ratio, 1.0);
  EXPECT_FALSE(sobolev_uniformity_ratios(ts, growing, 1.0).pass);
  EXPECT_TRUE(sobolev_uniformity_ratios(ts, saturating, 1.0).pass);
}

TEST(SobolevUniformity, StationaryTrajectory) {
  const auto e = make_explicit_steady(kGrid, kMp, SpectralKind::scaled);
  std::vector<SpectralState> snaps;
  for (int i = 0; i < 10; ++i) snaps.push_back(e.with_meta(kMp, i, SpectralKind::scaled));
  const auto r = sobolev_uniformity_check(trajectory_of(snaps), 1.0, 1.0);
  EXPECT_TRUE(r.pass);
  for (double x : r.ratio) EXPECT_DOUBLE_EQ(x, r.ratio.front());
}

TEST(L1Distance, IdentityAndGridStability) {
  const auto g = make_gaussian(kGrid);
  EXPECT_EQ(l1_distance(g, g), 0.0);
  const double coarse = l1_distance(g, make_explicit_steady(kGrid));
  const FrequencyGrid fine(40.0, 8193);
  const double refined = l1_distance(make_gaussian(fine), make_explicit_steady(fine), 20.0, 8193);
  EXPECT_GT(coarse, 0.0);
  EXPECT_NEAR(coarse, refined, 1e-3);
}

TEST(L1Distance, MetricProperties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.3, 1.5);
  auto random_state = [&] {
    const double a = u(rng), b = u(rng), w = u(rng) / 1.5;
    return make_from_function(kGrid, [=](double x) {
      return cplx(w * std::exp(-0.5 * a * x * x) + (1 - w) * std::exp(-0.5 * b * x * x));
    });
  };
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_state(), b = random_state(), c = random_state();
    const double ab = l1_distance(a, b), ba = l1_distance(b, a);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, ba, 1e-15);
    EXPECT_LE(ab, l1_distance(a, c) + l1_distance(c, b) + 1e-12);
  }
}

TEST(L1Distance, InvariantUnderCommonShift) {
  const auto a = make_gaussian(kGrid);
  const auto b = make_explicit_steady(kGrid);
  const cplx i(0.0, 1.0);
  // a whole number of velocity-grid cells, so the trapezoid sees the same samples
  const double shift_v = 72 * (40.0 / 4096);
  const auto shift = [&](const SpectralState& s) {
    return make_from_function(kGrid, [&](double x) { return std::exp(i * shift_v * x) * s.eval(x); });
  };
  // the algebraic tail of the steady density moves ~1e-6 of mass across |v| = 20
  EXPECT_NEAR(l1_distance(shift(a), shift(b)), l1_distance(a, b), 1e-6);
}

TEST(MetricsCsv, Header) {
  std::ostringstream os;
  const std::vector<MetricRow> rows{{0.5, 0.25, 0.125, 1.0, 2.0}};
  write_metrics_csv(os, rows);
  EXPECT_EQ(os.str(), "t,d_alpha,sup,l1,sobolev_eta\n0.5,0.25,0.125,1,2\n");
}
