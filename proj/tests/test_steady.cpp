#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "maxwell1d/steady.hpp"

using namespace maxwell1d;

namespace {
const MixingParams kMp(0.7, 0.3);
const FrequencyGrid kGrid(40.0, 4097);
constexpr double kTol = 1e-8;

// one fixed-point run shared by several tests
const SteadyResult& fixed_point() {
  static const SteadyResult r = fixed_point_steady(kMp, kGrid, 0.5, kTol);
  return r;
}
} // namespace

TEST(Residual, ExplicitSteadyOnUnitLine) {
  const auto s = make_explicit_steady(FrequencyGrid(40.0, 8193), kMp);
  EXPECT_LT(residual(s, kMp), 1e-8);
}

TEST(Residual, ExplicitSteadyOffLine) {
  const MixingParams mp(0.6, 0.3);
  EXPECT_GT(residual(make_explicit_steady(kGrid, mp), mp), 1e-2);
}

TEST(Residual, ConstantIsExact) {
  const auto one = make_from_function(kGrid, [](double) { return cplx(1.0); });
  EXPECT_EQ(residual(one, kMp), 0.0);
  const double e = std::sqrt(0.5);
  EXPECT_THROW(residual(one, MixingParams(e, e)), ElasticSingularity);
}

TEST(ContractionFactor, ClosedForm) {
  EXPECT_NEAR(contraction_factor(kMp, 0.5), 0.96686, 1e-5);
  EXPECT_THROW(contraction_factor(kMp, jacobian_r(kMp) - 2.0), InadmissibleDelta);
  EXPECT_GT(contraction_factor(kMp, jacobian_r(kMp) - 2.0 - 1e-9), 1e6);
}

TEST(ContractionFactor, BelowOneIffSNegative) {
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double p = 0.05 + 0.9 * i / 19.0;
      const double q = 0.02 + 0.9 * j / 19.0;
      if (q > p || p * p + q * q > 0.99) continue;
      const MixingParams mp(p, q);
      for (int k = 1; k <= 10; ++k) {
        const double delta = 0.1 * k;
        if (jacobian_r(mp) - 2.0 - delta <= 0.0) continue;
        EXPECT_EQ(contraction_factor(mp, delta) < 1.0, s_function(mp, delta) < 0.0)
            << p << "," << q << "," << delta;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(StationaryMap, PreservesNormalization) {
  // T(psi) - 1 + xi^2/2 carries a |xi|^r term (r = 3.6 here) that the variance
  // stencil does not cancel; its bias scales like h^{r-2}, hence the fine grid
  const MixingParams mp(0.6, 0.3);
  const StationaryMap T(mp);
  const FrequencyGrid fine(10.0, 8193);
  for (const auto& s : {make_gaussian(fine), make_explicit_steady(fine)}) {
    const auto r = check_normalization(T(s), 1e-5);
    EXPECT_TRUE(r.pass) << r.mass_err << " " << r.mean_err << " " << r.var_err;
  }
}

TEST(StationaryMap, ExplicitSteadyIsFixed) {
  const auto s = make_explicit_steady(kGrid, kMp);
  EXPECT_LT(sup_distance(StationaryMap(kMp)(s), s), 1e-6);
}

TEST(FixedPoint, MatchesExplicitSteady) {
  const auto& r = fixed_point();
  ASSERT_TRUE(r.converged);
  const auto ref = make_explicit_steady(kGrid, kMp);
  EXPECT_LT(fourier_distance_raw(r.state, ref, 2.5).value, 1e-4);
  EXPECT_LT(sup_distance(r.state, ref), 1e-4);
  EXPECT_EQ(r.state.kind(), SpectralKind::steady);
  EXPECT_EQ(r.state[kGrid.center()], cplx(1.0));
}

TEST(FixedPoint, RatiosBoundedByContractionFactor) {
  const auto& log = fixed_point().log;
  const double k = contraction_factor(kMp, 0.5);
  int measured = 0;
  for (std::size_t i = 5; i < log.size(); ++i) {
    // below ~1e-6 successive distances are dominated by discretisation noise
    if (log[i].d_distance < 1e-6) break;
    EXPECT_LE(log[i].d_distance / log[i - 1].d_distance, k + 0.05) << log[i].sweep;
    ++measured;
  }
  EXPECT_GT(measured, 20);
  for (const auto& row : log) EXPECT_LT(row.var_err, 1e-6) << row.sweep;
}

TEST(FixedPoint, IdempotentAtOutput) {
  const auto& s = fixed_point().state;
  const auto again = unit_variance_dilation(StationaryMap(kMp)(s));
  EXPECT_LT(fourier_distance_raw(again, s, 2.5).value, kTol);
}

TEST(FixedPoint, IndependentOfPointOnUnitLine) {
  const MixingParams mp(0.6, 0.4);
  const auto r = fixed_point_steady(mp, kGrid, 0.5, 1e-7);
  const auto ref = make_explicit_steady(kGrid, mp);
  EXPECT_LT(fourier_distance_raw(r.state, ref, 2.5).value, 1e-4);
  EXPECT_LT(sup_distance(r.state, ref), 1e-4);
}

TEST(FixedPoint, Inadmissible) {
  const double e = std::sqrt(0.5);
  EXPECT_THROW(fixed_point_steady(MixingParams(e, e), kGrid, 0.5, kTol), InadmissibleDelta);
  EXPECT_THROW(fixed_point_steady(MixingParams(0.8, 0.1), kGrid, 0.5, kTol), InadmissibleDelta);
  EXPECT_THROW(fixed_point_steady(kMp, kGrid, 0.0, kTol), InadmissibleDelta);
  EXPECT_THROW(fixed_point_steady(kMp, kGrid, 1.5, kTol), InadmissibleDelta);
}

TEST(FixedPoint, NoConvergenceReported) {
  EXPECT_THROW(fixed_point_steady(kMp, kGrid, 0.5, kTol, 3), NoConvergence);
}

TEST(GevreyFit, ExplicitSteady) {
  const auto f = gevrey_fit(make_explicit_steady(kGrid), 5.0);
  EXPECT_GE(f.lambda_fit, 0.95);
  EXPECT_LE(f.lambda_fit, 1.05);
  EXPECT_EQ(f.rho, 5.0);
}

TEST(GevreyFit, Gaussian) {
  const auto f = gevrey_fit(make_gaussian(kGrid), 3.0);
  EXPECT_GE(f.lambda_fit, 1.95);
  EXPECT_LE(f.lambda_fit, 2.05);
  EXPECT_NEAR(f.mu, 0.5, 1e-3);
}

TEST(GevreyFit, FixedPointOutput) {
  const auto f = gevrey_fit(fixed_point().state, 5.0);
  EXPECT_GE(f.lambda_fit, 0.9);
  EXPECT_LE(f.lambda_fit, 1.1);
}

TEST(GevreyFit, InsufficientTail) {
  EXPECT_THROW(gevrey_fit(make_gaussian(kGrid), 7.9), InsufficientTail);
}

TEST(TailCertificate, Examples) {
  const auto g = make_gaussian(kGrid);
  EXPECT_TRUE(tail_certificate(g, 1.0, 0.5, 2.0).pass);
  const auto bad = tail_certificate(g, 1.0, 0.6, 2.0);
  EXPECT_FALSE(bad.pass);
  EXPECT_LT(bad.margin, 0.0);
  EXPECT_TRUE(tail_certificate(make_explicit_steady(kGrid), 10.0, 0.5, 1.0).pass);
}

TEST(SweepLogCsv, Format) {
  std::ostringstream os;
  const std::vector<SweepLogRow> log{{1, 0.5, 0.25, 0.0}};
  write_sweep_log_csv(os, log);
  EXPECT_EQ(os.str(), "sweep,d_distance,sup_change,var_err\n1,0.5,0.25,0\n");
}
