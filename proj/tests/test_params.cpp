#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "maxwell1d/params.hpp"

using namespace maxwell1d;

namespace {
const double kElastic = std::sqrt(0.5);
}

TEST(MixingParams, RejectsOrderingAndSign) {
  EXPECT_THROW(MixingParams(0.3, 0.7), InvalidArgument);
  EXPECT_THROW(MixingParams(0.5, 0.0), InvalidArgument);
  EXPECT_THROW(MixingParams(0.5, -0.1), InvalidArgument);
  EXPECT_THROW(MixingParams(NAN, 0.1), InvalidArgument);
  EXPECT_NO_THROW(MixingParams(0.5, 0.5));
}

TEST(MixingParams, Jacobian) {
  EXPECT_NEAR(MixingParams(0.7, 0.3).jacobian(), 0.4, 1e-15);
  EXPECT_EQ(MixingParams(0.5, 0.5).jacobian(), 0.0);
}

TEST(SFunction, ZeroAtZero) {
  for (double p : {0.3, 0.7, 0.9, 1.2})
    for (double q : {0.05, 0.2, 0.3}) EXPECT_EQ(s_function(MixingParams(p, q), 0.0), 0.0);
}

TEST(SFunction, UnitLineVanishesAtOne) {
  for (double p : {0.5, 0.6, 0.7, 0.85, 0.95}) {
    EXPECT_NEAR(s_function(MixingParams(p, 1.0 - p), 1.0), 0.0, 1e-14) << p;
  }
}

TEST(SFunction, ClosedFormValues) {
  EXPECT_NEAR(s_function(MixingParams(0.7, 0.3), 0.5), -0.0157415568228380313, 1e-15);
  EXPECT_NEAR(s_function(MixingParams(0.5, 0.5), 0.25), -0.0170517923731427285, 1e-15);
  EXPECT_THROW(s_function(MixingParams(0.7, 0.3), -0.1), InvalidArgument);
}

TEST(DeltaTilde, UnitLineAndElastic) {
  EXPECT_NEAR(*delta_tilde(MixingParams(0.7, 0.3)), 1.0, 1e-9);
  EXPECT_NEAR(*delta_tilde(MixingParams(kElastic, kElastic)), 1.0, 1e-9);
}

TEST(DeltaTilde, InteriorRoot) {
  // S(0.75, 0.2, .) changes sign at 0.4285978604758123
  const auto d = delta_tilde(MixingParams(0.75, 0.2));
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(*d, 0.4285978604758123, 1e-9);
}

TEST(DeltaTilde, AbsentWhenPositiveNearZero) {
  EXPECT_FALSE(delta_tilde(MixingParams(1.5, 0.1)).has_value());
  EXPECT_FALSE(delta_tilde(MixingParams(0.8, 0.1)).has_value());
}

TEST(DeltaTilde, EnergyProducingPairIsAdmissible) {
  // S(1.2, 0.3, .) is negative on all of (0, 1]
  EXPECT_NEAR(*delta_tilde(MixingParams(1.2, 0.3)), 1.0, 1e-9);
}

TEST(GevreyExponent, Anchors) {
  EXPECT_NEAR(gevrey_exponent(MixingParams(0.7, 0.3)), 1.0, 1e-12);
  EXPECT_NEAR(gevrey_exponent(MixingParams(kElastic, kElastic)), 2.0, 1e-12);
  EXPECT_NEAR(gevrey_exponent(MixingParams(0.6, 0.3)), 0.859417847201045, 1e-12);
  EXPECT_NEAR(gevrey_exponent(MixingParams(0.8, 0.5)), 1.678522579055930, 1e-12);
}

TEST(GevreyExponent, NoRootForLargeP) {
  EXPECT_THROW(gevrey_exponent(MixingParams(1.0, 0.3)), NoRoot);
  EXPECT_THROW(gevrey_exponent(MixingParams(1.1, 0.2)), NoRoot);
}

TEST(GevreyExponent, RootBeyondBracketIsAbsentInClassify) {
  const double p = std::nextafter(1.0, 0.0); // lattice endpoints can round to this
  ASSERT_LT(p, 1.0);
  EXPECT_THROW(gevrey_exponent(MixingParams(p, p)), NoRoot);
  EXPECT_FALSE(classify(MixingParams(p, p)).lambda.has_value());
}

TEST(GevreyExponent, RootResidualAndIncreasingInP) {
  // p^l + q^l falls in l and rises in p, so a larger p needs a larger l
  double prev = 0.0;
  for (double p = 0.31; p < 0.99; p += 0.04) {
    const MixingParams mp(p, 0.3);
    const double l = gevrey_exponent(mp);
    EXPECT_LT(std::abs(std::pow(p, l) + std::pow(0.3, l) - 1.0), 1e-12);
    EXPECT_GT(l, prev) << p;
    prev = l;
  }
}

TEST(JacobianR, Values) {
  EXPECT_NEAR(jacobian_r(MixingParams(0.7, 0.3)), 4.76190476190476190, 1e-13);
  EXPECT_DOUBLE_EQ(jacobian_r(MixingParams(0.5, 0.5)), 4.0);
  EXPECT_LT(jacobian_r(MixingParams(1.1, 0.2)), 0.0);
  EXPECT_THROW(jacobian_r(MixingParams(kElastic, kElastic)), ElasticSingularity);
}

TEST(LyapunovCoefficient, Values) {
  EXPECT_NEAR(lyapunov_coefficient(MixingParams(0.7, 0.3)), 0.895, 1e-15);
  EXPECT_NEAR(lyapunov_coefficient(MixingParams(kElastic, kElastic)), 1.0, 1e-15);
  EXPECT_NEAR(lyapunov_coefficient(MixingParams(0.5, 0.5)), 0.875, 1e-15);
}

TEST(Classify, Dissipative) {
  const auto r = classify(MixingParams(0.7, 0.3));
  EXPECT_EQ(r.regime, Regime::dissipative);
  EXPECT_NEAR(*r.r, 4.7619047619047619, 1e-12);
  EXPECT_NEAR(*r.lambda, 1.0, 1e-12);
  EXPECT_NEAR(*r.delta_tilde, 1.0, 1e-9);
  EXPECT_TRUE(r.admissible);
}

TEST(Classify, Elastic) {
  const auto r = classify(MixingParams(kElastic, kElastic));
  EXPECT_EQ(r.regime, Regime::elastic);
  EXPECT_FALSE(r.r.has_value());
  EXPECT_NEAR(*r.lambda, 2.0, 1e-12);
  EXPECT_TRUE(r.admissible);
}

TEST(Classify, EnergyProducing) {
  const auto r = classify(MixingParams(1.1, 0.2));
  EXPECT_EQ(r.regime, Regime::energy_producing);
  EXPECT_LT(*r.r, 0.0);
  EXPECT_FALSE(r.lambda.has_value());
  EXPECT_EQ(r.admissible, r.delta_tilde.has_value());
  EXPECT_STREQ(to_string(r.regime), "energy-producing");
}

TEST(Classify, AdmissibleImpliesNegativeAtHalfDelta) {
  for (double p = 0.1; p <= 1.6; p += 0.1) {
    for (double q = 0.05; q <= p; q += 0.1) {
      const auto r = classify(MixingParams(p, q));
      if (r.admissible) {
        EXPECT_LT(s_function(r.params, *r.delta_tilde / 2), 0.0) << p << "," << q;
      }
      if (r.r) {
        EXPECT_EQ(*r.r > 0.0, r.regime == Regime::dissipative);
      }
    }
  }
}

TEST(SweepRegion, DegenerateGridIsSingleCell) {
  const auto cells = sweep_region({0.7, 0.7}, {0.3, 0.3}, 5);
  ASSERT_EQ(cells.size(), 1u);
  const auto ref = classify(MixingParams(0.7, 0.3));
  EXPECT_EQ(cells[0].regime, ref.regime);
  EXPECT_EQ(cells[0].lambda, ref.lambda);
  EXPECT_EQ(cells[0].delta_tilde, ref.delta_tilde);
}

TEST(SweepRegion, OrderingAndRestriction) {
  const auto cells = sweep_region({0.1, 1.0}, {0.1, 1.0}, 10);
  EXPECT_EQ(cells.size(), 55u);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto& a = cells[i - 1].params;
    const auto& b = cells[i].params;
    EXPECT_TRUE(a.p() < b.p() || (a.p() == b.p() && a.q() < b.q()));
    EXPECT_LE(b.q(), b.p());
  }
}

TEST(SweepRegion, UnitLineCellsHaveLambdaOne) {
  const auto cells = sweep_region({0.5, 0.9}, {0.1, 0.5}, 5);
  int on_line = 0;
  for (const auto& c : cells) {
    if (std::abs(c.params.p() + c.params.q() - 1.0) < 1e-12) {
      ++on_line;
      EXPECT_NEAR(*c.lambda, 1.0, 1e-10);
    }
  }
  EXPECT_EQ(on_line, 5);
}

TEST(SweepRegion, CoarseGridContainsKnownAdmissiblePoints) {
  const auto cells = sweep_region({0.04, 2.0}, {0.04, 2.0}, 50);
  auto admissible_near = [&](double p, double q) {
    for (const auto& c : cells) {
      if (std::abs(c.params.p() - p) < 0.021 && std::abs(c.params.q() - q) < 0.021 && c.admissible)
        return true;
    }
    return false;
  };
  EXPECT_TRUE(admissible_near(0.7, 0.3));
  EXPECT_TRUE(admissible_near(kElastic, kElastic));
  EXPECT_TRUE(admissible_near(1.0, 1.0));
  EXPECT_TRUE(classify(MixingParams(1.0, 1.0)).admissible);
}

TEST(SweepRegion, RejectsBadRanges) {
  EXPECT_THROW(sweep_region({0.0, 1.0}, {0.1, 1.0}, 3), InvalidArgument);
  EXPECT_THROW(sweep_region({0.1, 2.5}, {0.1, 1.0}, 3), InvalidArgument);
  EXPECT_THROW(sweep_region({0.1, 1.0}, {0.1, 1.0}, 0), InvalidArgument);
}

TEST(SweepCsv, FormatAndNA) {
  const auto cells = sweep_region({kElastic, kElastic}, {kElastic, kElastic}, 1);
  std::ostringstream os;
  write_sweep_csv(os, cells);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "p,q,regime,r,lambda,delta_tilde,admissible");
  EXPECT_NE(s.find(",elastic,NA,"), std::string::npos);
  EXPECT_NE(s.find("0.70710678118654757"), std::string::npos);
  EXPECT_NE(s.find(",true\n"), std::string::npos);
}
