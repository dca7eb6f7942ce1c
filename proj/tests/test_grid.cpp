#include <cmath>

#include <gtest/gtest.h>

#include "levyeq/errors.hpp"
#include "levyeq/grid.hpp"
#include "support.hpp"

namespace levyeq {
namespace {

namespace oracle = testing::oracle;

TEST(Grid, SizeIsTwoMSquared) {
  for (int m = 1; m <= 10; ++m) EXPECT_EQ(grid_intervals(m).size(), static_cast<std::size_t>(2 * m * m));
}

TEST(Grid, MEqualsOneIsTailsOnly) {
  const auto g = grid_intervals(1);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].span, (Interval{-kInf, -1.0}));
  EXPECT_EQ(g[1].span, (Interval{1.0, kInf}));
  EXPECT_EQ(g[0].tag.kind, BinTag::Kind::neg_tail);
  EXPECT_EQ(g[1].tag.kind, BinTag::Kind::pos_tail);
}

TEST(Grid, MEqualsTwoEnumeration) {
  const auto g = grid_intervals(2);
  const std::vector<Interval> expected{{-kInf, -2.0}, {-2.0, -1.5}, {-1.5, -1.0}, {-1.0, -0.5},
                                       {0.5, 1.0},    {1.0, 1.5},   {1.5, 2.0},   {2.0, kInf}};
  ASSERT_EQ(g.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(g[i].span, expected[i]) << i;
}

TEST(Grid, DisjointAscendingAndCovering) {
  for (int m = 1; m <= 10; ++m) {
    const auto g = grid_intervals(m);
    EXPECT_EQ(g[0].span.lo, -kInf);
    EXPECT_EQ(g[g.size() - 1].span.hi, kInf);
    double covered = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const auto& a = g[i].span;
      const auto& b = g[i + 1].span;
      if (a.hi == -1.0 / m) {
        EXPECT_DOUBLE_EQ(b.lo, 1.0 / m) << "gap must be the identity region";
      } else {
        EXPECT_EQ(a.hi, b.lo) << "m=" << m << " i=" << i;
      }
      if (a.bounded()) {
        EXPECT_NEAR(a.length(), 1.0 / m, 1e-12);
        covered += a.length();
      }
    }
    if (g[g.size() - 1].span.bounded()) covered += g[g.size() - 1].span.length();
    EXPECT_NEAR(covered, 2.0 * m - 2.0 / m, 1e-9);
  }
}

TEST(Grid, MEqualsTenHundredsOfBins) {
  const auto g = grid_intervals(10);
  EXPECT_EQ(g.size(), 200u);
  for (const auto& b : g.bins()) {
    if (b.span.bounded()) {
      EXPECT_NEAR(b.span.length(), 0.1, 1e-12);
    }
  }
}

TEST(Grid, ZeroIsAnArgumentError) { EXPECT_THROW(grid_intervals(0), ArgumentError); }

TEST(BinIndex, Membership) {
  const GridLayout g(2);
  EXPECT_EQ(g[*g.bin_index(0.75)].span, (Interval{0.5, 1.0}));
  EXPECT_EQ(g[*g.bin_index(-2.0)].tag.kind, BinTag::Kind::neg_tail);
  EXPECT_FALSE(g.bin_index(0.4).has_value());
  EXPECT_FALSE(g.bin_index(0.5).has_value());
  EXPECT_EQ(g[*g.bin_index(1.0)].span, (Interval{0.5, 1.0}));
  EXPECT_EQ(g[*g.bin_index(2.0)].span, (Interval{1.5, 2.0}));
  EXPECT_EQ(g[*g.bin_index(std::nextafter(2.0, 3.0))].tag.kind, BinTag::Kind::pos_tail);
}

TEST(BinIndex, ExactAtRationalBoundaries) {
  // Dyadic m: every boundary is a double, so stored spans are exact.
  for (int m : {2, 4, 8}) {
    const GridLayout g(m);
    for (const auto& b : g.bins()) {
      if (!b.span.bounded()) continue;
      const auto inside = g.bin_index(b.span.hi);
      ASSERT_TRUE(inside.has_value());
      EXPECT_EQ(g[*inside].span, b.span);
      EXPECT_EQ(g[*g.bin_index(0.5 * (b.span.lo + b.span.hi))].span, b.span);
    }
  }
  // Otherwise the double nearest (n+1)/m sits on one side of it, and the
  // lookup follows the exact rational, not the rounded span.
  for (int m : {3, 7, 10}) {
    const GridLayout g(m);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const auto& b = g[i];
      if (!b.span.bounded()) continue;
      const double y = b.span.hi;
      const double excess = std::fma(y, static_cast<double>(m), -static_cast<double>(b.numerator + 1));
      const auto idx = g.bin_index(y);
      if (excess <= 0.0) {
        ASSERT_TRUE(idx.has_value());
        EXPECT_EQ(*idx, i);
      } else if (idx) {
        EXPECT_EQ(*idx, i + 1);
      }
    }
  }
}

TEST(Discretize, IdentityRatio) {
  for (int m : {1, 2, 5}) {
    const auto d = discretize(testing::identity_spec(), m);
    for (double r : d.ratios()) EXPECT_EQ(r, 1.0);
    EXPECT_EQ(discretization_error(testing::identity_spec(), m).total(), 0.0);
  }
}

TEST(Discretize, LinearBinAverage) {
  const auto d = discretize(testing::linear_spec(), 2);
  for (std::size_t i = 0; i < d.grid().size(); ++i) {
    const double expected = d.grid()[i].span == Interval{0.5, 1.0} ? 0.75 : 1.0;
    EXPECT_NEAR(d.ratios()[i], expected, 1e-14) << i;
  }
}

TEST(Discretize, Example2BinRatioOracle) {
  const auto spec = make_example2(1.0, 0.5, 2.0);
  const auto d = discretize(spec, 2);
  const auto idx = *d.grid().bin_index(0.75);
  EXPECT_NEAR(d.ratios()[idx], oracle::kEx2BinRatioHalfOne, 1e-10);
  for (std::size_t i = 0; i < d.grid().size(); ++i) {
    const auto& span = d.grid()[i].span;
    if (span.lo < 0.0) continue;
    const double hi = span.hi;
    const long double nu = testing::ex2_mass_oracle(1.0L, span.lo, hi);
    const long double tilde = std::isinf(hi) ? 1.0L / span.lo : 1.0L / span.lo - 1.0L / hi;
    EXPECT_NEAR(d.ratios()[i], static_cast<double>(nu / tilde), 1e-10) << i;
  }
}

TEST(Discretize, PreservesNuMassOfEveryBin) {
  for (const auto& spec : {testing::linear_spec(), make_example1(1.0, 1.0), make_example2(1.2, 0.5, 2.0),
                           testing::example3_spec(0.5)}) {
    for (int m : {2, 4}) {
      const auto d = discretize(spec, m);
      for (std::size_t i = 0; i < d.grid().size(); ++i) {
        const double nu = interval_mass(spec, d.grid()[i].span).value;
        EXPECT_NEAR(d.ratios()[i] * d.tilde_masses()[i], nu, 1e-8) << spec.class_name() << " m=" << m;
      }
    }
  }
}

TEST(DiscretizationError, LinearClosedForm) {
  const auto d = discretization_error(testing::linear_spec(), 2);
  EXPECT_NEAR(d.total(), 0.4375, 1e-8);
  EXPECT_NEAR(d.identity.value, 0.375, 1e-8);
  EXPECT_NEAR(d.finite.value, 1.0 / 16.0, 1e-8);
  EXPECT_NEAR(d.tails.value, 0.0, 1e-15);
  EXPECT_NEAR(d.finite_positive, 1.0 / 16.0, 1e-8);
  EXPECT_EQ(d.finite_negative, 0.0);
}

TEST(DiscretizationError, Example1FiniteBinsWithinLipschitzEnvelope) {
  for (double L : {0.5, 1.0, 2.0}) {
    const auto spec = make_example1(L, 1.0);
    for (int m : {2, 4, 8}) {
      const auto d = discretization_error(spec, m);
      const double md = m;
      const double inner = tilde_mass(spec, {-md, -1.0 / md}).value + tilde_mass(spec, {1.0 / md, md}).value;
      EXPECT_LE(d.finite.value, L / md * inner + 1e-9) << "L=" << L << " m=" << m;
    }
  }
}

TEST(DiscretizationError, ComponentsSumAndSidesSplit) {
  const auto d = discretization_error(testing::example3_spec(0.5), 4);
  EXPECT_NEAR(d.finite_negative + d.finite_positive, d.finite.value, 1e-12);
  EXPECT_DOUBLE_EQ(d.total(), d.identity.value + d.finite.value + d.tails.value);
}

TEST(Discretize, PointwiseLipschitzForExample1) {
  for (double L : {0.5, 1.0, 2.0}) {
    const auto spec = make_example1(L, 1.0);
    for (int m : {4, 16}) {
      const auto d = discretize(spec, m);
      for (int k = 0; k <= 1000; ++k) {
        const double y = -m + 2.0 * m * k / 1000.0;
        if (std::abs(y) <= 1.0 / m) continue;
        EXPECT_LE(std::abs(spec.ratio(y) - d.ratio_at(y)), L / m + 1e-12) << "y=" << y;
      }
    }
  }
}

}  // namespace
}  // namespace levyeq
