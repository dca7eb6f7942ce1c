#include <cmath>

#include <gtest/gtest.h>

#include "levyeq/errors.hpp"
#include "levyeq/likelihood.hpp"
#include "support.hpp"

namespace levyeq {
namespace {

TEST(LogDensity, IdentityRatioIsZero) {
  const auto spec = testing::identity_spec();
  const JumpPath p{2.0, 0.0, {{0.3, 0.6}, {1.1, 0.9}}};
  const auto u = log_density_u(p, spec, Region::real_line());
  EXPECT_FALSE(u.singular);
  EXPECT_EQ(u.value, 0.0);
}

TEST(LogDensity, EmptyPathIsMinusCompensator) {
  const auto spec = testing::linear_spec();
  // int (y - 1) dy over ]0, 1] = -1/2.
  const auto u = log_density_u(JumpPath{3.0, 0.0, {}}, spec, Region::real_line());
  EXPECT_NEAR(u.value, 1.5, 1e-12);
}

TEST(LogDensity, OneJumpArithmetic) {
  const RealFunction rho = [](double) { return 2.0; };
  const auto u = log_density_u(JumpPath{1.0, 0.0, {{0.5, 0.7}}}, rho, 0.3, Region::real_line());
  EXPECT_NEAR(u.value, std::log(2.0) - 0.3, 1e-15);
  EXPECT_NEAR(u.value, 0.3931471805599453, 1e-12);
}

TEST(LogDensity, VanishingRatioIsSingular) {
  const RealFunction rho = [](double y) { return y > 0.5 ? 0.0 : 1.0; };
  const JumpPath p{1.0, 0.0, {{0.5, 0.7}}};
  const auto u = log_density_u(p, rho, 0.0, Region::real_line());
  EXPECT_TRUE(u.singular);
  EXPECT_EQ(u.value, -kInf);
  const auto floored = log_density_u(p, rho, 0.0, Region::real_line(), {1e-3});
  EXPECT_FALSE(floored.singular);
  EXPECT_NEAR(floored.value, std::log(1e-3), 1e-15);
}

TEST(LogDensity, JumpOutsideRegionIsRejected) {
  const RealFunction rho = [](double) { return 1.0; };
  EXPECT_THROW(log_density_u(JumpPath{1.0, 0.0, {{0.5, 0.1}}}, rho, 0.0, Region::outside_identity(2)), ArgumentError);
}

TEST(LikelihoodFrame, LinearRegionSplit) {
  const auto spec = testing::linear_spec();
  const auto disc = discretize(spec, 2);
  const LikelihoodFrame frame(spec, disc, Region{{0.5, 1.0}});
  EXPECT_NEAR(frame.discretization_error(), 1.0 / 16.0, 1e-12);
  EXPECT_NEAR(frame.positive_part(), 1.0 / 32.0, 1e-12);
  EXPECT_NEAR(frame.negative_part(), 1.0 / 32.0, 1e-12);
  EXPECT_NEAR(frame.compensator_rho(), frame.compensator_bar(), 1e-14);
}

TEST(LikelihoodFrame, FullLineMatchesDiscretizationError) {
  for (const auto& spec : {testing::linear_spec(), make_example1(1.0, 1.0)}) {
    const auto disc = discretize(spec, 4);
    const LikelihoodFrame frame(spec, disc, Region::real_line());
    EXPECT_NEAR(frame.discretization_error(), discretization_error(spec, disc).total(), 1e-9);
  }
}

TEST(RatioSplit, PiecewiseConstantRatioGivesOne) {
  // rho = 2 is its own discretization away from the identity region.
  const auto spec = testing::uniform_spec({{"kind", "linear"}, {"intercept", 2.0}, {"slope", 0.0}});
  const auto disc = discretize(spec, 4);
  const JumpPath p{1.0, 0.0, {{0.2, 0.3}, {0.4, 0.8}}};
  const auto r = ratio_split(p, spec, disc, Region::outside_identity(4));
  EXPECT_NEAR(r.a_plus, 0.0, 1e-14);
  EXPECT_NEAR(r.a_minus, 0.0, 1e-14);
  EXPECT_NEAR(r.ratio, 1.0, 1e-14);
}

TEST(RatioSplit, EmptyPath) {
  const auto spec = testing::linear_spec();
  const auto disc = discretize(spec, 2);
  const Region region{{0.5, 1.0}};
  const auto r = ratio_split(JumpPath{2.0, 0.0, {}}, spec, disc, region);
  // int (rho_bar - rho) dnu_tilde over the bin is 0 by mass preservation.
  EXPECT_NEAR(r.ratio, 1.0, 1e-14);
  EXPECT_NEAR(r.a_plus, 2.0 / 32.0, 1e-12);
  EXPECT_NEAR(r.a_minus, -2.0 / 32.0, 1e-12);
}

TEST(RatioSplit, ConsistentWithLogDensities) {
  const auto spec = testing::example3_spec(0.5);
  const int m = 4;
  const auto disc = discretize(spec, m);
  const Region region = Region::outside_identity(m);
  const LikelihoodFrame frame(spec, disc, region);
  const CompoundPoissonSampler sampler(spec, region, 4096, disc.grid().boundaries());
  for (std::uint64_t i = 0; i < 300; ++i) {
    RandomStream rng(21, i);
    const auto path = sampler.sample(1.5, 0.0, rng);
    const auto r = ratio_split(path, frame);
    ASSERT_FALSE(r.singular);
    EXPECT_GE(r.a_plus, 0.0);
    EXPECT_LE(r.a_minus, 0.0);
    EXPECT_NEAR(std::log(r.ratio), r.a_plus + r.a_minus, 1e-12 * (1.0 + std::abs(r.a_plus)));
    EXPECT_NEAR(r.ratio, std::exp(r.u_bar - r.u_value), 1e-12 * r.ratio);
    const auto u = log_density_u(path, spec, region);
    EXPECT_NEAR(u.value, r.u_value, 1e-9);
    const auto ubar = log_density_u(path, disc, spec, region);
    EXPECT_NEAR(ubar.value, r.u_bar, 1e-9);
  }
}

TEST(RatioSplit, SingularWhenRhoVanishesAtAJump) {
  DominatingMeasure dom{[](double y) { return (y > 0.0 && y <= 1.0) ? 1.0 : 0.0; }, Region{{0.0, 1.0}}, 0.0,
                        TailDecay::compact};
  const MeasureSpec spec(dom, [](double y) { return y > 0.75 ? 0.0 : 1.0; }, {}, CustomParams{},
                         nlohmann::json::object());
  const auto disc = discretize(spec, 2);
  const JumpPath p{1.0, 0.0, {{0.5, 0.9}}};
  const auto r = ratio_split(p, spec, disc, Region::outside_identity(2));
  EXPECT_TRUE(r.singular);
  EXPECT_EQ(r.u_value, -kInf);
  const auto floored = ratio_split(p, spec, disc, Region::outside_identity(2), kBoundTolerance, {1e-6});
  EXPECT_FALSE(floored.singular);
  EXPECT_TRUE(std::isfinite(floored.ratio));
}

}  // namespace
}  // namespace levyeq
