#include <cmath>

#include <gtest/gtest.h>

#include "levyeq/numerics.hpp"
#include "support.hpp"

namespace levyeq {
namespace {

TEST(Integrate, PolynomialIsExact) {
  const auto q = integrate([](double y) { return y; }, {0.0, 1.0}, {TailDecay::compact, {}}, 1e-10);
  EXPECT_TRUE(q.converged);
  EXPECT_FALSE(q.divergent);
  EXPECT_NEAR(q.value, 0.5, 1e-12);
}

TEST(Integrate, PolynomialTail) {
  const auto q = integrate([](double y) { return 1.0 / (y * y); }, {1.0, kInf}, {TailDecay::polynomial, {}});
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, 1.0, 1e-9);
}

TEST(Integrate, EndpointSingularity) {
  const auto q = integrate([](double y) { return 1.0 / std::sqrt(y); }, {0.0, 1.0}, {TailDecay::compact, {}});
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, 2.0, 1e-9);
}

TEST(Integrate, GaussianTails) {
  const auto q = integrate([](double y) { return std::exp(-0.5 * y * y); }, {-kInf, kInf}, {TailDecay::gaussian, {}});
  EXPECT_NEAR(q.value, std::sqrt(2.0 * M_PI), 1e-9);
}

TEST(Integrate, NonIntegrableSingularitiesAreFlagged) {
  EXPECT_TRUE(integrate([](double y) { return 1.0 / y; }, {0.0, 1.0}, {TailDecay::compact, {}}).divergent);
  EXPECT_TRUE(integrate([](double y) { return std::pow(y, -1.5); }, {0.0, 1.0}, {TailDecay::compact, {}}).divergent);
}

TEST(Integrate, DivergentTailIsFlagged) {
  EXPECT_TRUE(integrate([](double y) { return 1.0 / y; }, {1.0, kInf}, {TailDecay::polynomial, {}}).divergent);
}

TEST(Integrate, KinkBreakpoint) {
  const auto q = integrate([](double y) { return std::abs(y - 0.3); }, {0.0, 1.0}, {TailDecay::compact, {0.3}});
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, 0.5 * (0.09 + 0.49), 1e-12);
}

TEST(Integrate, AdditiveOverAdjacentIntervals) {
  auto f = [](double y) { return std::exp(-y) * (1.0 + std::sin(3.0 * y)); };
  const IntegrationHints hints{TailDecay::exponential, {}};
  for (double b : {0.1, 0.7, 1.3, 4.0}) {
    const double whole = integrate(f, {0.0, kInf}, hints).value;
    const double split = integrate(f, {0.0, b}, hints).value + integrate(f, {b, kInf}, hints).value;
    EXPECT_NEAR(whole, split, 1e-9) << "cut at " << b;
  }
}

TEST(Integrate, Linear) {
  auto f = [](double y) { return std::exp(-y * y); };
  auto g = [](double y) { return 1.0 / (1.0 + y * y); };
  const IntegrationHints hints{TailDecay::compact, {}};
  const Interval iv{-2.0, 3.0};
  const double a = 1.7, b = -0.4;
  const double lhs = integrate([&](double y) { return a * f(y) + b * g(y); }, iv, hints).value;
  EXPECT_NEAR(lhs, a * integrate(f, iv, hints).value + b * integrate(g, iv, hints).value, 1e-10);
}

TEST(Integrate, AgreesWithIndependentSimpson) {
  auto f = [](double y) { return std::exp(-y) * std::cos(y) + y * y; };
  const double ours = integrate(f, {0.0, 2.0}, {TailDecay::compact, {}}).value;
  const long double ref =
      testing::simpson([](long double y) { return std::exp(-y) * std::cos(y) + y * y; }, 0.0L, 2.0L);
  EXPECT_NEAR(ours, static_cast<double>(ref), 1e-10);
}

TEST(SignChanges, FindsRootsOnBothHalfLines) {
  auto g = [](double y) { return std::sin(y); };
  const auto roots = sign_changes(g, {-kInf, kInf}, TailDecay::gaussian, 512);
  for (double target : {-M_PI, M_PI, 2.0 * M_PI}) {
    bool found = false;
    for (double r : roots) found = found || std::abs(r - target) < 1e-12;
    EXPECT_TRUE(found) << target;
  }
}

TEST(QuantileTable, UniformQuantiles) {
  auto density = [](double y) { return (y > 0.0 && y <= 1.0) ? 1.0 : 0.0; };
  const auto full = build_quantile_table(density, Region{{0.0, 1.0}}, 1.0, 1024, TailDecay::compact);
  EXPECT_NEAR(full.quantile(0.25), 0.25, 1e-12);
  const auto half = build_quantile_table(density, Region{{0.5, 1.0}}, 0.5, 1024, TailDecay::compact);
  EXPECT_NEAR(half.quantile(0.5), 0.75, 1e-12);
}

TEST(QuantileTable, RoundTrip) {
  auto density = [](double y) { return std::exp(-y) / std::sqrt(y); };
  const double mass = integrate(density, {0.0, kInf}, {TailDecay::exponential, {}}).value;
  const auto table = build_quantile_table(density, Region{{0.0, kInf}}, mass, 4096, TailDecay::exponential);
  for (int i = 1; i < 100; ++i) {
    const double u = i / 100.0;
    EXPECT_NEAR(table.cdf(table.quantile(u)), u, 1e-12);
  }
  for (std::size_t i = 1; i < table.cells().size(); ++i) {
    EXPECT_GE(table.cells()[i].u0, table.cells()[i - 1].u0);
  }
}

TEST(QuantileTable, ForcedBreakpointsAreCellEdges) {
  auto density = [](double y) { return (y > 0.0 && y <= 1.0) ? 2.0 * y : 0.0; };
  const std::vector<double> cuts{0.25, 0.5, 0.75};
  const auto table = build_quantile_table(density, Region{{0.0, 1.0}}, 1.0, 64, TailDecay::compact, cuts);
  for (double c : cuts) {
    bool edge = false;
    for (const auto& cell : table.cells()) edge = edge || cell.y1 == c;
    EXPECT_TRUE(edge) << c;
  }
}

}  // namespace
}  // namespace levyeq
