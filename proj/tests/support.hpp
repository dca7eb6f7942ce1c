#pragma once

#include <cmath>
#include <functional>

#include "levyeq/measures.hpp"

namespace levyeq::testing {

// Values frozen from 30-digit mpmath runs.
namespace oracle {
inline constexpr double kEx2TailMass = 0.089073855890780345;     // int_1^inf e^{-y^2} y^{-2} dy
inline constexpr double kEx2TailMedian = 1.16566748075859404;    // median of that law on ]1, inf[
inline constexpr double kEx2BinRatioHalfOne = 0.618635872172098262;  // lambda = 1, bin ]0.5, 1]
inline constexpr double kSinh0_4375 = 0.903181772206241061;      // 2 sinh(0.4375)
inline constexpr double kSinhSixteenth = 0.125081396104383643;   // 2 sinh(1/16)
inline constexpr double kEx3HellingerQuarter = 0.157918624901732155;
inline constexpr double kEx3HellingerHalf = 0.165190169677562869;
inline constexpr double kEx3HellingerThreeQuarters = 0.183524493742031164;
}  // namespace oracle

/// Composite Simpson rule in long double on [a, b]; a test-only quadrature
/// independent of the library's tanh-sinh code.
inline long double simpson(const std::function<long double(long double)>& f, long double a, long double b,
                           int panels = 200000) {
  if (panels % 2) ++panels;
  const long double h = (b - a) / panels;
  long double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0L : 2.0L) * f(a + i * h);
  return sum * h / 3.0L;
}

/// int_lo^hi e^{-lambda y^2} y^{-2} dy for 0 < lo < hi <= inf, through
/// y = 1/t, which turns it into int e^{-lambda / t^2} dt over [1/hi, 1/lo].
inline long double ex2_mass_oracle(long double lambda, long double lo, long double hi, int panels = 200000) {
  const long double t0 = std::isinf(static_cast<double>(hi)) ? 0.0L : 1.0L / hi;
  const long double t1 = 1.0L / lo;
  return simpson([lambda](long double t) { return t == 0.0L ? 0.0L : std::exp(-lambda / (t * t)); }, t0, t1,
                 panels);
}

/// Root of an increasing function by bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline MeasureSpec uniform_spec(const nlohmann::json& ratio, double lo = 0.0, double hi = 1.0) {
  return make_custom({{"kind", "uniform"}, {"lo", lo}, {"hi", hi}}, ratio);
}

inline MeasureSpec linear_spec() {
  return uniform_spec({{"kind", "linear"}, {"intercept", 0.0}, {"slope", 1.0}});
}

inline MeasureSpec identity_spec() { return uniform_spec({{"kind", "one"}}); }

inline MeasureSpec example3_spec(double alpha, double lambda1 = 1.5, double lambda2 = 2.0) {
  return make_example3({alpha, 1.0, 1.0, lambda1, lambda2, 1.0, 2.0});
}

}  // namespace levyeq::testing
