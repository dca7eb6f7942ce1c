#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "levyeq/interval.hpp"

namespace levyeq {

using RealFunction = std::function<double(double)>;

enum class TailDecay { compact, exponential, gaussian, polynomial };

/// Outcome of one quadrature call.
///
/// `divergent` is set when the error estimate failed to shrink by a factor of
/// two across four consecutive refinement rounds, or when the integrand blew
/// up away from an endpoint. A divergent result still carries the last
/// partial sum in `value`, which callers must not use as a number.
struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int refinement_rounds = 0;
  bool converged = true;
  bool divergent = false;

  QuadratureResult& operator+=(const QuadratureResult& other);
};

struct IntegrationHints {
  /// Decay of the integrand at an infinite end; selects the substitution
  /// (1/t for polynomial tails, log for exponential and gaussian ones).
  TailDecay tail = TailDecay::exponential;
  /// Interior points where the integrand may have a kink or a jump.
  std::vector<double> breakpoints;
};

inline constexpr double kBoundTolerance = 1e-9;
inline constexpr double kMonteCarloTolerance = 1e-6;

/// Integral of `f` over ]lo, hi] (either end may be infinite).
///
/// The interval is split at 0 and at every hint breakpoint; each piece is
/// mapped onto a bounded interval and integrated with tanh-sinh rules of
/// halving step, which also absorbs integrable endpoint singularities.
QuadratureResult integrate(const RealFunction& f, const Interval& interval, const IntegrationHints& hints = {},
                           double tol = kBoundTolerance);

/// Points of ]lo, hi[ where `g` changes sign, located by sampling `samples`
/// points (in the same coordinates `integrate` uses) and bisecting each
/// bracket to machine precision.
std::vector<double> sign_changes(const RealFunction& g, const Interval& interval, TailDecay tail, int samples = 64);

/// Inverse-CDF table for a finite measure restricted to a region.
///
/// The region is cut into cells whose mass is at most 1/(4 * resolution) of
/// the total, so linear interpolation inside a cell is off by at most that
/// much in probability. Infinite ends are cut where the remaining tail mass
/// drops below 1e-13 of the total.
class QuantileTable {
 public:
  struct Cell {
    double y0, y1;  // jump-size span
    double u0, u1;  // cumulative probability at the ends
  };

  QuantileTable(Region region, double mass, std::vector<Cell> cells);

  const Region& region() const { return region_; }
  /// Total mass of the measure on the region, as computed by quadrature.
  double mass() const { return mass_; }
  const std::vector<Cell>& cells() const { return cells_; }

  /// Quantile for u in [0, 1]; u = 0 gives the left end, u = 1 the right end
  /// (or the tail cutoff).
  double quantile(double u) const;
  /// Piecewise-linear CDF of the table, the inverse of `quantile`.
  double cdf(double y) const;

 private:
  Region region_;
  double mass_ = 0.0;
  std::vector<Cell> cells_;
};

/// Builds a table for the density `density` on `region`. `mass` is the
/// quadrature value of the density over the region. Cell boundaries always
/// include `breakpoints` that fall inside the region.
QuantileTable build_quantile_table(const RealFunction& density, const Region& region, double mass, int resolution,
                                   TailDecay tail, std::span<const double> breakpoints = {});

}  // namespace levyeq
