#pragma once

#include <vector>

#include "levyeq/grid.hpp"
#include "levyeq/measures.hpp"
#include "levyeq/simulate.hpp"

namespace levyeq {

struct LikelihoodOptions {
  /// When positive, ratios below the floor are raised to it instead of being
  /// reported as singular.
  double ratio_floor = 0.0;
};

/// Value of U_T for one path. `singular` is set (and value is -inf) when the
/// ratio vanishes at an observed jump.
struct LogDensity {
  double value = 0.0;
  bool singular = false;
};

struct LikelihoodReport {
  double u_value = 0.0;      // U_T^rho(x) = jump_sum - compensator
  double compensator = 0.0;  // T * int_R (rho - 1) dnu_tilde
  double jump_sum = 0.0;     // sum of ln rho(jump)
  double u_bar = 0.0;        // U_T^{rho_bar}(x)
  double a_plus = 0.0;       // >= 0
  double a_minus = 0.0;      // <= 0
  double ratio = 1.0;        // R_T^m = exp(a_plus + a_minus)
  bool singular = false;
};

/// Everything about (nu, nu_bar_m) restricted to a finite-activity region
/// that the likelihood computations need, integrated once.
///
/// The region is cut by the grid (and the identity region) into cells; per
/// cell the frame holds nu, nu_tilde and int |rho - rho_bar| dnu_tilde. The
/// split of that last integral into the parts where rho_bar >= rho and
/// rho > rho_bar uses the mass identity int (rho_bar - rho) dnu_tilde =
/// rho_bar nu_tilde(cell) - nu(cell), so both compensators agree to rounding.
class LikelihoodFrame {
 public:
  LikelihoodFrame(const MeasureSpec& spec, const DiscretizedMeasure& disc, Region region,
                  double tol = kBoundTolerance, int threads = 1);

  const Region& region() const { return region_; }
  const MeasureSpec& spec() const { return *spec_; }
  const DiscretizedMeasure& discretized() const { return *disc_; }

  /// int_R (rho - 1) dnu_tilde.
  double compensator_rho() const { return compensator_rho_; }
  /// int_R (rho_bar - 1) dnu_tilde.
  double compensator_bar() const { return compensator_bar_; }
  /// int over R where rho_bar >= rho of (rho_bar - rho) dnu_tilde.
  double positive_part() const { return positive_; }
  /// int over R where rho > rho_bar of (rho - rho_bar) dnu_tilde.
  double negative_part() const { return negative_; }
  /// D_m restricted to R.
  double discretization_error() const { return positive_ + negative_; }
  double error_estimate() const { return error_; }

  double ratio(double y) const { return spec_->ratio_unchecked(y); }
  double ratio_bar(double y) const { return disc_->ratio_at(y); }

 private:
  const MeasureSpec* spec_;
  const DiscretizedMeasure* disc_;
  Region region_;
  double compensator_rho_ = 0.0;
  double compensator_bar_ = 0.0;
  double positive_ = 0.0;
  double negative_ = 0.0;
  double error_ = 0.0;
};

/// sum ln ratio(jump) - T * compensator, for a path all of whose jumps lie in
/// `region`. Throws ArgumentError for a jump outside the region.
LogDensity log_density_u(const JumpPath& path, const RealFunction& ratio, double compensator, const Region& region,
                         const LikelihoodOptions& options = {});
/// U_T^rho against nu_tilde, with the compensator integrated over `region`.
LogDensity log_density_u(const JumpPath& path, const MeasureSpec& numerator, const Region& region,
                         double tol = kBoundTolerance, const LikelihoodOptions& options = {});
/// U_T^{rho_bar} for the discretized measure.
LogDensity log_density_u(const JumpPath& path, const DiscretizedMeasure& numerator, const MeasureSpec& spec,
                         const Region& region, double tol = kBoundTolerance, const LikelihoodOptions& options = {});

LikelihoodReport ratio_split(const JumpPath& path, const LikelihoodFrame& frame,
                             const LikelihoodOptions& options = {});
LikelihoodReport ratio_split(const JumpPath& path, const MeasureSpec& spec, const DiscretizedMeasure& disc,
                             const Region& region, double tol = kBoundTolerance,
                             const LikelihoodOptions& options = {});

}  // namespace levyeq
