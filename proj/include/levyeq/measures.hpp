#pragma once

#include <memory>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "levyeq/interval.hpp"
#include "levyeq/numerics.hpp"

namespace levyeq {

/// Reference Lévy measure, given by its density against Lebesgue measure.
struct DominatingMeasure {
  RealFunction density;
  /// Where the density may be nonzero; integrals are clipped to it.
  Region support;
  /// p such that density ~ c |y|^-p near 0 (0 when bounded there).
  double singularity_order = 0.0;
  TailDecay tail = TailDecay::compact;
};

// Class parameters, one struct per admissible family.
struct Example1Params {
  double lipschitz;  // L
  double bound_at_zero;  // K
};
struct Example2Params {
  double lambda;
  double epsilon;
  double upper;  // M
};
struct Example3Params {
  double alpha;
  double c1, c2;
  double lambda1, lambda2;
  double epsilon;
  double upper;  // M
};
struct CustomParams {};

using ClassParams = std::variant<Example1Params, Example2Params, Example3Params, CustomParams>;

/// A Lévy measure nu = rho * nu_tilde together with the family it was built
/// from. Always constructed from a configuration record so it can be written
/// back out unchanged.
class MeasureSpec {
 public:
  /// An empty `ratio_minus_one` falls back to ratio(y) - 1.
  MeasureSpec(DominatingMeasure dominating, RealFunction ratio, RealFunction ratio_minus_one, ClassParams params,
              nlohmann::json config);

  const DominatingMeasure& dominating() const { return dominating_; }
  const ClassParams& params() const { return params_; }
  const nlohmann::json& config() const { return config_; }
  /// "example1", "example2", "example3" or "custom".
  std::string class_name() const;

  /// rho(y). Throws DomainError at y = 0 for a singular dominating measure and
  /// outside the support.
  double ratio(double y) const;
  /// rho(y) without domain checks; used inside quadrature.
  double ratio_unchecked(double y) const { return ratio_(y); }
  /// rho(y) - 1 computed without cancellation (expm1 for the exponential
  /// ratios). Integrands against singular nu_tilde near 0 need this.
  double ratio_minus_one(double y) const { return ratio_m1_(y); }
  /// Density of nu against Lebesgue measure, rho * dnu_tilde/dy.
  double nu_density(double y) const;
  double tilde_density(double y) const { return dominating_.density(y); }

  /// The dominating measure itself as a spec (rho = 1).
  MeasureSpec dominating_spec() const;

 private:
  DominatingMeasure dominating_;
  RealFunction ratio_;
  RealFunction ratio_m1_;
  ClassParams params_;
  nlohmann::json config_;
};

/// Builds a spec from {"class": ..., "params": {...}}. Unknown keys and out of
/// range values raise ConfigError naming the field.
MeasureSpec measure_from_config(const nlohmann::json& config);

MeasureSpec make_example1(double lipschitz, double bound_at_zero);
MeasureSpec make_example1(double lipschitz, double bound_at_zero, const nlohmann::json& ratio,
                          const nlohmann::json& dominating);
MeasureSpec make_example2(double lambda, double epsilon, double upper);
MeasureSpec make_example3(const Example3Params& p);
MeasureSpec make_custom(const nlohmann::json& dominating, const nlohmann::json& ratio);

/// A scalar integral together with its quadrature error and convergence flags.
struct Scalar {
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
  bool converged = true;
};

Scalar to_scalar(const QuadratureResult& q);

struct Functionals {
  Scalar eta;         // int y nu(dy); not finite when the small-jump moment diverges
  Scalar gamma_star;  // int_{|y|<=1} y (nu - nu_tilde)(dy)
  Scalar hellinger;   // int (sqrt(rho) - 1)^2 dnu_tilde
  Scalar m4_moment;   // int_{|y|<=1} |y| nu(dy)
};

/// nu(]lo, hi]) with error estimate. Throws DivergenceError when the mass is
/// infinite (e.g. a neighbourhood of 0 under an infinite-activity measure).
QuadratureResult interval_mass(const MeasureSpec& spec, const Interval& interval, double tol = kBoundTolerance);
/// nu_tilde(]lo, hi]).
QuadratureResult tilde_mass(const MeasureSpec& spec, const Interval& interval, double tol = kBoundTolerance);
/// Mass of a region under nu.
QuadratureResult region_mass(const MeasureSpec& spec, const Region& region, double tol = kBoundTolerance);

/// int over `interval` of g(y) nu_tilde(dy), clipped to the support, with the
/// given kink points. Never throws on divergence; inspect the result.
QuadratureResult integrate_tilde(const MeasureSpec& spec, const RealFunction& g, const Interval& interval,
                                 std::vector<double> breakpoints = {}, double tol = kBoundTolerance);

Scalar hellinger_integral(const MeasureSpec& spec, double tol = kBoundTolerance);
Scalar small_jump_moment(const MeasureSpec& spec, double tol = kBoundTolerance);
Scalar eta_functional(const MeasureSpec& spec, double tol = kBoundTolerance);
Scalar gamma_star_functional(const MeasureSpec& spec, double tol = kBoundTolerance);
/// int_{|y|<=1} y nu(dy) alone; the compensated drift pieces of gamma_star.
Scalar truncated_mean(const MeasureSpec& spec, double tol = kBoundTolerance);

/// All four functionals. Throws ConditionError("M2") when the Hellinger
/// integral diverges.
Functionals functionals(const MeasureSpec& spec, double tol = kBoundTolerance);

/// Deterministic sample of 1001 points of the support, restricted to [-20, 20].
std::vector<double> support_sample(const MeasureSpec& spec);

}  // namespace levyeq
