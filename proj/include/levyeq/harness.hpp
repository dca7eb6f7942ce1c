#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "levyeq/grid.hpp"
#include "levyeq/likelihood.hpp"
#include "levyeq/measures.hpp"
#include "levyeq/simulate.hpp"

namespace levyeq {

// ---------------------------------------------------------------------------
// Conditions

struct M3Entry {
  int m = 0;
  double value = 0.0;
  double error = 0.0;
  bool divergent = false;
};

struct ConditionReport {
  bool m1 = true;  // nu is entered as rho * nu_tilde
  Scalar m2;       // int (sqrt(rho) - 1)^2 dnu_tilde
  std::vector<M3Entry> m3;
  bool m3_nonincreasing = true;
  Scalar m4_nu;
  Scalar m4_tilde;

  bool m2_holds() const { return m2.finite && m2.converged; }
  bool m4_holds() const { return m4_nu.finite; }
};

/// M4 failing is a finding, not an error. Divergent M2 and M3 entries are
/// flagged in the report.
ConditionReport check_conditions(const MeasureSpec& spec, const std::vector<int>& m_list,
                                 double tol = kBoundTolerance, int threads = 1);

// ---------------------------------------------------------------------------
// Closed-form bounds

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

/// The closed-form bound terms for the spec's class at grid size m.
/// Custom specs have no terms. Throws ArgumentError for out-of-class params.
std::vector<BoundTerm> example_bound_terms(const MeasureSpec& spec, int m, double tol = kBoundTolerance);

/// Compares D_m against the class bound where one is proven.
/// `checked` is false when no proven bound applies.
struct BoundCheck {
  bool checked = false;
  bool holds = true;
  std::string detail;
};
BoundCheck check_bound(const MeasureSpec& spec, const DiscretizationError& d, const std::vector<BoundTerm>& terms);

// ---------------------------------------------------------------------------
// Sweeps

/// A finite parameter grid standing in for the class sup.
struct SweepFamily {
  std::string class_name;
  std::vector<std::string> param_names;
  std::vector<std::vector<double>> points;  // one row per spec
  std::vector<MeasureSpec> specs;
};

/// Default grid around a base spec: 9 log-spaced values per free parameter in
/// [epsilon, M] (lambda for example 2, (lambda1, lambda2) for example 3), the
/// sine frequency in [w/10, w] with w = 2L/K for the default example 1 ratio,
/// and the base spec alone otherwise.
SweepFamily default_sweep_family(const MeasureSpec& base, int points_per_param = 9);

struct SweepCell {
  std::size_t point = 0;
  int m = 0;
  bool divergent = false;
  DiscretizationError d;
  std::vector<BoundTerm> bounds;
  BoundCheck bound;
};

struct SweepRow {
  int m = 0;
  double worst_total = 0.0;
  double worst_error = 0.0;
  double worst_finite = 0.0;
  std::size_t worst_point = 0;
};

struct SweepResult {
  SweepFamily family;
  std::vector<int> m_list;
  std::vector<SweepCell> cells;  // point-major, then m
  std::vector<SweepRow> worst;   // one per m
  bool worst_nonincreasing = true;
  bool bounds_hold = true;
  /// Example 1 only: finite-bin ratio D_2m / D_m at each doubling, per point.
  std::vector<double> finite_ratios;
  bool rate_checked = false;
  bool rate_holds = true;

  bool passed() const { return worst_nonincreasing && bounds_hold && rate_holds; }
};

inline constexpr double kRateLow = 0.35;
inline constexpr double kRateHigh = 0.65;

SweepResult m3_sweep(const SweepFamily& family, const std::vector<int>& m_list, double tol = kBoundTolerance,
                     int threads = 1);

// ---------------------------------------------------------------------------
// Count law

struct GofSettings {
  double level = 0.001;  // family-wise, Bonferroni over tested bins
  double min_expected = 5.0;
  double covariance_gate = 4.0;  // in standard errors
};

struct BinGof {
  std::string label;
  double expected_mean = 0.0;  // T nu(J)
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool tested = false;  // false when pooling leaves a single cell
  bool passed = true;
};

struct GofReport {
  int m = 0;
  double horizon = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<BinGof> bins;
  /// Sample covariance matrix in grid order.
  std::vector<std::vector<double>> covariance;
  double max_abs_z = 0.0;
  std::size_t pairs_tested = 0;
  std::size_t pairs_untested = 0;  // too few expected joint occurrences
  bool gof_passed = true;
  bool independence_passed = true;
  double bonferroni_level = 0.0;

  bool passed() const { return gof_passed && independence_passed; }
};

/// Accumulates count vectors exactly (integer sums) and tests them against
/// independent Poisson laws.
class CountAccumulator {
 public:
  explicit CountAccumulator(std::size_t bins);
  void add(const CountVector& counts);
  void merge(const CountAccumulator& other);
  std::uint64_t replications() const { return n_; }
  GofReport report(const GridLayout& layout, const std::vector<double>& expected_means, const GofSettings& s) const;

 private:
  std::size_t bins_;
  std::uint64_t n_ = 0;
  std::vector<std::map<std::uint64_t, std::uint64_t>> histograms_;
  std::vector<std::uint64_t> sums_;
  std::vector<std::uint64_t> cross_;  // upper triangle incl. diagonal, row-major
};

/// Chi-square test of a sample histogram against Poisson(mean), pooling cells
/// until each has expected count at least `min_expected`.
BinGof poisson_gof(const std::map<std::uint64_t, std::uint64_t>& histogram, std::uint64_t n, double mean,
                   double min_expected = 5.0);

enum class CountSource { paths, direct };

/// Simulates `replications` paths of nu restricted to {|y| > 1/m} (or draws
/// the product-Poisson counts directly) and tests the count vectors.
GofReport count_law_check(const MeasureSpec& spec, int m, double horizon, std::uint64_t replications,
                          std::uint64_t seed, CountSource source = CountSource::paths, const GofSettings& s = {},
                          int threads = 1, int resolution = kDefaultTableResolution);

// ---------------------------------------------------------------------------
// Likelihood identities

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

struct RatioBoundReport {
  int m = 0;
  double horizon = 0.0;
  Region region;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  double d_region = 0.0;  // int_R |rho - rho_bar| dnu_tilde
  double bound = 0.0;     // 2 sinh(T d_region)
  McEstimate martingale;  // E exp(U), paths under nu_tilde on R
  McEstimate abs_gap;     // E |1 - R|, paths under nu on R
  McEstimate sinh_mean;   // E (exp(A+) - exp(A-)), paths under nu on R
  double max_consistency_error = 0.0;  // relative, ratio vs exp(U_bar - U)
  std::uint64_t singular_paths = 0;
  bool martingale_ok = true;
  bool bound_ok = true;
  bool identity_ok = true;
  bool consistency_ok = true;

  bool passed() const { return martingale_ok && bound_ok && identity_ok && consistency_ok; }
};

inline constexpr double kSeGate = 4.0;
inline constexpr double kConsistencyTolerance = 1e-12;

RatioBoundReport ratio_bound_check(const MeasureSpec& spec, int m, double horizon, const Region& region,
                                   std::uint64_t replications, std::uint64_t seed, int threads = 1,
                                   int resolution = kDefaultTableResolution, double tol = kBoundTolerance);

/// Per-m row of the `bound` command: D_m on the whole line, 2 sinh(T D_m) and
/// the class terms.
struct BoundRow {
  int m = 0;
  DiscretizationError d;
  double sinh_bound = 0.0;
  std::vector<BoundTerm> terms;
  BoundCheck check;
};
std::vector<BoundRow> bound_table(const MeasureSpec& spec, const std::vector<int>& m_list, double horizon,
                                  double tol = kBoundTolerance, int threads = 1);

}  // namespace levyeq
