#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "levyeq/interval.hpp"
#include "levyeq/measures.hpp"

namespace levyeq {

/// Identifies one interval of the grid.
struct BinTag {
  enum class Kind { neg_tail, finite, pos_tail };
  Kind kind = Kind::finite;
  int j = 0;  // 1..m, finite bins only
  int k = 0;  // -m..m-1, finite bins only

  std::string label() const;
  friend bool operator==(const BinTag&, const BinTag&) = default;
};

struct Bin {
  BinTag tag;
  Interval span;
  /// Left end of a finite bin as numerator over m: span = ](n)/m, (n+1)/m].
  long long numerator = 0;
};

/// The 2m^2 intervals ]-inf, -m], ]k+(j-1)/m, k+j/m] and ]m, inf[, with the two
/// intervals touching 0 left out, in ascending order of their left end.
class GridLayout {
 public:
  explicit GridLayout(int m);

  int m() const { return m_; }
  std::size_t size() const { return bins_.size(); }
  const Bin& operator[](std::size_t i) const { return bins_[i]; }
  const std::vector<Bin>& bins() const { return bins_; }

  /// ]-1/m, 1/m], where the discretized ratio is pinned to 1.
  Interval identity_region() const { return {-1.0 / m_, 1.0 / m_}; }

  /// Position of the bin containing y, or nullopt inside the identity region.
  /// Boundaries are decided exactly against the rationals n/m.
  std::optional<std::size_t> bin_index(double y) const;

  /// Interior grid points (k + j/m and +-m), useful as cell boundaries.
  std::vector<double> boundaries() const;

 private:
  int m_;
  std::vector<Bin> bins_;
};

GridLayout grid_intervals(int m);

/// Piecewise-constant version of rho that keeps the nu-mass of every bin.
class DiscretizedMeasure {
 public:
  DiscretizedMeasure(GridLayout grid, std::vector<double> ratios, std::vector<double> nu_masses,
                     std::vector<double> tilde_masses, std::vector<double> mass_errors);

  const GridLayout& grid() const { return grid_; }
  const std::vector<double>& ratios() const { return ratios_; }
  /// nu(J) and nu_tilde(J) per bin, in grid order.
  const std::vector<double>& nu_masses() const { return nu_masses_; }
  const std::vector<double>& tilde_masses() const { return tilde_masses_; }
  /// Combined quadrature error of nu(J) and nu_tilde(J).
  const std::vector<double>& mass_errors() const { return mass_errors_; }

  /// rho_bar(y): the bin ratio, or 1 inside the identity region.
  double ratio_at(double y) const;

 private:
  GridLayout grid_;
  std::vector<double> ratios_;
  std::vector<double> nu_masses_;
  std::vector<double> tilde_masses_;
  std::vector<double> mass_errors_;
};

/// Bins with zero nu_tilde-mass get ratio 1. Throws DivergenceError when a bin
/// (in practice a tail) has infinite mass.
DiscretizedMeasure discretize(const MeasureSpec& spec, int m, double tol = kBoundTolerance, int threads = 1);

/// int over `span` of |rho - level| dnu_tilde, split where rho crosses `level`.
QuadratureResult abs_deviation(const MeasureSpec& spec, const Interval& span, double level,
                               double tol = kBoundTolerance);

struct DiscretizationError {
  int m = 0;
  QuadratureResult identity;  // ]-1/m, 1/m], |rho - 1|
  QuadratureResult finite;    // finite bins
  QuadratureResult tails;     // ]-inf, -m] and ]m, inf[
  /// Finite-bin contribution split by sign of y (negative side, positive side).
  double finite_negative = 0.0;
  double finite_positive = 0.0;

  double total() const { return identity.value + finite.value + tails.value; }
  double total_error() const { return identity.error_estimate + finite.error_estimate + tails.error_estimate; }
};

/// D_m = int |rho - rho_bar_m| dnu_tilde, reported by component. Throws
/// DivergenceError when any component diverges.
DiscretizationError discretization_error(const MeasureSpec& spec, int m, double tol = kBoundTolerance,
                                         int threads = 1);
DiscretizationError discretization_error(const MeasureSpec& spec, const DiscretizedMeasure& disc,
                                         double tol = kBoundTolerance, int threads = 1);

}  // namespace levyeq
