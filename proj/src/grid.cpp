#include "levyeq/grid.hpp"

#include <algorithm>
#include <cmath>

#include "levyeq/errors.hpp"
#include "parallel.hpp"

namespace levyeq {

std::string BinTag::label() const {
  switch (kind) {
    case Kind::neg_tail:
      return "neg_tail";
    case Kind::pos_tail:
      return "pos_tail";
    default:
      return "J(" + std::to_string(j) + "," + std::to_string(k) + ")";
  }
}

GridLayout::GridLayout(int m) : m_(m) {
  if (m < 1) throw ArgumentError("grid size m must be at least 1");
  const long long mm = static_cast<long long>(m) * m;
  bins_.reserve(static_cast<std::size_t>(2 * mm));
  bins_.push_back({{BinTag::Kind::neg_tail, 0, 0}, {-kInf, -static_cast<double>(m)}, -mm});
  for (long long n = -mm; n < mm; ++n) {
    if (n == -1 || n == 0) continue;
    const long long k = n >= 0 ? n / m : -((-n + m - 1) / m);
    const long long j = n - k * m + 1;
    const Interval span{static_cast<double>(n) / m, static_cast<double>(n + 1) / m};
    bins_.push_back({{BinTag::Kind::finite, static_cast<int>(j), static_cast<int>(k)}, span, n});
  }
  bins_.push_back({{BinTag::Kind::pos_tail, 0, 0}, {static_cast<double>(m), kInf}, mm});
}

std::optional<std::size_t> GridLayout::bin_index(double y) const {
  const double md = static_cast<double>(m_);
  if (y <= -md) return 0;
  if (y > md) return bins_.size() - 1;
  // sign(y*m - q), exact: the product and difference are rounded once.
  auto above = [&](long long q) { return std::fma(y, md, -static_cast<double>(q)) > 0.0; };
  long long n = static_cast<long long>(std::ceil(y * md)) - 1;
  while (!above(n)) --n;
  while (above(n + 1)) ++n;
  if (n == -1 || n == 0) return std::nullopt;
  const long long mm = static_cast<long long>(m_) * m_;
  const long long offset = n + mm + 1;
  return static_cast<std::size_t>(n < 0 ? offset : offset - 2);
}

std::vector<double> GridLayout::boundaries() const {
  std::vector<double> out;
  for (const auto& b : bins_) {
    if (std::isfinite(b.span.hi)) out.push_back(b.span.hi);
  }
  out.push_back(-1.0 / m_);
  out.push_back(1.0 / m_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GridLayout grid_intervals(int m) { return GridLayout(m); }

DiscretizedMeasure::DiscretizedMeasure(GridLayout grid, std::vector<double> ratios, std::vector<double> nu_masses,
                                       std::vector<double> tilde_masses, std::vector<double> mass_errors)
    : grid_(std::move(grid)),
      ratios_(std::move(ratios)),
      nu_masses_(std::move(nu_masses)),
      tilde_masses_(std::move(tilde_masses)),
      mass_errors_(std::move(mass_errors)) {}

double DiscretizedMeasure::ratio_at(double y) const {
  const auto idx = grid_.bin_index(y);
  return idx ? ratios_[*idx] : 1.0;
}

DiscretizedMeasure discretize(const MeasureSpec& spec, int m, double tol, int threads) {
  GridLayout grid(m);
  const std::size_t n = grid.size();
  std::vector<double> ratios(n), nu(n), tilde(n), errors(n);
  detail::parallel_for(n, threads, [&](std::size_t i) {
    const auto& span = grid[i].span;
    const auto t = tilde_mass(spec, span, tol);
    const auto v = interval_mass(spec, span, tol);
    tilde[i] = t.value;
    nu[i] = v.value;
    errors[i] = t.error_estimate + v.error_estimate;
    ratios[i] = t.value > 0.0 ? v.value / t.value : 1.0;
  });
  return DiscretizedMeasure(std::move(grid), std::move(ratios), std::move(nu), std::move(tilde), std::move(errors));
}

QuadratureResult abs_deviation(const MeasureSpec& spec, const Interval& span, double level, double tol) {
  const auto& dom = spec.dominating();
  // rho - level as (rho - 1) - (level - 1): exact cancellation near 0 where
  // the level is 1 and nu_tilde may be singular.
  const double shift = level - 1.0;
  auto diff = [&](double y) { return spec.ratio_minus_one(y) - shift; };
  std::vector<double> kinks;
  const Region clipped = dom.support.intersect(span);
  for (const auto& part : clipped.parts()) {
    auto roots = sign_changes(diff, part, dom.tail);
    kinks.insert(kinks.end(), roots.begin(), roots.end());
  }
  return integrate_tilde(spec, [&](double y) { return std::abs(diff(y)); }, span, std::move(kinks), tol);
}

DiscretizationError discretization_error(const MeasureSpec& spec, int m, double tol, int threads) {
  return discretization_error(spec, discretize(spec, m, tol, threads), tol, threads);
}

DiscretizationError discretization_error(const MeasureSpec& spec, const DiscretizedMeasure& disc, double tol,
                                         int threads) {
  const auto& grid = disc.grid();
  const std::size_t n = grid.size();
  std::vector<QuadratureResult> parts(n);
  detail::parallel_for(n, threads, [&](std::size_t i) {
    if (disc.tilde_masses()[i] == 0.0) return;
    parts[i] = abs_deviation(spec, grid[i].span, disc.ratios()[i], tol);
  });

  DiscretizationError out;
  out.m = grid.m();
  out.identity = abs_deviation(spec, grid.identity_region(), 1.0, tol);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bin = grid[i];
    if (bin.tag.kind == BinTag::Kind::finite) {
      out.finite += parts[i];
      (bin.span.hi <= 0.0 ? out.finite_negative : out.finite_positive) += parts[i].value;
    } else {
      out.tails += parts[i];
    }
  }
  if (out.identity.divergent) throw DivergenceError("int_{|y|<=1/m} |rho - 1| dnu_tilde diverges");
  if (out.finite.divergent || out.tails.divergent) throw DivergenceError("discretization error diverges on a bin");
  return out;
}

}  // namespace levyeq
