#include "levyeq/likelihood.hpp"

#include <cmath>

#include "levyeq/errors.hpp"
#include "parallel.hpp"

namespace levyeq {

namespace {

struct Cell {
  Interval span;
  double level;       // rho_bar on the cell
  std::ptrdiff_t bin;  // -1 for the identity region
};

struct CellIntegrals {
  double nu = 0.0, tilde = 0.0, deviation = 0.0, error = 0.0;
};

}  // namespace

LikelihoodFrame::LikelihoodFrame(const MeasureSpec& spec, const DiscretizedMeasure& disc, Region region, double tol,
                                 int threads)
    : spec_(&spec), disc_(&disc), region_(spec.dominating().support.intersect(region)) {
  const auto& grid = disc.grid();
  std::vector<Cell> cells;
  for (const auto& part : region_.parts()) {
    const auto id = intersect(part, grid.identity_region());
    if (!id.empty()) cells.push_back({id, 1.0, -1});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto piece = intersect(part, grid[i].span);
      if (!piece.empty()) cells.push_back({piece, disc.ratios()[i], static_cast<std::ptrdiff_t>(i)});
    }
  }

  std::vector<CellIntegrals> values(cells.size());
  detail::parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto& cell = cells[c];
    auto& out = values[c];
    const bool whole_bin = cell.bin >= 0 && cell.span == grid[static_cast<std::size_t>(cell.bin)].span;
    if (whole_bin) {
      const auto b = static_cast<std::size_t>(cell.bin);
      out.nu = disc.nu_masses()[b];
      out.tilde = disc.tilde_masses()[b];
      out.error = disc.mass_errors()[b];
    } else {
      const auto t = tilde_mass(spec, cell.span, tol);
      const auto v = interval_mass(spec, cell.span, tol);
      out.nu = v.value;
      out.tilde = t.value;
      out.error = t.error_estimate + v.error_estimate;
    }
    if (out.tilde == 0.0) return;
    const auto d = abs_deviation(spec, cell.span, cell.level, tol);
    if (d.divergent) throw DivergenceError("int |rho - rho_bar| dnu_tilde diverges on the likelihood region");
    out.deviation = d.value;
    out.error += d.error_estimate;
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& v = values[c];
    const double level = cells[c].level;
    const double signed_gap = level * v.tilde - v.nu;  // int (rho_bar - rho) dnu_tilde
    compensator_rho_ += v.nu - v.tilde;
    compensator_bar_ += (level - 1.0) * v.tilde;
    positive_ += std::max(0.0, 0.5 * (v.deviation + signed_gap));
    negative_ += std::max(0.0, 0.5 * (v.deviation - signed_gap));
    error_ += v.error;
  }
}

LogDensity log_density_u(const JumpPath& path, const RealFunction& ratio, double compensator, const Region& region,
                         const LikelihoodOptions& options) {
  LogDensity out;
  double sum = 0.0;
  for (const auto& jump : path.jumps) {
    if (!region.contains(jump.size)) throw ArgumentError("path jump lies outside the likelihood region");
    double r = ratio(jump.size);
    if (options.ratio_floor > 0.0) r = std::max(r, options.ratio_floor);
    if (!(r > 0.0)) {
      out.singular = true;
      out.value = -kInf;
      return out;
    }
    sum += std::log(r);
  }
  out.value = sum - path.horizon * compensator;
  return out;
}

LogDensity log_density_u(const JumpPath& path, const MeasureSpec& numerator, const Region& region, double tol,
                         const LikelihoodOptions& options) {
  const Region clipped = numerator.dominating().support.intersect(region);
  double compensator = 0.0;
  for (const auto& part : clipped.parts()) {
    compensator += interval_mass(numerator, part, tol).value - tilde_mass(numerator, part, tol).value;
  }
  return log_density_u(path, [&](double y) { return numerator.ratio_unchecked(y); }, compensator, clipped, options);
}

LogDensity log_density_u(const JumpPath& path, const DiscretizedMeasure& numerator, const MeasureSpec& spec,
                         const Region& region, double tol, const LikelihoodOptions& options) {
  const LikelihoodFrame frame(spec, numerator, region, tol);
  return log_density_u(path, [&](double y) { return numerator.ratio_at(y); }, frame.compensator_bar(),
                       frame.region(), options);
}

LikelihoodReport ratio_split(const JumpPath& path, const LikelihoodFrame& frame, const LikelihoodOptions& options) {
  LikelihoodReport rep;
  const double horizon = path.horizon;
  double log_plus = 0.0, log_minus = 0.0, sum_rho = 0.0, sum_bar = 0.0;
  for (const auto& jump : path.jumps) {
    if (!frame.region().contains(jump.size)) throw ArgumentError("path jump lies outside the likelihood region");
    double rho = frame.ratio(jump.size);
    if (options.ratio_floor > 0.0) rho = std::max(rho, options.ratio_floor);
    const double bar = frame.ratio_bar(jump.size);
    if (!(rho > 0.0)) {
      rep.singular = true;
      rep.u_value = -kInf;
      rep.jump_sum = -kInf;
      rep.ratio = kInf;
      rep.a_plus = kInf;
      return rep;
    }
    const double log_rho = std::log(rho);
    const double log_bar = std::log(bar);
    sum_rho += log_rho;
    sum_bar += log_bar;
    const double log_q = log_bar - log_rho;
    if (bar >= rho) {
      log_plus += log_q;
    } else {
      log_minus += log_q;
    }
  }
  rep.jump_sum = sum_rho;
  rep.compensator = horizon * frame.compensator_rho();
  rep.u_value = sum_rho - rep.compensator;
  rep.u_bar = sum_bar - horizon * frame.compensator_bar();
  // A+ is compensated with f-, A- with f+.
  rep.a_plus = log_plus + horizon * frame.negative_part();
  rep.a_minus = log_minus - horizon * frame.positive_part();
  rep.ratio = std::exp(rep.a_plus + rep.a_minus);
  return rep;
}

LikelihoodReport ratio_split(const JumpPath& path, const MeasureSpec& spec, const DiscretizedMeasure& disc,
                             const Region& region, double tol, const LikelihoodOptions& options) {
  const LikelihoodFrame frame(spec, disc, region, tol);
  return ratio_split(path, frame, options);
}

}  // namespace levyeq
