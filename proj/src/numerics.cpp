#include "levyeq/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "levyeq/errors.hpp"

namespace levyeq {

QuadratureResult& QuadratureResult::operator+=(const QuadratureResult& other) {
  value += other.value;
  error_estimate += other.error_estimate;
  refinement_rounds = std::max(refinement_rounds, other.refinement_rounds);
  converged = converged && other.converged;
  divergent = divergent || other.divergent;
  return *this;
}

namespace {

constexpr int kMaxRounds = 12;
constexpr int kMinRounds = 3;
constexpr double kMaxAbscissa = 6.0;
// Nodes closer than this (relative to the interval width) to an endpoint may
// overflow the integrand; their contribution is dropped instead of treated as
// a blow-up.
constexpr double kEndpointUnderflow = 1e-100;

double abscissa_limit(int round) { return std::min(3.0 + 0.5 * round, kMaxAbscissa); }

/// Integrand on a bounded interval [a, b]. Receives the abscissa together with
/// its distances to both ends, the nearer one computed without cancellation.
template <typename G>
QuadratureResult tanh_sinh(const G& g, double a, double b, double tol) {
  using std::numbers::pi;
  const double c = 0.5 * (a + b);
  const double w = 0.5 * (b - a);
  const double width = b - a;

  QuadratureResult result;
  double raw_sum = 0.0;  // sum of weight * value over all nodes, not yet scaled by h
  double raw_abs = 0.0;
  bool blown_up = false;

  auto node = [&](double t) {
    const double u = 0.5 * pi * std::sinh(std::abs(t));
    const double e = std::exp(-2.0 * u);
    const double near = 2.0 * w * e / (1.0 + e);
    const double weight = w * 0.5 * pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    if (weight == 0.0) return;
    double x, dl, dr;
    if (t < 0) {
      dl = near;
      dr = width - near;
      x = a + near;
    } else {
      dr = near;
      dl = width - near;
      x = b - near;
    }
    if (t == 0.0) x = c;
    const double v = g(x, dl, dr);
    if (!std::isfinite(v)) {
      if (near < kEndpointUnderflow * width) return;
      blown_up = true;
      return;
    }
    raw_sum += weight * v;
    raw_abs += std::abs(weight * v);
  };

  std::vector<double> errors;
  double previous = 0.0;
  long previous_limit = 0;
  for (int round = 0; round <= kMaxRounds; ++round) {
    const double h = std::ldexp(1.0, -round);
    const long limit = static_cast<long>(std::floor(abscissa_limit(round) / h));
    const long old_limit = 2 * previous_limit;
    if (round == 0) node(0.0);
    for (long j = 1; j <= limit; ++j) {
      if (round > 0 && j % 2 == 0 && j <= old_limit) continue;
      const double t = static_cast<double>(j) * h;
      node(t);
      node(-t);
    }
    previous_limit = limit;

    const double estimate = h * raw_sum;
    result.value = estimate;
    result.refinement_rounds = round;
    if (blown_up) {
      result.divergent = true;
      result.converged = false;
      result.error_estimate = kInf;
      return result;
    }
    if (round == 0) {
      previous = estimate;
      continue;
    }
    const double err = std::abs(estimate - previous);
    previous = estimate;
    errors.push_back(err);
    result.error_estimate = err;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * h * raw_abs;
    if (round >= kMinRounds && err <= std::max(tol, floor)) {
      result.converged = true;
      return result;
    }
    if (errors.size() > 4 && err > 0.5 * errors[errors.size() - 5]) {
      result.divergent = true;
      result.converged = false;
      return result;
    }
  }
  result.converged = false;
  return result;
}

/// One piece that does not straddle 0 and has at most one infinite end.
QuadratureResult integrate_piece(const RealFunction& f, double lo, double hi, TailDecay tail, double tol) {
  if (std::isfinite(lo) && std::isfinite(hi)) {
    return tanh_sinh([&](double, double dl, double dr) { return f(dl < dr ? lo + dl : hi - dr); }, lo, hi, tol);
  }
  // Reflect ]-inf, hi] onto [-hi, inf[.
  const bool reflected = !std::isfinite(lo);
  const double a = reflected ? -hi : lo;
  auto base = [&](double y) { return reflected ? f(-y) : f(y); };
  const double scale = std::max(1.0, std::abs(a));

  if (tail == TailDecay::polynomial) {
    // y = a + scale * (1 - s) / s on s in ]0, 1].
    return tanh_sinh(
        [&](double, double dl, double dr) {
          if (dr < dl) {
            const double s1 = 1.0 - dr;
            return base(a + scale * dr / s1) * scale / (s1 * s1);
          }
          if (dl == 0.0) return 0.0;
          return base(a + scale * (1.0 - dl) / dl) * scale / (dl * dl);
        },
        0.0, 1.0, tol);
  }
  // y = a - scale * log(s) on s in ]0, 1].
  return tanh_sinh(
      [&](double, double dl, double dr) {
        if (dr < dl) {
          const double s1 = 1.0 - dr;
          return base(a - scale * std::log1p(-dr)) * scale / s1;
        }
        if (dl == 0.0) return 0.0;
        return base(a - scale * std::log(dl)) * scale / dl;
      },
      0.0, 1.0, tol);
}

/// Maps s in [0, 1] to a point of the interval, using the same coordinates as
/// the quadrature for infinite ends.
double unit_to_point(const Interval& iv, TailDecay tail, double s) {
  if (iv.bounded()) return iv.lo + (iv.hi - iv.lo) * s;
  const bool reflected = !std::isfinite(iv.lo);
  const double a = reflected ? -iv.hi : iv.lo;
  const double scale = std::max(1.0, std::abs(a));
  // s = 0 maps to the finite end here.
  const double q = 1.0 - s;
  const double y = tail == TailDecay::polynomial ? a + scale * (1.0 - q) / q : a - scale * std::log(q);
  return reflected ? -y : y;
}

std::vector<Interval> split_pieces(const Interval& interval, const std::vector<double>& breakpoints) {
  std::vector<double> cuts{interval.lo};
  std::vector<double> inner = breakpoints;
  inner.push_back(0.0);
  std::sort(inner.begin(), inner.end());
  for (double p : inner) {
    if (p > interval.lo && p < interval.hi && p != cuts.back()) cuts.push_back(p);
  }
  cuts.push_back(interval.hi);
  std::vector<Interval> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) pieces.push_back({cuts[i], cuts[i + 1]});
  return pieces;
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, const Interval& interval, const IntegrationHints& hints, double tol) {
  if (!(tol > 0.0)) throw ArgumentError("quadrature tolerance must be positive");
  QuadratureResult total;
  total.refinement_rounds = 0;
  if (interval.empty()) return total;
  const auto pieces = split_pieces(interval, hints.breakpoints);
  const double piece_tol = tol / static_cast<double>(pieces.size());
  for (const auto& p : pieces) total += integrate_piece(f, p.lo, p.hi, hints.tail, piece_tol);
  return total;
}

std::vector<double> sign_changes(const RealFunction& g, const Interval& interval, TailDecay tail, int samples) {
  std::vector<double> roots;
  if (interval.empty() || samples < 2) return roots;
  if (interval.lo == -kInf && interval.hi == kInf) {
    // The tail maps need one finite end.
    roots = sign_changes(g, {-kInf, 0.0}, tail, samples);
    for (double r : sign_changes(g, {0.0, kInf}, tail, samples)) roots.push_back(r);
    return roots;
  }
  const bool unbounded = !interval.bounded();
  const double edge = unbounded ? 1e-9 : 1e-12;
  std::vector<double> grid;
  for (int i = 1; i < samples; ++i) grid.push_back(static_cast<double>(i) / samples);
  if (unbounded) {
    // The last linear step would jump across the whole far tail; walk it
    // with geometrically shrinking 1 - s instead.
    const int extra = samples / 2;
    const double q0 = 1.0 / samples, ratio = std::pow(edge / q0, 1.0 / extra);
    for (int i = 1; i < extra; ++i) grid.push_back(1.0 - q0 * std::pow(ratio, i));
  }
  grid.push_back(1.0 - edge);
  double prev_y = unit_to_point(interval, tail, edge);
  double prev_g = g(prev_y);
  for (double s : grid) {
    const double y = unit_to_point(interval, tail, s);
    const double gy = g(y);
    if (prev_g != 0.0 && gy != 0.0 && std::signbit(prev_g) != std::signbit(gy)) {
      // Reflected tails are sampled right to left.
      double lo = std::min(prev_y, y), hi = std::max(prev_y, y);
      double glo = prev_y < y ? prev_g : gy;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(gm) == std::signbit(glo)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    if (gy != 0.0) {
      prev_y = y;
      prev_g = gy;
    }
  }
  return roots;
}

// ---------------------------------------------------------------------------
// Quantile tables

QuantileTable::QuantileTable(Region region, double mass, std::vector<Cell> cells)
    : region_(std::move(region)), mass_(mass), cells_(std::move(cells)) {}

double QuantileTable::quantile(double u) const {
  if (cells_.empty()) throw ArgumentError("quantile of an empty table");
  if (u <= 0.0) return cells_.front().y0;
  if (u >= 1.0) return cells_.back().y1;
  auto it = std::lower_bound(cells_.begin(), cells_.end(), u, [](const Cell& c, double v) { return c.u1 < v; });
  if (it == cells_.end()) return cells_.back().y1;
  const double frac = (u - it->u0) / (it->u1 - it->u0);
  return it->y0 + std::clamp(frac, 0.0, 1.0) * (it->y1 - it->y0);
}

double QuantileTable::cdf(double y) const {
  if (cells_.empty()) return 0.0;
  auto it = std::lower_bound(cells_.begin(), cells_.end(), y, [](const Cell& c, double v) { return c.y1 < v; });
  if (it == cells_.end()) return 1.0;
  if (y <= it->y0) return it->u0;
  return it->u0 + (y - it->y0) / (it->y1 - it->y0) * (it->u1 - it->u0);
}

namespace {

constexpr std::array<double, 4> kGaussNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                               0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                 0.1012285362903763};

double gauss_legendre8(const RealFunction& f, double a, double b) {
  const double c = 0.5 * (a + b), w = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    s += kGaussWeights[i] * (f(c - w * kGaussNodes[i]) + f(c + w * kGaussNodes[i]));
  }
  return w * s;
}

double tail_cutoff(const RealFunction& density, double finite_end, bool upward, double threshold, TailDecay tail) {
  const double scale = std::max(1.0, std::abs(finite_end));
  for (int k = 0; k < 60; ++k) {
    const double c = upward ? finite_end + scale * std::ldexp(1.0, k) : finite_end - scale * std::ldexp(1.0, k);
    const Interval rest = upward ? Interval{c, kInf} : Interval{-kInf, c};
    const auto q = integrate(density, rest, {tail, {}}, std::max(threshold * 1e-3, 1e-300));
    if (q.divergent) throw DivergenceError("tail mass of the sampling region does not converge");
    if (std::abs(q.value) <= threshold) return c;
  }
  throw DivergenceError("could not locate a tail cutoff for the sampling region");
}

struct CellBuilder {
  const RealFunction& density;
  double target;
  std::vector<std::pair<Interval, double>> out;

  void refine(double y0, double y1, double mass, int depth) {
    const bool splittable = depth < 200 && (y1 - y0) > 1e-13 * std::max(1.0, std::max(std::abs(y0), std::abs(y1)));
    if (mass <= target || !splittable) {
      out.push_back({{y0, y1}, mass});
      return;
    }
    const bool geometric = (y0 > 0 && y1 / y0 > 4.0) || (y1 < 0 && y0 / y1 > 4.0);
    const double mid = geometric ? std::copysign(std::sqrt(y0 * y1), y0) : 0.5 * (y0 + y1);
    const double left = gauss_legendre8(density, y0, mid);
    const double right = gauss_legendre8(density, mid, y1);
    refine(y0, mid, left, depth + 1);
    refine(mid, y1, right, depth + 1);
  }
};

}  // namespace

QuantileTable build_quantile_table(const RealFunction& density, const Region& region, double mass, int resolution,
                                   TailDecay tail, std::span<const double> breakpoints) {
  if (resolution < 1) throw ArgumentError("quantile table resolution must be at least 1");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ArgumentError("quantile table needs a finite positive mass");

  const double threshold = 1e-13 * mass;
  CellBuilder builder{density, mass / (4.0 * resolution), {}};
  for (const auto& part : region.parts()) {
    double lo = part.lo, hi = part.hi;
    if (!std::isfinite(hi)) hi = tail_cutoff(density, std::isfinite(lo) ? lo : 0.0, true, threshold, tail);
    if (!std::isfinite(lo)) lo = tail_cutoff(density, std::isfinite(part.hi) ? part.hi : 0.0, false, threshold, tail);
    std::vector<double> cuts{lo};
    std::vector<double> inner(breakpoints.begin(), breakpoints.end());
    std::sort(inner.begin(), inner.end());
    for (double p : inner) {
      if (p > lo && p < hi && p > cuts.back()) cuts.push_back(p);
    }
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      constexpr int kInitial = 16;
      const bool geometric = (a > 0 && b / a > 8.0) || (b < 0 && a / b > 8.0);
      double prev = a;
      for (int k = 1; k <= kInitial; ++k) {
        const double frac = static_cast<double>(k) / kInitial;
        double next = geometric ? a * std::pow(b / a, frac) : a + (b - a) * frac;
        if (k == kInitial) next = b;
        builder.refine(prev, next, gauss_legendre8(density, prev, next), 0);
        prev = next;
      }
    }
  }

  double total = 0.0;
  for (const auto& [iv, m] : builder.out) total += std::max(m, 0.0);
  if (!(total > 0.0)) throw ArgumentError("sampling region carries no mass");

  std::vector<QuantileTable::Cell> cells;
  cells.reserve(builder.out.size());
  double acc = 0.0;
  for (const auto& [iv, m] : builder.out) {
    if (!(m > 0.0)) continue;
    const double u0 = acc / total;
    acc += m;
    const double u1 = acc / total;
    if (u1 > u0) cells.push_back({iv.lo, iv.hi, u0, u1});
  }
  cells.back().u1 = 1.0;
  return QuantileTable(region, mass, std::move(cells));
}

}  // namespace levyeq
