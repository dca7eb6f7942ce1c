#include "levyeq/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "levyeq/errors.hpp"

namespace levyeq {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x6c657679u};
  return std::mt19937_64(seq);
}

// Transformed rejection with squeeze (Hoermann 1993), for means >= 10.
std::uint64_t poisson_ptrs(double mean, RandomStream& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index), engine_(make_engine(seed, index)) {}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::uniform_open0() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

std::uint64_t RandomStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ArgumentError("Poisson mean must be finite and nonnegative");
  if (mean == 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(mean, *this);
  // Sequential inversion.
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;
    cdf = next;
  }
  return k;
}

QuantileTable build_quantile_table(const MeasureSpec& spec, const Region& region, int resolution,
                                   std::vector<double> breakpoints, double tol) {
  const Region clipped = spec.dominating().support.intersect(region);
  const double mass = region_mass(spec, clipped, tol).value;
  if (!(mass > 0.0)) throw ArgumentError("sampling region carries no mass");
  return build_quantile_table([&](double y) { return spec.nu_density(y); }, clipped, mass, resolution,
                              spec.dominating().tail, breakpoints);
}

CompoundPoissonSampler::CompoundPoissonSampler(const MeasureSpec& spec, Region region, int resolution,
                                               std::vector<double> breakpoints, double tol)
    : region_(spec.dominating().support.intersect(region)) {
  try {
    intensity_ = region_mass(spec, region_, tol).value;
  } catch (const DivergenceError&) {
    throw ArgumentError("jump intensity of the region is infinite; restrict it to {|y| > 1/m}");
  }
  if (intensity_ > 0.0) {
    table_ = build_quantile_table([&](double y) { return spec.nu_density(y); }, region_, intensity_, resolution,
                                  spec.dominating().tail, breakpoints);
  }
}

JumpPath CompoundPoissonSampler::sample(double horizon, double drift, RandomStream& rng) const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ArgumentError("horizon T must be positive");
  JumpPath path{horizon, drift, {}};
  if (!table_) return path;
  const auto count = rng.poisson(horizon * intensity_);
  path.jumps.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double t = horizon * rng.uniform_open0();
    double y = table_->quantile(rng.uniform_open0());
    // Interpolation can round onto the open left end of a part.
    if (!region_.contains(y)) y = std::nextafter(y, kInf);
    if (y == 0.0) y = table_->quantile(0.5);
    path.jumps.push_back({t, y});
  }
  std::sort(path.jumps.begin(), path.jumps.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < path.jumps.size(); ++i) {
    if (path.jumps[i].time <= path.jumps[i - 1].time) {
      path.jumps[i].time = std::nextafter(path.jumps[i - 1].time, kInf);
    }
  }
  // Ties pushed past the horizon are vanishingly rare; fold them back.
  for (std::size_t i = path.jumps.size(); i-- > 0;) {
    const double cap = i + 1 < path.jumps.size() ? path.jumps[i + 1].time : std::nextafter(horizon, kInf);
    if (path.jumps[i].time >= cap) path.jumps[i].time = std::nextafter(cap, -kInf);
  }
  return path;
}

JumpPath simulate_path(const MeasureSpec& spec, const Region& region, double horizon, double drift,
                       RandomStream& rng, int resolution) {
  return CompoundPoissonSampler(spec, region, resolution).sample(horizon, drift, rng);
}

JumpPath kernel_pi1(const JumpPath& path) {
  JumpPath out = path;
  out.drift = 0.0;
  return out;
}

JumpPath kernel_pi2(const JumpPath& path, double eta_tilde) {
  JumpPath out = path;
  out.drift -= eta_tilde;
  return out;
}

CountVector extract_statistic(const JumpPath& path, const GridLayout& layout) {
  CountVector out{layout.m(), std::vector<std::uint64_t>(layout.size(), 0)};
  for (const auto& jump : path.jumps) {
    if (const auto idx = layout.bin_index(jump.size)) ++out.counts[*idx];
  }
  return out;
}

CountVector sample_counts_direct(const DiscretizedMeasure& disc, double horizon, RandomStream& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ArgumentError("horizon T must be positive");
  const auto& masses = disc.nu_masses();
  CountVector out{disc.grid().m(), std::vector<std::uint64_t>(masses.size(), 0)};
  for (std::size_t i = 0; i < masses.size(); ++i) out.counts[i] = rng.poisson(horizon * masses[i]);
  return out;
}

CountVector sample_counts_direct(const MeasureSpec& spec, const GridLayout& layout, double horizon,
                                 RandomStream& rng, double tol) {
  return sample_counts_direct(discretize(spec, layout.m(), tol), horizon, rng);
}

}  // namespace levyeq
