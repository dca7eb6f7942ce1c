#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "levyeq/grid.hpp"
#include "levyeq/measures.hpp"
#include "levyeq/numerics.hpp"

namespace levyeq {

/// Reproducible random stream: (master seed, stream index) fully determines
/// every draw. One index per replication.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  /// Uniform on ]0, 1], 53 random bits.
  double uniform_open0();
  /// Uniform on [0, 1[.
  double uniform();
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
};

struct Jump {
  double time;
  double size;
  friend bool operator==(const Jump&, const Jump&) = default;
};

/// Finite-activity trajectory x_t = drift * t + sum of jumps up to t.
struct JumpPath {
  double horizon = 1.0;
  double drift = 0.0;
  std::vector<Jump> jumps;  // strictly increasing times in ]0, horizon]

  friend bool operator==(const JumpPath&, const JumpPath&) = default;
};

/// Count vector S(x): one count per grid interval, in grid order.
struct CountVector {
  int m = 0;
  std::vector<std::uint64_t> counts;
};

inline constexpr int kDefaultTableResolution = 1 << 14;

/// Compound Poisson sampler for nu restricted to a region of finite mass.
/// Holds the quantile table so that repeated paths share it.
class CompoundPoissonSampler {
 public:
  /// Throws ArgumentError when nu(region) is infinite; restrict to
  /// {|y| > 1/m} for infinite-activity measures. `breakpoints` become
  /// quantile-table cell boundaries (pass the grid boundaries so bin masses
  /// are reproduced exactly).
  CompoundPoissonSampler(const MeasureSpec& spec, Region region, int resolution = kDefaultTableResolution,
                         std::vector<double> breakpoints = {}, double tol = kMonteCarloTolerance);

  /// nu(region).
  double intensity() const { return intensity_; }
  const Region& region() const { return region_; }
  const QuantileTable* table() const { return table_ ? &*table_ : nullptr; }

  JumpPath sample(double horizon, double drift, RandomStream& rng) const;

 private:
  Region region_;
  double intensity_ = 0.0;
  std::optional<QuantileTable> table_;
};

QuantileTable build_quantile_table(const MeasureSpec& spec, const Region& region, int resolution,
                                   std::vector<double> breakpoints = {}, double tol = kMonteCarloTolerance);

JumpPath simulate_path(const MeasureSpec& spec, const Region& region, double horizon, double drift,
                       RandomStream& rng, int resolution = kDefaultTableResolution);

/// Drops the drift: the pure-jump part of the path.
JumpPath kernel_pi1(const JumpPath& path);
/// x_t - t * eta_tilde.
JumpPath kernel_pi2(const JumpPath& path, double eta_tilde);

/// Number of jumps per grid interval; jumps in the identity region are
/// ignored.
CountVector extract_statistic(const JumpPath& path, const GridLayout& layout);

/// Independent Poisson(T nu(J)) draws in grid order.
CountVector sample_counts_direct(const DiscretizedMeasure& disc, double horizon, RandomStream& rng);
CountVector sample_counts_direct(const MeasureSpec& spec, const GridLayout& layout, double horizon,
                                 RandomStream& rng, double tol = kBoundTolerance);

}  // namespace levyeq
