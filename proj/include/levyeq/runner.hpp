#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyeq/harness.hpp"
#include "levyeq/report.hpp"

namespace levyeq {

enum class RegionPolicy { outside_identity, full, explicit_parts };
enum class KernelChoice { none, pi1, pi2 };

/// One batch run, parsed strictly from a JSON document.
struct RunConfig {
  nlohmann::json measure;  // {"class": ..., "params": {...}}
  std::vector<int> m_list;
  double horizon = 1.0;
  RegionPolicy region_policy = RegionPolicy::outside_identity;
  Region region;  // explicit_parts only
  std::uint64_t replications = 1000;
  std::uint64_t seed = 1;
  double tol_bound = kBoundTolerance;
  double tol_monte_carlo = kMonteCarloTolerance;
  int resolution = kDefaultTableResolution;
  int points_per_param = 9;
  GofSettings gof;
  CountSource source = CountSource::paths;
  double drift = 0.0;
  KernelChoice kernel = KernelChoice::none;
  std::optional<std::string> output_dir;

  /// Region used at grid size m.
  Region region_for(int m) const;
  /// Canonical form with every default filled in. The output directory is
  /// left out so that the document does not depend on where it is written.
  nlohmann::json resolved() const;
};

inline constexpr int kMaxGridSize = 1024;

/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& doc);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;  // bound tolerance
  int threads = 1;
};

/// "discretize", "bound", "simulate", "counts", "verify", "sweep" or
/// "conditions". Numerical failures surface as the core exceptions.
Report run_command(const std::string& command, RunConfig config, const RunOverrides& overrides = {});

const std::vector<std::string>& command_names();

}  // namespace levyeq
