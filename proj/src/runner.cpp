#include "levyeq/runner.hpp"

#include <climits>
#include <cmath>

#include "levyeq/json_reader.hpp"
#include "parallel.hpp"

namespace levyeq {

using nlohmann::json;

namespace {

json end_to_json(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

double end_from_json(const json& v, const std::string& field) {
  if (v.is_number()) {
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "expected a finite number or \"inf\" / \"-inf\"");
    return x;
  }
  if (v == "inf") return kInf;
  if (v == "-inf") return -kInf;
  throw ConfigError(field, "expected a number or \"inf\" / \"-inf\"");
}

Region parse_parts(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a non-empty list of [lo, hi] pairs");
  std::vector<Interval> parts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(f, "expected a [lo, hi] pair");
    const Interval iv{end_from_json(v[i][0], f + "[0]"), end_from_json(v[i][1], f + "[1]")};
    if (iv.empty()) throw ConfigError(f, "need lo < hi");
    parts.push_back(iv);
  }
  Region region(parts);
  for (std::size_t i = 1; i < region.parts().size(); ++i) {
    if (region.parts()[i].lo < region.parts()[i - 1].hi) throw ConfigError(field, "intervals overlap");
  }
  return region;
}

int parse_m(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  const auto m = v.get<long long>();
  if (m < 1 || m > kMaxGridSize) {
    throw ConfigError(field, "value " + std::to_string(m) + " outside [1, " + std::to_string(kMaxGridSize) + "]");
  }
  return static_cast<int>(m);
}

const char* region_name(RegionPolicy p) {
  switch (p) {
    case RegionPolicy::outside_identity:
      return "outside_identity";
    case RegionPolicy::full:
      return "full";
    case RegionPolicy::explicit_parts:
      break;
  }
  return "explicit";
}

const char* kernel_name(KernelChoice k) {
  switch (k) {
    case KernelChoice::pi1:
      return "pi1";
    case KernelChoice::pi2:
      return "pi2";
    case KernelChoice::none:
      break;
  }
  return "none";
}

std::uint64_t parse_count(JsonObjectReader& r, const std::string& key, long long lo, long long fallback) {
  return static_cast<std::uint64_t>(r.integer(key, lo, LLONG_MAX, fallback));
}

std::string m_suffix(int m) { return "_m" + std::to_string(m); }

// ---------------------------------------------------------------------------
// Commands

struct Context {
  const RunConfig& cfg;
  const MeasureSpec& spec;
  int threads;
};

void run_discretize(const Context& c, Report& rep) {
  json results = json::array();
  for (int m : c.cfg.m_list) {
    const auto disc = discretize(c.spec, m, c.cfg.tol_bound, c.threads);
    const auto d = discretization_error(c.spec, disc, c.cfg.tol_bound, c.threads);
    results.push_back({{"m", m}, {"intervals", disc.grid().size()}, {"D", to_json(d)}});

    auto grid = grid_table(disc.grid());
    auto ratios = discretization_table(disc);
    std::vector<std::pair<double, double>> steps;
    for (std::size_t i = 0; i < disc.grid().size(); ++i) {
      const auto& span = disc.grid()[i].span;
      if (!span.bounded()) continue;
      steps.emplace_back(span.lo, disc.ratios()[i]);
      steps.emplace_back(span.hi, disc.ratios()[i]);
    }
    rep.tables.push_back(std::move(grid));
    rep.tables.push_back(std::move(ratios));
    rep.tables.push_back(plot_table("ratio_bar" + m_suffix(m), "y", "ratio_bar", steps));
  }
  rep.document["results"] = results;
}

void run_bound(const Context& c, Report& rep) {
  const auto rows = bound_table(c.spec, c.cfg.m_list, c.cfg.horizon, c.cfg.tol_bound, c.threads);
  json results = json::array();
  std::vector<std::pair<double, double>> d_plot, sinh_plot;
  for (const auto& row : rows) {
    results.push_back({{"m", row.m},
                       {"D", to_json(row.d)},
                       {"sinh_bound", row.sinh_bound},
                       {"bound_terms", to_json(row.terms)},
                       {"bound_check", to_json(row.check)}});
    d_plot.emplace_back(row.m, row.d.total());
    sinh_plot.emplace_back(row.m, row.sinh_bound);
    if (row.check.checked && !row.check.holds) rep.passed = false;
  }
  rep.document["results"] = results;
  rep.tables.push_back(bound_rows_table(rows));
  rep.tables.push_back(plot_table("D_m", "m", "D_m", d_plot));
  rep.tables.push_back(plot_table("sinh_bound", "m", "sinh_bound", sinh_plot));
}

void run_simulate(const Context& c, Report& rep) {
  const int m = c.cfg.m_list.front();
  const GridLayout layout(m);
  const CompoundPoissonSampler sampler(c.spec, c.cfg.region_for(m), c.cfg.resolution, layout.boundaries(),
                                      c.cfg.tol_monte_carlo);
  double eta_tilde = 0.0;
  if (c.cfg.kernel == KernelChoice::pi2) {
    const auto eta = eta_functional(c.spec.dominating_spec(), c.cfg.tol_bound);
    if (!eta.finite) throw DivergenceError("eta of the dominating measure diverges; kernel pi2 is undefined");
    eta_tilde = eta.value;
  }

  std::vector<JumpPath> paths(static_cast<std::size_t>(c.cfg.replications));
  detail::parallel_for(paths.size(), c.threads, [&](std::size_t i) {
    RandomStream rng(c.cfg.seed, i);
    auto path = sampler.sample(c.cfg.horizon, c.cfg.drift, rng);
    if (c.cfg.kernel == KernelChoice::pi1) path = kernel_pi1(path);
    if (c.cfg.kernel == KernelChoice::pi2) path = kernel_pi2(path, eta_tilde);
    paths[i] = std::move(path);
  });

  std::vector<CountVector> stats;
  std::size_t jumps = 0;
  for (const auto& p : paths) {
    stats.push_back(extract_statistic(p, layout));
    jumps += p.jumps.size();
  }
  rep.document["results"] = {{"m", m},
                             {"region", to_json(sampler.region())},
                             {"intensity", sampler.intensity()},
                             {"paths", paths.size()},
                             {"total_jumps", jumps},
                             {"eta_tilde", eta_tilde}};

  std::vector<std::pair<double, double>> trajectory;
  if (!paths.empty()) {
    const auto& p = paths.front();
    double level = 0.0, last = 0.0;
    trajectory.emplace_back(0.0, 0.0);
    for (const auto& j : p.jumps) {
      level += p.drift * (j.time - last);
      trajectory.emplace_back(j.time, level);
      level += j.size;
      trajectory.emplace_back(j.time, level);
      last = j.time;
    }
    trajectory.emplace_back(p.horizon, level + p.drift * (p.horizon - last));
  }
  rep.tables.push_back(path_header_table(paths));
  rep.tables.push_back(path_table(paths));
  auto counts = counts_table(layout, stats);
  counts.name = "statistics";
  rep.tables.push_back(std::move(counts));
  rep.tables.push_back(plot_table("path0", "t", "x", trajectory));
}

void run_counts(const Context& c, Report& rep) {
  json results = json::array();
  for (int m : c.cfg.m_list) {
    const auto disc = discretize(c.spec, m, c.cfg.tol_bound, c.threads);
    const auto& layout = disc.grid();
    std::optional<CompoundPoissonSampler> sampler;
    if (c.cfg.source == CountSource::paths) {
      sampler.emplace(c.spec, Region::outside_identity(m), c.cfg.resolution, layout.boundaries(),
                      c.cfg.tol_monte_carlo);
    }
    std::vector<CountVector> samples(static_cast<std::size_t>(c.cfg.replications));
    detail::parallel_for(samples.size(), c.threads, [&](std::size_t i) {
      RandomStream rng(c.cfg.seed, i);
      samples[i] = sampler ? extract_statistic(sampler->sample(c.cfg.horizon, 0.0, rng), layout)
                           : sample_counts_direct(disc, c.cfg.horizon, rng);
    });
    CountAccumulator acc(layout.size());
    for (const auto& s : samples) acc.add(s);
    std::vector<double> expected(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) expected[i] = c.cfg.horizon * disc.nu_masses()[i];
    auto gof = acc.report(layout, expected, c.cfg.gof);
    gof.horizon = c.cfg.horizon;
    gof.seed = c.cfg.seed;
    results.push_back(to_json(gof));

    auto table = counts_table(layout, samples);
    table.name = "counts" + m_suffix(m);
    rep.tables.push_back(std::move(table));
    rep.tables.push_back(gof_table(gof));
  }
  rep.document["results"] = results;
}

void run_verify(const Context& c, Report& rep) {
  std::vector<RatioBoundReport> checks;
  json results = json::array();
  std::vector<std::pair<double, double>> gap_plot, bound_plot;
  for (int m : c.cfg.m_list) {
    auto check = ratio_bound_check(c.spec, m, c.cfg.horizon, c.cfg.region_for(m), c.cfg.replications, c.cfg.seed,
                                   c.threads, c.cfg.resolution, c.cfg.tol_bound);
    auto gof = count_law_check(c.spec, m, c.cfg.horizon, c.cfg.replications, c.cfg.seed, c.cfg.source, c.cfg.gof,
                               c.threads, c.cfg.resolution);
    results.push_back({{"m", m}, {"ratio_bound", to_json(check)}, {"count_law", to_json(gof)}});
    if (!check.passed() || !gof.passed()) rep.passed = false;
    gap_plot.emplace_back(m, check.abs_gap.mean);
    bound_plot.emplace_back(m, check.bound);
    rep.tables.push_back(gof_table(gof));
    checks.push_back(std::move(check));
  }
  rep.document["results"] = results;
  rep.tables.push_back(ratio_bound_table(checks));
  rep.tables.push_back(plot_table("abs_gap", "m", "E|1-R|", gap_plot));
  rep.tables.push_back(plot_table("sinh_bound", "m", "sinh_bound", bound_plot));
}

void run_sweep(const Context& c, Report& rep) {
  const auto family = default_sweep_family(c.spec, c.cfg.points_per_param);
  const auto result = m3_sweep(family, c.cfg.m_list, c.cfg.tol_bound, c.threads);
  rep.document["results"] = to_json(result);
  rep.passed = result.passed();
  std::vector<std::pair<double, double>> worst;
  for (const auto& w : result.worst) worst.emplace_back(w.m, w.worst_total);
  rep.tables.push_back(sweep_table(result));
  rep.tables.push_back(sweep_worst_table(result));
  rep.tables.push_back(plot_table("worst_D_m", "m", "worst_D_m", worst));
}

void run_conditions(const Context& c, Report& rep) {
  const auto report = check_conditions(c.spec, c.cfg.m_list, c.cfg.tol_bound, c.threads);
  auto doc = to_json(report);
  doc["M4"]["finding"] = report.m4_holds() ? "condition (M4) holds" : "condition (M4) fails";
  rep.document["results"] = doc;
  rep.passed = report.m2_holds();
  rep.tables.push_back(m3_table(report));
}

}  // namespace

Region RunConfig::region_for(int m) const {
  switch (region_policy) {
    case RegionPolicy::outside_identity:
      return Region::outside_identity(m);
    case RegionPolicy::full:
      return Region::real_line();
    case RegionPolicy::explicit_parts:
      break;
  }
  return region;
}

json RunConfig::resolved() const {
  json region_json;
  if (region_policy == RegionPolicy::explicit_parts) {
    region_json = json::array();
    for (const auto& p : region.parts()) region_json.push_back({end_to_json(p.lo), end_to_json(p.hi)});
  } else {
    region_json = region_name(region_policy);
  }
  return {{"measure", measure},
          {"m_list", m_list},
          {"T", horizon},
          {"region", region_json},
          {"replications", replications},
          {"seed", seed},
          {"tol", {{"bound", tol_bound}, {"monte_carlo", tol_monte_carlo}}},
          {"resolution", resolution},
          {"sweep", {{"points_per_param", points_per_param}}},
          {"gof", {{"level", gof.level}, {"min_expected", gof.min_expected}, {"covariance_gate", gof.covariance_gate}}},
          {"source", source == CountSource::paths ? "paths" : "direct"},
          {"drift", drift},
          {"kernel", kernel_name(kernel)}};
}

RunConfig parse_run_config(const json& doc) {
  JsonObjectReader r(doc, "");
  RunConfig cfg;
  cfg.measure = measure_from_config(r.raw("measure")).config();

  const bool has_m = r.has("m"), has_list = r.has("m_list");
  if (has_m && has_list) throw ConfigError("m_list", "give either m or m_list, not both");
  if (!has_m && !has_list) throw ConfigError("m", "missing required field (or give m_list)");
  if (has_m) {
    cfg.m_list = {parse_m(r.raw("m"), "m")};
  } else {
    const auto& list = r.raw("m_list");
    if (!list.is_array() || list.empty()) throw ConfigError("m_list", "expected a non-empty list of integers");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.m_list.push_back(parse_m(list[i], "m_list[" + std::to_string(i) + "]"));
    }
  }

  cfg.horizon = r.positive("T", 1.0);
  if (auto region = r.optional_raw("region")) {
    if (region->is_string()) {
      const auto name = region->get<std::string>();
      if (name == "outside_identity") {
        cfg.region_policy = RegionPolicy::outside_identity;
      } else if (name == "full") {
        cfg.region_policy = RegionPolicy::full;
      } else {
        throw ConfigError("region", "expected \"outside_identity\", \"full\" or a list of [lo, hi] pairs");
      }
    } else {
      cfg.region_policy = RegionPolicy::explicit_parts;
      cfg.region = parse_parts(*region, "region");
    }
  }
  cfg.replications = parse_count(r, "replications", 1, 1000);
  cfg.seed = parse_count(r, "seed", 0, 1);

  if (auto tol = r.optional_raw("tol")) {
    JsonObjectReader t(*tol, "tol");
    cfg.tol_bound = t.positive("bound", kBoundTolerance);
    cfg.tol_monte_carlo = t.positive("monte_carlo", kMonteCarloTolerance);
    t.finish();
  }
  cfg.resolution = static_cast<int>(r.integer("resolution", 16, 1 << 22, kDefaultTableResolution));
  if (auto sweep = r.optional_raw("sweep")) {
    JsonObjectReader s(*sweep, "sweep");
    cfg.points_per_param = static_cast<int>(s.integer("points_per_param", 1, 65, 9));
    s.finish();
  }
  if (auto gof = r.optional_raw("gof")) {
    JsonObjectReader g(*gof, "gof");
    cfg.gof.level = g.number_in("level", 1e-12, 0.5, 0.001);
    cfg.gof.min_expected = g.number_in("min_expected", 1.0, 1e6, 5.0);
    cfg.gof.covariance_gate = g.number_in("covariance_gate", 0.5, 100.0, 4.0);
    g.finish();
  }
  const auto source = r.string("source", "paths");
  if (source == "paths") {
    cfg.source = CountSource::paths;
  } else if (source == "direct") {
    cfg.source = CountSource::direct;
  } else {
    throw ConfigError("source", "expected \"paths\" or \"direct\"");
  }
  cfg.drift = r.number("drift", 0.0);
  if (!std::isfinite(cfg.drift)) throw ConfigError("drift", "must be finite");
  const auto kernel = r.string("kernel", "none");
  if (kernel == "none") {
    cfg.kernel = KernelChoice::none;
  } else if (kernel == "pi1") {
    cfg.kernel = KernelChoice::pi1;
  } else if (kernel == "pi2") {
    cfg.kernel = KernelChoice::pi2;
  } else {
    throw ConfigError("kernel", "expected \"none\", \"pi1\" or \"pi2\"");
  }
  if (r.has("output_dir")) cfg.output_dir = r.string("output_dir");
  r.finish();
  return cfg;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"discretize", "bound",  "simulate",  "counts",
                                              "verify",     "sweep", "conditions"};
  return names;
}

Report run_command(const std::string& command, RunConfig config, const RunOverrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.tol) {
    if (!(*overrides.tol > 0.0) || !std::isfinite(*overrides.tol)) {
      throw ConfigError("tol", "must be a finite positive number");
    }
    config.tol_bound = *overrides.tol;
  }
  const MeasureSpec spec = measure_from_config(config.measure);
  const Context ctx{config, spec, std::max(1, overrides.threads)};

  Report rep;
  rep.kind = command;
  rep.document = {{"command", command}, {"config", config.resolved()}};
  if (command == "discretize") {
    run_discretize(ctx, rep);
  } else if (command == "bound") {
    run_bound(ctx, rep);
  } else if (command == "simulate") {
    run_simulate(ctx, rep);
  } else if (command == "counts") {
    run_counts(ctx, rep);
  } else if (command == "verify") {
    run_verify(ctx, rep);
  } else if (command == "sweep") {
    run_sweep(ctx, rep);
  } else if (command == "conditions") {
    run_conditions(ctx, rep);
  } else {
    throw ArgumentError("unknown command '" + command + "'");
  }
  rep.document["passed"] = rep.passed;
  return rep;
}

}  // namespace levyeq
