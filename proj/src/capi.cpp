#include "levyeq/levyeq.h"

#include <algorithm>
#include <new>
#include <string>
#include <vector>

#include "levyeq/errors.hpp"
#include "levyeq/runner.hpp"

struct lq_measure {
  levyeq::MeasureSpec spec;
};

struct lq_discretized {
  levyeq::DiscretizedMeasure disc;
};

struct lq_path {
  levyeq::JumpPath path;
};

struct lq_report {
  std::string json;
  std::string config;
  bool passed;
  std::vector<std::string> names;
  std::vector<std::string> csv;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_field;
thread_local std::string g_output_dir;

lq_status status_of(levyeq::ErrorKind kind) {
  switch (kind) {
    case levyeq::ErrorKind::argument:
      return LQ_ERR_ARGUMENT;
    case levyeq::ErrorKind::config:
      return LQ_ERR_CONFIG;
    case levyeq::ErrorKind::divergence:
      return LQ_ERR_DIVERGENCE;
    case levyeq::ErrorKind::domain:
      return LQ_ERR_DOMAIN;
    case levyeq::ErrorKind::singular:
      return LQ_ERR_SINGULAR;
    case levyeq::ErrorKind::condition:
      return LQ_ERR_CONDITION;
  }
  return LQ_ERR_INTERNAL;
}

lq_status fail(lq_status status, std::string message, std::string field = {}) {
  g_error = std::move(message);
  g_field = std::move(field);
  return status;
}

template <typename Fn>
lq_status guarded(Fn&& fn) {
  try {
    fn();
    return LQ_OK;
  } catch (const levyeq::ConfigError& e) {
    return fail(LQ_ERR_CONFIG, e.what(), e.field());
  } catch (const levyeq::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return fail(LQ_ERR_CONFIG, std::string("invalid JSON: ") + e.what(), "<root>");
  } catch (const std::bad_alloc&) {
    return fail(LQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LQ_ERR_INTERNAL, e.what());
  }
}

lq_status null_argument(const char* name) { return fail(LQ_ERR_ARGUMENT, std::string(name) + " is null"); }

size_t copy_out(const std::vector<double>& v, double* out, size_t capacity) {
  const size_t n = std::min(v.size(), capacity);
  for (size_t i = 0; i < n; ++i) out[i] = v[i];
  return n;
}

levyeq::RunConfig parse_config(const char* text) {
  return levyeq::parse_run_config(nlohmann::json::parse(text));
}

}  // namespace

extern "C" {

const char* lq_last_error(void) { return g_error.c_str(); }
const char* lq_last_error_field(void) { return g_field.c_str(); }

const char* lq_status_name(lq_status status) {
  switch (status) {
    case LQ_OK:
      return "ok";
    case LQ_ERR_ARGUMENT:
      return "argument";
    case LQ_ERR_CONFIG:
      return "config";
    case LQ_ERR_DIVERGENCE:
      return "divergence";
    case LQ_ERR_DOMAIN:
      return "domain";
    case LQ_ERR_SINGULAR:
      return "singular";
    case LQ_ERR_CONDITION:
      return "condition";
    case LQ_ERR_INTERNAL:
      break;
  }
  return "internal";
}

const char* lq_version(void) { return "0.1.0"; }

lq_status lq_measure_from_json(const char* config_json, lq_measure** out) {
  if (!config_json) return null_argument("config_json");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new lq_measure{levyeq::measure_from_config(nlohmann::json::parse(config_json))}; });
}

void lq_measure_free(lq_measure* measure) { delete measure; }

lq_status lq_measure_ratio(const lq_measure* measure, double y, double* out) {
  if (!measure || !out) return null_argument("measure or out");
  return guarded([&] { *out = measure->spec.ratio(y); });
}

lq_status lq_interval_mass(const lq_measure* measure, double lo, double hi, double tol, double* value,
                           double* error) {
  if (!measure || !value) return null_argument("measure or value");
  return guarded([&] {
    const auto q = levyeq::interval_mass(measure->spec, {lo, hi}, tol > 0.0 ? tol : levyeq::kBoundTolerance);
    *value = q.value;
    if (error) *error = q.error_estimate;
  });
}

size_t lq_grid_size(int m) { return m >= 1 ? 2 * static_cast<size_t>(m) * static_cast<size_t>(m) : 0; }

lq_status lq_bin_index(int m, double y, size_t* out) {
  if (!out) return null_argument("out");
  if (m < 1) return fail(LQ_ERR_ARGUMENT, "m must be at least 1");
  return guarded([&] {
    const auto idx = levyeq::GridLayout(m).bin_index(y);
    if (!idx) throw levyeq::DomainError("y lies in the identity region ]-1/m, 1/m]");
    *out = *idx;
  });
}

lq_status lq_discretize(const lq_measure* measure, int m, double tol, int threads, lq_discretized** out) {
  if (!measure || !out) return null_argument("measure or out");
  if (m < 1) return fail(LQ_ERR_ARGUMENT, "m must be at least 1");
  return guarded([&] {
    *out = new lq_discretized{
        levyeq::discretize(measure->spec, m, tol > 0.0 ? tol : levyeq::kBoundTolerance, threads)};
  });
}

void lq_discretized_free(lq_discretized* disc) { delete disc; }

size_t lq_discretized_size(const lq_discretized* disc) { return disc ? disc->disc.grid().size() : 0; }

size_t lq_discretized_ratios(const lq_discretized* disc, double* out, size_t capacity) {
  return disc && out ? copy_out(disc->disc.ratios(), out, capacity) : 0;
}

size_t lq_discretized_masses(const lq_discretized* disc, double* out, size_t capacity) {
  return disc && out ? copy_out(disc->disc.nu_masses(), out, capacity) : 0;
}

lq_status lq_discretization_error(const lq_measure* measure, int m, double tol, int threads, double out[4]) {
  if (!measure || !out) return null_argument("measure or out");
  if (m < 1) return fail(LQ_ERR_ARGUMENT, "m must be at least 1");
  return guarded([&] {
    const auto d =
        levyeq::discretization_error(measure->spec, m, tol > 0.0 ? tol : levyeq::kBoundTolerance, threads);
    out[0] = d.identity.value;
    out[1] = d.finite.value;
    out[2] = d.tails.value;
    out[3] = d.total();
  });
}

lq_status lq_simulate(const lq_measure* measure, int m, int full_line, double horizon, double drift, uint64_t seed,
                      uint64_t index, lq_path** out) {
  if (!measure || !out) return null_argument("measure or out");
  if (!full_line && m < 1) return fail(LQ_ERR_ARGUMENT, "m must be at least 1");
  return guarded([&] {
    const auto region = full_line ? levyeq::Region::real_line() : levyeq::Region::outside_identity(m);
    std::vector<double> breaks;
    if (m >= 1) breaks = levyeq::GridLayout(m).boundaries();
    const levyeq::CompoundPoissonSampler sampler(measure->spec, region, levyeq::kDefaultTableResolution, breaks);
    levyeq::RandomStream rng(seed, index);
    *out = new lq_path{sampler.sample(horizon, drift, rng)};
  });
}

void lq_path_free(lq_path* path) { delete path; }

size_t lq_path_jump_count(const lq_path* path) { return path ? path->path.jumps.size() : 0; }

lq_status lq_path_jump(const lq_path* path, size_t i, double* time, double* size) {
  if (!path || !time || !size) return null_argument("path, time or size");
  if (i >= path->path.jumps.size()) return fail(LQ_ERR_ARGUMENT, "jump index out of range");
  *time = path->path.jumps[i].time;
  *size = path->path.jumps[i].size;
  return LQ_OK;
}

lq_status lq_extract_statistic(const lq_path* path, int m, uint64_t* out) {
  if (!path || !out) return null_argument("path or out");
  if (m < 1) return fail(LQ_ERR_ARGUMENT, "m must be at least 1");
  return guarded([&] {
    const auto counts = levyeq::extract_statistic(path->path, levyeq::GridLayout(m));
    for (size_t i = 0; i < counts.counts.size(); ++i) out[i] = counts.counts[i];
  });
}

void lq_options_init(lq_options* options) {
  if (!options) return;
  options->threads = 1;
  options->has_seed = 0;
  options->seed = 0;
  options->has_tol = 0;
  options->tol = 0.0;
}

size_t lq_command_count(void) { return levyeq::command_names().size(); }

const char* lq_command_name(size_t i) {
  const auto& names = levyeq::command_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

lq_status lq_check_config(const char* config_json) {
  if (!config_json) return null_argument("config_json");
  return guarded([&] { parse_config(config_json); });
}

lq_status lq_config_output_dir(const char* config_json, const char** out) {
  if (!config_json || !out) return null_argument("config_json or out");
  return guarded([&] {
    g_output_dir = parse_config(config_json).output_dir.value_or("");
    *out = g_output_dir.c_str();
  });
}

lq_status lq_run(const char* command, const char* config_json, const lq_options* options, lq_report** out) {
  if (!command || !config_json || !out) return null_argument("command, config_json or out");
  return guarded([&] {
    levyeq::RunOverrides ov;
    if (options) {
      ov.threads = options->threads;
      if (options->has_seed) ov.seed = options->seed;
      if (options->has_tol) ov.tol = options->tol;
    }
    const auto rep = levyeq::run_command(command, parse_config(config_json), ov);
    auto* r = new lq_report{rep.document.dump(2) + "\n", rep.document.at("config").dump(2) + "\n", rep.passed, {}, {}};
    for (const auto& t : rep.tables) {
      r->names.push_back(t.name);
      r->csv.push_back(t.to_csv());
    }
    *out = r;
  });
}

void lq_report_free(lq_report* report) { delete report; }

const char* lq_report_json(const lq_report* report) { return report ? report->json.c_str() : nullptr; }
const char* lq_report_config(const lq_report* report) { return report ? report->config.c_str() : nullptr; }
int lq_report_passed(const lq_report* report) { return report && report->passed ? 1 : 0; }
size_t lq_report_table_count(const lq_report* report) { return report ? report->names.size() : 0; }

const char* lq_report_table_name(const lq_report* report, size_t i) {
  return report && i < report->names.size() ? report->names[i].c_str() : nullptr;
}

const char* lq_report_table_csv(const lq_report* report, size_t i) {
  return report && i < report->csv.size() ? report->csv[i].c_str() : nullptr;
}

}  // extern "C"
