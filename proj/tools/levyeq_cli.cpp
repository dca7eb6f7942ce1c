// Batch front end: reads a JSON run configuration, runs one command through
// the C API and writes report.json, resolved_config.json and one CSV per table.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include "CLI11.hpp"
#include "levyeq/levyeq.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;

constexpr const char* kOutEnv = "LEVYEQ_OUT_DIR";
constexpr const char* kDefaultOut = "levyeq_out";

int exit_code_for(lq_status status) {
  switch (status) {
    case LQ_OK:
      return kExitOk;
    case LQ_ERR_DIVERGENCE:
    case LQ_ERR_DOMAIN:
      return kExitDivergence;
    case LQ_ERR_SINGULAR:
    case LQ_ERR_CONDITION:
      return kExitCheckFailed;
    default:
      return kExitUsage;
  }
}

int report_error(lq_status status) {
  std::cerr << "levyeq: " << lq_status_name(status) << " error: " << lq_last_error() << "\n";
  const std::string field = lq_last_error_field();
  if (!field.empty()) std::cerr << "levyeq: offending field: " << field << "\n";
  return exit_code_for(status);
}

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return static_cast<bool>(out);
}

const char* describe(const std::string& command) {
  if (command == "discretize") return "Grid intervals and bin ratios for each m";
  if (command == "bound") return "Discretization error D_m with its components and class bounds";
  if (command == "simulate") return "Seeded jump paths on the likelihood region";
  if (command == "counts") return "Per-bin jump counts with Poisson goodness of fit";
  if (command == "verify") return "Monte-Carlo likelihood ratio bound and count law checks";
  if (command == "sweep") return "Worst-case D_m over a parameter grid";
  if (command == "conditions") return "Classify the measure against the admissibility conditions";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretization and likelihood checks for Levy measures"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;
  double tol = 0.0;

  for (size_t i = 0; i < lq_command_count(); ++i) {
    auto* sub = app.add_subcommand(lq_command_name(i), describe(lq_command_name(i)));
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed, overrides the config");
    sub->add_option("--out", out_dir,
                    std::string("Output directory (default: the config's output_dir, then $") + kOutEnv +
                        ", then " + kDefaultOut + ")");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));
    sub->add_option("--tol", tol, "Quadrature tolerance for bound computations, overrides the config")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "levyeq: cannot read " << config_path << "\n";
    return kExitUsage;
  }
  const std::string config((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (out_dir.empty()) {
    const char* config_out = nullptr;
    if (const auto st = lq_config_output_dir(config.c_str(), &config_out); st != LQ_OK) return report_error(st);
    const char* env = std::getenv(kOutEnv);
    if (config_out && *config_out) {
      out_dir = config_out;
    } else if (env && *env) {
      out_dir = env;
    } else {
      out_dir = kDefaultOut;
    }
  }

  lq_options options;
  lq_options_init(&options);
  options.threads = threads;
  if (sub->count("--seed")) {
    options.has_seed = 1;
    options.seed = seed;
  }
  if (sub->count("--tol")) {
    options.has_tol = 1;
    options.tol = tol;
  }

  lq_report* report = nullptr;
  if (const auto st = lq_run(command.c_str(), config.c_str(), &options, &report); st != LQ_OK) {
    return report_error(st);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  bool ok = !ec;
  ok = ok && write_file(fs::path(out_dir) / "report.json", lq_report_json(report));
  ok = ok && write_file(fs::path(out_dir) / "resolved_config.json", lq_report_config(report));
  for (size_t i = 0; ok && i < lq_report_table_count(report); ++i) {
    ok = write_file(fs::path(out_dir) / (std::string(lq_report_table_name(report, i)) + ".csv"),
                    lq_report_table_csv(report, i));
  }
  const bool passed = lq_report_passed(report) != 0;
  lq_report_free(report);
  if (!ok) {
    std::cerr << "levyeq: cannot write outputs to " << out_dir << "\n";
    return kExitUsage;
  }
  std::cout << command << ": " << (passed ? "passed" : "FAILED") << " (outputs in " << out_dir << ")\n";
  return passed ? kExitOk : kExitCheckFailed;
}
