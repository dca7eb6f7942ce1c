#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyeq/grid.hpp"
#include "levyeq/harness.hpp"
#include "levyeq/simulate.hpp"

namespace levyeq {

/// Shortest decimal that reads back to the same double; "inf", "-inf", "nan"
/// for the non-finite values.
std::string format_number(double x);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string to_csv() const;
};

/// Output of one command: a structured document plus flat tables.
struct Report {
  std::string kind;
  nlohmann::json document;
  std::vector<Table> tables;
  bool passed = true;
};

nlohmann::json to_json(const Interval& iv);
nlohmann::json to_json(const Region& region);
nlohmann::json to_json(const QuadratureResult& q);
nlohmann::json to_json(const Scalar& s);
nlohmann::json to_json(const DiscretizationError& d);
nlohmann::json to_json(const std::vector<BoundTerm>& terms);
nlohmann::json to_json(const BoundCheck& c);
nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const SweepResult& r);
nlohmann::json to_json(const GofReport& r);
nlohmann::json to_json(const RatioBoundReport& r);
nlohmann::json to_json(const LikelihoodReport& r);
nlohmann::json to_json(const Functionals& f);

Table grid_table(const GridLayout& layout);
Table discretization_table(const DiscretizedMeasure& disc);
Table path_table(const std::vector<JumpPath>& paths);
Table path_header_table(const std::vector<JumpPath>& paths);
Table counts_table(const GridLayout& layout, const std::vector<CountVector>& counts);
Table bound_rows_table(const std::vector<BoundRow>& rows);
Table sweep_table(const SweepResult& r);
Table sweep_worst_table(const SweepResult& r);
Table gof_table(const GofReport& r);
Table ratio_bound_table(const std::vector<RatioBoundReport>& rows);
Table m3_table(const ConditionReport& r);
/// Two-column (x, y) plot data.
Table plot_table(const std::string& name, const std::string& x, const std::string& y,
                 const std::vector<std::pair<double, double>>& points);

}  // namespace levyeq
