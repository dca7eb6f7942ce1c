#include "levyeq/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace levyeq {

using nlohmann::json;

namespace {

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string f(double x) { return format_number(x); }
std::string b(bool x) { return x ? "true" : "false"; }

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

json to_json(const Interval& iv) { return json::array({num(iv.lo), num(iv.hi)}); }

json to_json(const Region& region) {
  json out = json::array();
  for (const auto& p : region.parts()) out.push_back(to_json(p));
  return out;
}

json to_json(const QuadratureResult& q) {
  return {{"value", num(q.divergent ? kInf : q.value)},
          {"error", num(q.error_estimate)},
          {"rounds", q.refinement_rounds},
          {"converged", q.converged},
          {"divergent", q.divergent}};
}

json to_json(const Scalar& s) {
  return {{"value", num(s.value)}, {"error", num(s.error)}, {"finite", s.finite}, {"converged", s.converged}};
}

json to_json(const DiscretizationError& d) {
  return {{"m", d.m},
          {"total", num(d.total())},
          {"error", num(d.total_error())},
          {"identity", to_json(d.identity)},
          {"finite", to_json(d.finite)},
          {"tails", to_json(d.tails)},
          {"finite_negative", num(d.finite_negative)},
          {"finite_positive", num(d.finite_positive)}};
}

json to_json(const std::vector<BoundTerm>& terms) {
  json out = json::object();
  for (const auto& t : terms) out[t.name] = num(t.value);
  return out;
}

json to_json(const BoundCheck& c) { return {{"checked", c.checked}, {"holds", c.holds}, {"detail", c.detail}}; }

json to_json(const ConditionReport& r) {
  json m3 = json::array();
  for (const auto& e : r.m3) {
    m3.push_back({{"m", e.m}, {"value", num(e.value)}, {"error", num(e.error)}, {"divergent", e.divergent}});
  }
  return {{"M1", {{"holds", r.m1}, {"note", "nu is given as rho * nu_tilde"}}},
          {"M2", {{"holds", r.m2_holds()}, {"hellinger", to_json(r.m2)}}},
          {"M3", {{"nonincreasing", r.m3_nonincreasing}, {"table", m3}}},
          {"M4", {{"holds", r.m4_holds()}, {"nu", to_json(r.m4_nu)}, {"nu_tilde", to_json(r.m4_tilde)}}}};
}

json to_json(const SweepResult& r) {
  json points = json::array();
  for (const auto& p : r.family.points) {
    json row = json::object();
    for (std::size_t i = 0; i < p.size(); ++i) row[r.family.param_names[i]] = num(p[i]);
    points.push_back(row);
  }
  json cells = json::array();
  for (const auto& c : r.cells) {
    json cell = {{"point", c.point}, {"m", c.m}, {"divergent", c.divergent}};
    if (!c.divergent) {
      cell["D"] = to_json(c.d);
      cell["bound_terms"] = to_json(c.bounds);
      cell["bound"] = to_json(c.bound);
    }
    cells.push_back(cell);
  }
  json worst = json::array();
  for (const auto& w : r.worst) {
    worst.push_back({{"m", w.m},
                     {"worst_D", num(w.worst_total)},
                     {"error", num(w.worst_error)},
                     {"worst_finite", num(w.worst_finite)},
                     {"point", w.worst_point}});
  }
  json ratios = json::array();
  for (double x : r.finite_ratios) ratios.push_back(num(x));
  return {{"class", r.family.class_name},
          {"grid_note", "sup over the class replaced by a max over this finite parameter grid"},
          {"param_names", r.family.param_names},
          {"points", points},
          {"m_list", r.m_list},
          {"cells", cells},
          {"worst", worst},
          {"worst_nonincreasing", r.worst_nonincreasing},
          {"bounds_hold", r.bounds_hold},
          {"rate", {{"checked", r.rate_checked}, {"holds", r.rate_holds}, {"low", kRateLow}, {"high", kRateHigh},
                    {"finite_ratios", ratios}}},
          {"passed", r.passed()}};
}

json to_json(const GofReport& r) {
  json bins = json::array();
  for (const auto& g : r.bins) {
    bins.push_back({{"bin", g.label},
                    {"expected_mean", num(g.expected_mean)},
                    {"sample_mean", num(g.sample_mean)},
                    {"sample_variance", num(g.sample_variance)},
                    {"chi2", num(g.chi2)},
                    {"dof", g.dof},
                    {"p_value", num(g.p_value)},
                    {"tested", g.tested},
                    {"passed", g.passed}});
  }
  json cov = json::array();
  for (const auto& row : r.covariance) {
    json jr = json::array();
    for (double x : row) jr.push_back(num(x));
    cov.push_back(jr);
  }
  return {{"m", r.m},
          {"T", num(r.horizon)},
          {"replications", r.replications},
          {"seed", r.seed},
          {"bonferroni_level", num(r.bonferroni_level)},
          {"bins", bins},
          {"covariance", cov},
          {"max_abs_z", num(r.max_abs_z)},
          {"pairs_tested", r.pairs_tested},
          {"pairs_untested", r.pairs_untested},
          {"gof_passed", r.gof_passed},
          {"independence_passed", r.independence_passed},
          {"passed", r.passed()}};
}

json to_json(const RatioBoundReport& r) {
  auto est = [](const McEstimate& e) { return json{{"mean", num(e.mean)}, {"se", num(e.se)}}; };
  return {{"m", r.m},
          {"T", num(r.horizon)},
          {"region", to_json(r.region)},
          {"replications", r.replications},
          {"seed", r.seed},
          {"D_region", num(r.d_region)},
          {"sinh_bound", num(r.bound)},
          {"martingale", est(r.martingale)},
          {"abs_gap", est(r.abs_gap)},
          {"sinh_identity", est(r.sinh_mean)},
          {"max_consistency_error", num(r.max_consistency_error)},
          {"singular_paths", r.singular_paths},
          {"martingale_ok", r.martingale_ok},
          {"bound_ok", r.bound_ok},
          {"identity_ok", r.identity_ok},
          {"consistency_ok", r.consistency_ok},
          {"passed", r.passed()}};
}

json to_json(const LikelihoodReport& r) {
  return {{"u_value", num(r.u_value)},   {"compensator", num(r.compensator)}, {"jump_sum", num(r.jump_sum)},
          {"u_bar", num(r.u_bar)},       {"a_plus", num(r.a_plus)},           {"a_minus", num(r.a_minus)},
          {"ratio", num(r.ratio)},       {"singular", r.singular}};
}

json to_json(const Functionals& fn) {
  return {{"eta", to_json(fn.eta)},
          {"gamma_star", to_json(fn.gamma_star)},
          {"hellinger", to_json(fn.hellinger)},
          {"m4_moment", to_json(fn.m4_moment)}};
}

Table grid_table(const GridLayout& layout) {
  Table t{"grid_m" + std::to_string(layout.m()), {"index", "tag", "left", "right"}, {}};
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& bin = layout[i];
    t.add_row({std::to_string(i), bin.tag.label(), f(bin.span.lo), f(bin.span.hi)});
  }
  return t;
}

Table discretization_table(const DiscretizedMeasure& disc) {
  const auto& layout = disc.grid();
  Table t{"ratios_m" + std::to_string(layout.m()), {"index", "tag", "left", "right", "ratio", "nu_mass", "nu_tilde_mass"},
          {}};
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& bin = layout[i];
    t.add_row({std::to_string(i), bin.tag.label(), f(bin.span.lo), f(bin.span.hi), f(disc.ratios()[i]),
               f(disc.nu_masses()[i]), f(disc.tilde_masses()[i])});
  }
  return t;
}

Table path_table(const std::vector<JumpPath>& paths) {
  Table t{"paths", {"path", "time", "size"}, {}};
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (const auto& j : paths[p].jumps) t.add_row({std::to_string(p), f(j.time), f(j.size)});
  }
  return t;
}

Table path_header_table(const std::vector<JumpPath>& paths) {
  Table t{"path_headers", {"path", "T", "drift", "jumps"}, {}};
  for (std::size_t p = 0; p < paths.size(); ++p) {
    t.add_row({std::to_string(p), f(paths[p].horizon), f(paths[p].drift), std::to_string(paths[p].jumps.size())});
  }
  return t;
}

Table counts_table(const GridLayout& layout, const std::vector<CountVector>& counts) {
  Table t{"counts", {"replication", "index", "tag", "count"}, {}};
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t i = 0; i < layout.size(); ++i) {
      t.add_row({std::to_string(r), std::to_string(i), layout[i].tag.label(), std::to_string(counts[r].counts[i])});
    }
  }
  return t;
}

Table bound_rows_table(const std::vector<BoundRow>& rows) {
  Table t{"bound", {"m", "D_m", "error", "identity", "finite", "tails", "sinh_bound"}, {}};
  if (!rows.empty()) {
    for (const auto& term : rows.front().terms) t.header.push_back(term.name);
  }
  t.header.push_back("bound_checked");
  t.header.push_back("bound_holds");
  for (const auto& r : rows) {
    std::vector<std::string> row{std::to_string(r.m),       f(r.d.total()),       f(r.d.total_error()),
                                 f(r.d.identity.value),     f(r.d.finite.value),  f(r.d.tails.value),
                                 f(r.sinh_bound)};
    for (const auto& term : r.terms) row.push_back(f(term.value));
    row.push_back(b(r.check.checked));
    row.push_back(b(r.check.holds));
    t.add_row(std::move(row));
  }
  return t;
}

Table sweep_table(const SweepResult& r) {
  Table t{"sweep", {"point"}, {}};
  for (const auto& n : r.family.param_names) t.header.push_back(n);
  for (const char* h : {"m", "divergent", "D_m", "error", "identity", "finite", "tails", "finite_negative",
                        "finite_positive", "bound_checked", "bound_holds"}) {
    t.header.push_back(h);
  }
  std::vector<std::string> term_names;
  for (const auto& c : r.cells) {
    if (!c.divergent) {
      for (const auto& term : c.bounds) term_names.push_back(term.name);
      break;
    }
  }
  for (const auto& n : term_names) t.header.push_back(n);
  for (const auto& c : r.cells) {
    std::vector<std::string> row{std::to_string(c.point)};
    for (double p : r.family.points[c.point]) row.push_back(f(p));
    row.push_back(std::to_string(c.m));
    row.push_back(b(c.divergent));
    if (c.divergent) {
      for (int i = 0; i < 9; ++i) row.emplace_back("");
      for (std::size_t i = 0; i < term_names.size(); ++i) row.emplace_back("");
    } else {
      for (double x : {c.d.total(), c.d.total_error(), c.d.identity.value, c.d.finite.value, c.d.tails.value,
                       c.d.finite_negative, c.d.finite_positive}) {
        row.push_back(f(x));
      }
      row.push_back(b(c.bound.checked));
      row.push_back(b(c.bound.holds));
      for (const auto& term : c.bounds) row.push_back(f(term.value));
    }
    t.add_row(std::move(row));
  }
  return t;
}

Table sweep_worst_table(const SweepResult& r) {
  Table t{"sweep_worst", {"m", "worst_D", "error", "worst_finite", "point"}, {}};
  for (const auto& w : r.worst) {
    t.add_row({std::to_string(w.m), f(w.worst_total), f(w.worst_error), f(w.worst_finite),
               std::to_string(w.worst_point)});
  }
  return t;
}

Table gof_table(const GofReport& r) {
  Table t{"gof_m" + std::to_string(r.m),
          {"bin", "expected_mean", "sample_mean", "sample_variance", "chi2", "dof", "p_value", "tested", "passed"},
          {}};
  for (const auto& g : r.bins) {
    t.add_row({g.label, f(g.expected_mean), f(g.sample_mean), f(g.sample_variance), f(g.chi2),
               std::to_string(g.dof), f(g.p_value), b(g.tested), b(g.passed)});
  }
  return t;
}

Table ratio_bound_table(const std::vector<RatioBoundReport>& rows) {
  Table t{"ratio_bound",
          {"m", "D_m", "bound", "E|1-R|", "SE", "martingale_mean", "martingale_se", "sinh_mean", "sinh_se",
           "passed"},
          {}};
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.m), f(r.d_region), f(r.bound), f(r.abs_gap.mean), f(r.abs_gap.se),
               f(r.martingale.mean), f(r.martingale.se), f(r.sinh_mean.mean), f(r.sinh_mean.se), b(r.passed())});
  }
  return t;
}

Table m3_table(const ConditionReport& r) {
  Table t{"m3", {"m", "D_m", "error", "divergent"}, {}};
  for (const auto& e : r.m3) t.add_row({std::to_string(e.m), f(e.value), f(e.error), b(e.divergent)});
  return t;
}

Table plot_table(const std::string& name, const std::string& x, const std::string& y,
                 const std::vector<std::pair<double, double>>& points) {
  Table t{"plot_" + name, {x, y}, {}};
  for (const auto& [a, c] : points) t.add_row({f(a), f(c)});
  return t;
}

}  // namespace levyeq
