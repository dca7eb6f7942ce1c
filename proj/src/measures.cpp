#include "levyeq/measures.hpp"

#include <cmath>

#include <fmt/format.h>

#include "levyeq/errors.hpp"
#include "levyeq/json_reader.hpp"

namespace levyeq {

using nlohmann::json;

namespace {

struct BuiltDominating {
  DominatingMeasure measure;
  json config;
};

struct BuiltRatio {
  RealFunction ratio;
  RealFunction minus_one;  // rho - 1 without cancellation near rho = 1
  json config;
};

BuiltDominating dominating_from_config(const json& cfg, const std::string& path) {
  JsonObjectReader r(cfg, path);
  const std::string kind = r.string("kind");
  BuiltDominating out;
  if (kind == "uniform") {
    const double lo = r.number("lo");
    const double hi = r.number("hi");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw ConfigError(r.field("hi"), "need finite lo < hi");
    const double height = r.positive("height", 1.0);
    out.measure.density = [lo, hi, height](double y) { return (y > lo && y <= hi) ? height : 0.0; };
    out.measure.support = Region{{lo, hi}};
    out.measure.tail = TailDecay::compact;
    out.config = {{"kind", kind}, {"lo", lo}, {"hi", hi}, {"height", height}};
  } else if (kind == "gaussian") {
    const double scale = r.positive("scale", 1.0);
    const double height = r.positive("height", 1.0);
    out.measure.density = [scale, height](double y) { return height * std::exp(-0.5 * (y / scale) * (y / scale)); };
    out.measure.support = Region::real_line();
    out.measure.tail = TailDecay::gaussian;
    out.config = {{"kind", kind}, {"scale", scale}, {"height", height}};
  } else if (kind == "inverse_square") {
    out.measure.density = [](double y) { return 1.0 / (y * y); };
    out.measure.support = Region::real_line();
    out.measure.singularity_order = 2.0;
    out.measure.tail = TailDecay::polynomial;
    out.config = {{"kind", kind}};
  } else if (kind == "tempered_stable") {
    const double alpha = r.number("alpha");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError(r.field("alpha"), "must lie in ]0, 1[");
    const double c1 = r.positive("c1");
    const double c2 = r.positive("c2");
    const double eps = r.positive("epsilon");
    out.measure.density = [alpha, c1, c2, eps](double y) {
      const double a = std::abs(y);
      return (y < 0 ? c1 : c2) * std::exp(-eps * a) / std::pow(a, 1.0 + alpha);
    };
    out.measure.support = Region::real_line();
    out.measure.singularity_order = 1.0 + alpha;
    out.measure.tail = TailDecay::exponential;
    out.config = {{"kind", kind}, {"alpha", alpha}, {"c1", c1}, {"c2", c2}, {"epsilon", eps}};
  } else {
    throw ConfigError(r.field("kind"), "unknown dominating measure '" + kind + "'");
  }
  r.finish();
  return out;
}

BuiltRatio ratio_from_config(const json& cfg, const std::string& path) {
  JsonObjectReader r(cfg, path);
  const std::string kind = r.string("kind");
  BuiltRatio out;
  if (kind == "one") {
    out.ratio = [](double) { return 1.0; };
    out.minus_one = [](double) { return 0.0; };
    out.config = {{"kind", kind}};
  } else if (kind == "linear") {
    const double a = r.number("intercept", 0.0);
    const double b = r.number("slope", 1.0);
    out.ratio = [a, b](double y) { return a + b * y; };
    out.minus_one = [a, b](double y) { return (a - 1.0) + b * y; };
    out.config = {{"kind", kind}, {"intercept", a}, {"slope", b}};
  } else if (kind == "sine") {
    const double base = r.number("base");
    const double amp = r.number("amplitude");
    const double freq = r.number("frequency");
    const double phase = r.number("phase", 0.0);
    out.ratio = [=](double y) { return base + amp * std::sin(freq * y + phase); };
    out.minus_one = [=](double y) { return (base - 1.0) + amp * std::sin(freq * y + phase); };
    out.config = {{"kind", kind}, {"base", base}, {"amplitude", amp}, {"frequency", freq}, {"phase", phase}};
  } else if (kind == "exp_quadratic") {
    const double lambda = r.number_in("lambda", 0.0, kInf);
    out.ratio = [lambda](double y) { return std::exp(-lambda * y * y); };
    out.minus_one = [lambda](double y) { return std::expm1(-lambda * y * y); };
    out.config = {{"kind", kind}, {"lambda", lambda}};
  } else if (kind == "exp_two_sided") {
    const double neg = r.number("rate_neg");
    const double pos = r.number("rate_pos");
    out.ratio = [neg, pos](double y) { return y < 0 ? std::exp(neg * y) : std::exp(-pos * y); };
    out.minus_one = [neg, pos](double y) { return y < 0 ? std::expm1(neg * y) : std::expm1(-pos * y); };
    out.config = {{"kind", kind}, {"rate_neg", neg}, {"rate_pos", pos}};
  } else {
    throw ConfigError(r.field("kind"), "unknown ratio '" + kind + "'");
  }
  r.finish();
  return out;
}

void check_nonnegative(const MeasureSpec& spec, const std::string& field) {
  for (double y : support_sample(spec)) {
    const double v = spec.ratio_unchecked(y);
    if (!(v >= 0.0)) throw ConfigError(field, "ratio is negative or undefined at y = " + json(y).dump());
  }
}

json example1_default_ratio(double lipschitz, double bound) {
  return {{"kind", "sine"}, {"base", 0.5 * bound}, {"amplitude", 0.5 * bound},
          {"frequency", 2.0 * lipschitz / bound}, {"phase", 0.0}};
}

MeasureSpec build_example1(const json& params, const std::string& path) {
  JsonObjectReader r(params, path);
  const double lipschitz = r.positive("L");
  const double bound = r.positive("K");
  const json ratio_cfg = r.optional_raw("ratio").value_or(example1_default_ratio(lipschitz, bound));
  const json dom_cfg = r.optional_raw("dominating").value_or(json{{"kind", "gaussian"}, {"scale", 1.0}, {"height", 1.0}});
  r.finish();
  auto dom = dominating_from_config(dom_cfg, r.field("dominating"));
  auto ratio = ratio_from_config(ratio_cfg, r.field("ratio"));
  json config = {{"class", "example1"},
                 {"params", {{"L", lipschitz}, {"K", bound}, {"ratio", ratio.config}, {"dominating", dom.config}}}};
  MeasureSpec spec(dom.measure, ratio.ratio, ratio.minus_one, Example1Params{lipschitz, bound}, config);

  check_nonnegative(spec, r.field("ratio"));
  const auto sample = support_sample(spec);
  for (std::size_t i = 0; i + 1 < sample.size(); ++i) {
    const double a = sample[i], b = sample[i + 1];
    const double lhs = std::abs(spec.ratio_unchecked(a) - spec.ratio_unchecked(b));
    if (lhs > lipschitz * std::abs(a - b) * (1.0 + 1e-9) + 1e-15) {
      throw ConfigError(r.field("ratio"), "ratio is not L-Lipschitz near y = " + json(a).dump());
    }
  }
  if (std::abs(spec.ratio_unchecked(0.0)) > bound) throw ConfigError(r.field("ratio"), "|rho(0)| exceeds K");
  const auto total = tilde_mass(spec, {-kInf, kInf});
  if (total.divergent) throw ConfigError(r.field("dominating"), "example1 requires a finite dominating measure");
  return spec;
}

MeasureSpec build_example2(const json& params, const std::string& path) {
  JsonObjectReader r(params, path);
  const double eps = r.positive("epsilon");
  const double upper = r.positive("M");
  const double lambda = r.positive("lambda");
  r.finish();
  if (eps > upper) throw ConfigError(r.field("M"), "need epsilon <= M");
  if (lambda < eps || lambda > upper) throw ConfigError(r.field("lambda"), "need epsilon <= lambda <= M");
  auto dom = dominating_from_config({{"kind", "inverse_square"}}, r.field("dominating"));
  auto ratio = ratio_from_config({{"kind", "exp_quadratic"}, {"lambda", lambda}}, r.field("ratio"));
  json config = {{"class", "example2"}, {"params", {{"lambda", lambda}, {"epsilon", eps}, {"M", upper}}}};
  return MeasureSpec(dom.measure, ratio.ratio, ratio.minus_one, Example2Params{lambda, eps, upper}, config);
}

MeasureSpec build_example3(const json& params, const std::string& path) {
  JsonObjectReader r(params, path);
  Example3Params p{};
  p.alpha = r.number("alpha");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw ConfigError(r.field("alpha"), "must lie in ]0, 1[");
  p.c1 = r.positive("c1");
  p.c2 = r.positive("c2");
  p.epsilon = r.positive("epsilon");
  p.upper = r.positive("M");
  p.lambda1 = r.positive("lambda1");
  p.lambda2 = r.positive("lambda2");
  r.finish();
  if (p.epsilon > p.upper) throw ConfigError(r.field("M"), "need epsilon <= M");
  if (p.lambda1 < p.epsilon || p.lambda1 > p.upper) throw ConfigError(r.field("lambda1"), "need epsilon <= lambda1 <= M");
  if (p.lambda2 < p.epsilon || p.lambda2 > p.upper) throw ConfigError(r.field("lambda2"), "need epsilon <= lambda2 <= M");
  auto dom = dominating_from_config(
      {{"kind", "tempered_stable"}, {"alpha", p.alpha}, {"c1", p.c1}, {"c2", p.c2}, {"epsilon", p.epsilon}},
      r.field("dominating"));
  auto ratio = ratio_from_config(
      {{"kind", "exp_two_sided"}, {"rate_neg", p.lambda1 - p.epsilon}, {"rate_pos", p.lambda2 - p.epsilon}},
      r.field("ratio"));
  json config = {{"class", "example3"},
                 {"params",
                  {{"alpha", p.alpha},
                   {"c1", p.c1},
                   {"c2", p.c2},
                   {"lambda1", p.lambda1},
                   {"lambda2", p.lambda2},
                   {"epsilon", p.epsilon},
                   {"M", p.upper}}}};
  return MeasureSpec(dom.measure, ratio.ratio, ratio.minus_one, p, config);
}

MeasureSpec build_custom(const json& params, const std::string& path) {
  JsonObjectReader r(params, path);
  const json dom_cfg = r.raw("dominating");
  const json ratio_cfg = r.raw("ratio");
  r.finish();
  auto dom = dominating_from_config(dom_cfg, r.field("dominating"));
  auto ratio = ratio_from_config(ratio_cfg, r.field("ratio"));
  json config = {{"class", "custom"}, {"params", {{"dominating", dom.config}, {"ratio", ratio.config}}}};
  MeasureSpec spec(dom.measure, ratio.ratio, ratio.minus_one, CustomParams{}, config);
  check_nonnegative(spec, r.field("ratio"));
  return spec;
}

json dominating_config_of(const MeasureSpec& spec) {
  const auto& params = spec.config().at("params");
  const std::string cls = spec.class_name();
  if (cls == "example1" || cls == "custom") return params.at("dominating");
  if (cls == "example2") return {{"kind", "inverse_square"}};
  const auto& p = std::get<Example3Params>(spec.params());
  return {{"kind", "tempered_stable"}, {"alpha", p.alpha}, {"c1", p.c1}, {"c2", p.c2}, {"epsilon", p.epsilon}};
}

}  // namespace

MeasureSpec::MeasureSpec(DominatingMeasure dominating, RealFunction ratio, RealFunction ratio_minus_one,
                         ClassParams params, json config)
    : dominating_(std::move(dominating)),
      ratio_(std::move(ratio)),
      ratio_m1_(std::move(ratio_minus_one)),
      params_(params),
      config_(std::move(config)) {
  if (!ratio_m1_) ratio_m1_ = [r = ratio_](double y) { return r(y) - 1.0; };
}

std::string MeasureSpec::class_name() const {
  switch (params_.index()) {
    case 0:
      return "example1";
    case 1:
      return "example2";
    case 2:
      return "example3";
    default:
      return "custom";
  }
}

double MeasureSpec::ratio(double y) const {
  if (y == 0.0 && dominating_.singularity_order > 0.0) {
    throw DomainError("ratio evaluated at 0 for a dominating measure singular at 0");
  }
  if (!dominating_.support.contains(y)) throw DomainError("ratio evaluated outside the support of the dominating measure");
  return ratio_(y);
}

double MeasureSpec::nu_density(double y) const {
  const double d = dominating_.density(y);
  if (d == 0.0) return 0.0;
  const double r = ratio_(y);
  return r == 0.0 ? 0.0 : r * d;
}

MeasureSpec MeasureSpec::dominating_spec() const {
  return make_custom(dominating_config_of(*this), {{"kind", "one"}});
}

MeasureSpec measure_from_config(const json& config) {
  JsonObjectReader r(config, "measure");
  const std::string cls = r.string("class");
  const json params = r.optional_raw("params").value_or(json::object());
  r.finish();
  const std::string path = r.field("params");
  if (cls == "example1") return build_example1(params, path);
  if (cls == "example2") return build_example2(params, path);
  if (cls == "example3") return build_example3(params, path);
  if (cls == "custom") return build_custom(params, path);
  throw ConfigError(r.field("class"), "unknown measure class '" + cls + "'");
}

MeasureSpec make_example1(double lipschitz, double bound_at_zero) {
  return measure_from_config({{"class", "example1"}, {"params", {{"L", lipschitz}, {"K", bound_at_zero}}}});
}

MeasureSpec make_example1(double lipschitz, double bound_at_zero, const json& ratio, const json& dominating) {
  return measure_from_config(
      {{"class", "example1"},
       {"params", {{"L", lipschitz}, {"K", bound_at_zero}, {"ratio", ratio}, {"dominating", dominating}}}});
}

MeasureSpec make_example2(double lambda, double epsilon, double upper) {
  return measure_from_config(
      {{"class", "example2"}, {"params", {{"lambda", lambda}, {"epsilon", epsilon}, {"M", upper}}}});
}

MeasureSpec make_example3(const Example3Params& p) {
  return measure_from_config({{"class", "example3"},
                              {"params",
                               {{"alpha", p.alpha},
                                {"c1", p.c1},
                                {"c2", p.c2},
                                {"lambda1", p.lambda1},
                                {"lambda2", p.lambda2},
                                {"epsilon", p.epsilon},
                                {"M", p.upper}}}});
}

MeasureSpec make_custom(const json& dominating, const json& ratio) {
  return measure_from_config({{"class", "custom"}, {"params", {{"dominating", dominating}, {"ratio", ratio}}}});
}

// ---------------------------------------------------------------------------

Scalar to_scalar(const QuadratureResult& q) {
  Scalar s;
  s.value = q.divergent ? kInf : q.value;
  s.error = q.error_estimate;
  s.finite = !q.divergent;
  s.converged = q.converged;
  return s;
}

QuadratureResult integrate_tilde(const MeasureSpec& spec, const RealFunction& g, const Interval& interval,
                                 std::vector<double> breakpoints, double tol) {
  const auto& dom = spec.dominating();
  const Region parts = dom.support.intersect(interval);
  QuadratureResult total;
  if (parts.empty()) return total;
  const double part_tol = tol / static_cast<double>(parts.parts().size());
  auto integrand = [&](double y) {
    const double d = dom.density(y);
    if (d == 0.0) return 0.0;
    const double v = g(y);
    return v == 0.0 ? 0.0 : v * d;
  };
  IntegrationHints hints{dom.tail, std::move(breakpoints)};
  for (const auto& p : parts.parts()) total += integrate(integrand, p, hints, part_tol);
  return total;
}

namespace {

// Cheap certain check: a neighbourhood of 0 under nu_tilde with order >= 1 has
// infinite nu-mass unless rho vanishes at 0.
bool mass_diverges_at_zero(const MeasureSpec& spec, const Interval& iv) {
  if (spec.dominating().singularity_order < 1.0) return false;
  const double probe = 1e-12;
  const bool right = iv.lo <= 0.0 && iv.hi > 0.0;
  const bool left = iv.lo < 0.0 && iv.hi >= 0.0;
  if (right && spec.dominating().support.contains(probe) && spec.ratio_unchecked(probe) > 0.0) return true;
  if (left && spec.dominating().support.contains(-probe) && spec.ratio_unchecked(-probe) > 0.0) return true;
  return false;
}

QuadratureResult checked_mass(const MeasureSpec& spec, const RealFunction& g, const Interval& iv, double tol,
                              const char* what) {
  auto q = integrate_tilde(spec, g, iv, {}, tol);
  if (q.divergent) {
    throw DivergenceError(fmt::format("{} of ]{}, {}] is infinite", what, iv.lo, iv.hi));
  }
  return q;
}

}  // namespace

QuadratureResult interval_mass(const MeasureSpec& spec, const Interval& interval, double tol) {
  if (mass_diverges_at_zero(spec, interval)) {
    throw DivergenceError(fmt::format("nu-mass of ]{}, {}] is infinite (singular at 0)", interval.lo, interval.hi));
  }
  return checked_mass(spec, [&](double y) { return spec.ratio_unchecked(y); }, interval, tol, "nu-mass");
}

QuadratureResult tilde_mass(const MeasureSpec& spec, const Interval& interval, double tol) {
  return checked_mass(spec, [](double) { return 1.0; }, interval, tol, "nu_tilde-mass");
}

QuadratureResult region_mass(const MeasureSpec& spec, const Region& region, double tol) {
  QuadratureResult total;
  for (const auto& p : region.parts()) total += interval_mass(spec, p, tol / region.parts().size());
  return total;
}

Scalar hellinger_integral(const MeasureSpec& spec, double tol) {
  auto g = [&](double y) {
    // sqrt(rho) - 1 = (rho - 1) / (sqrt(rho) + 1), accurate near rho = 1.
    const double s = spec.ratio_minus_one(y) / (std::sqrt(spec.ratio_unchecked(y)) + 1.0);
    return s * s;
  };
  // sqrt(rho) has a kink wherever rho touches 0; those are local minima of rho.
  std::vector<double> kinks;
  auto slope = [&](double y) {
    const double h = 1e-6 * std::max(1.0, std::abs(y));
    return spec.ratio_unchecked(y + h) - spec.ratio_unchecked(y - h);
  };
  for (const auto& part : spec.dominating().support.parts()) {
    for (double y : sign_changes(slope, part, spec.dominating().tail, 512)) {
      if (spec.ratio_unchecked(y) < 1e-6) kinks.push_back(y);
    }
  }
  return to_scalar(integrate_tilde(spec, g, {-kInf, kInf}, std::move(kinks), tol));
}

Scalar small_jump_moment(const MeasureSpec& spec, double tol) {
  return to_scalar(integrate_tilde(spec, [&](double y) { return std::abs(y) * spec.ratio_unchecked(y); }, {-1.0, 1.0},
                                   {}, tol));
}

Scalar eta_functional(const MeasureSpec& spec, double tol) {
  auto moment = small_jump_moment(spec, tol);
  if (!moment.finite) return moment;
  return to_scalar(integrate_tilde(spec, [&](double y) { return y * spec.ratio_unchecked(y); }, {-kInf, kInf}, {}, tol));
}

Scalar gamma_star_functional(const MeasureSpec& spec, double tol) {
  return to_scalar(
      integrate_tilde(spec, [&](double y) { return y * spec.ratio_minus_one(y); }, {-1.0, 1.0}, {}, tol));
}

Scalar truncated_mean(const MeasureSpec& spec, double tol) {
  return to_scalar(integrate_tilde(spec, [&](double y) { return y * spec.ratio_unchecked(y); }, {-1.0, 1.0}, {}, tol));
}

Functionals functionals(const MeasureSpec& spec, double tol) {
  Functionals f;
  f.hellinger = hellinger_integral(spec, tol);
  if (!f.hellinger.finite) throw ConditionError("M2", "int (sqrt(rho) - 1)^2 dnu_tilde diverges");
  f.m4_moment = small_jump_moment(spec, tol);
  f.eta = eta_functional(spec, tol);
  f.gamma_star = gamma_star_functional(spec, tol);
  return f;
}

std::vector<double> support_sample(const MeasureSpec& spec) {
  constexpr int kPoints = 1001;
  const Region window = spec.dominating().support.intersect(Interval{-20.0, 20.0});
  double length = 0.0;
  for (const auto& p : window.parts()) length += p.length();
  std::vector<double> out;
  if (!(length > 0.0)) return out;
  out.reserve(kPoints);
  for (const auto& p : window.parts()) {
    const int n = std::max(2, static_cast<int>(std::lround(kPoints * p.length() / length)));
    for (int k = 0; k < n; ++k) {
      const double y = p.lo + (k + 0.5) / n * p.length();
      if (y != 0.0) out.push_back(y);
    }
  }
  return out;
}

}  // namespace levyeq
