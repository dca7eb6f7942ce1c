#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "levyeq/errors.hpp"

namespace levyeq {

/// Strict reader for one JSON object: every key must be consumed, and every
/// failure names the dotted path of the offending field.
class JsonObjectReader {
 public:
  JsonObjectReader(const nlohmann::json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return object_.contains(key); }

  const nlohmann::json& raw(const std::string& key) {
    if (!object_.contains(key)) throw ConfigError(field(key), "missing required field");
    seen_.insert(key);
    return object_.at(key);
  }

  std::optional<nlohmann::json> optional_raw(const std::string& key) {
    if (!object_.contains(key)) return std::nullopt;
    seen_.insert(key);
    return std::optional<nlohmann::json>(std::in_place, object_.at(key));
  }

  double number(const std::string& key) { return as_number(raw(key), key); }

  double number(const std::string& key, double fallback) {
    auto v = optional_raw(key);
    return v ? as_number(*v, key) : fallback;
  }

  /// Number in [lo, hi]; pass infinities for one-sided checks.
  double number_in(const std::string& key, double lo, double hi, std::optional<double> fallback = std::nullopt) {
    double v;
    if (fallback && !has(key)) {
      v = *fallback;
    } else {
      v = number(key);
    }
    if (!(v >= lo && v <= hi)) {
      throw ConfigError(field(key), "value " + nlohmann::json(v).dump() + " outside [" + nlohmann::json(lo).dump() +
                                        ", " + nlohmann::json(hi).dump() + "]");
    }
    return v;
  }

  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
    double v = fallback && !has(key) ? *fallback : number(key);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field(key), "must be a finite positive number");
    return v;
  }

  long long integer(const std::string& key, long long lo, long long hi, std::optional<long long> fallback = std::nullopt) {
    if (fallback && !has(key)) return *fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) {
      throw ConfigError(field(key), "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "]");
    }
    return x;
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (fallback && !has(key)) return *fallback;
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& item : object_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(field(item.key()), "unknown field");
    }
  }

 private:
  double as_number(const nlohmann::json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }

  const nlohmann::json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace levyeq
