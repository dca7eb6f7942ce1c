#pragma once

#include <stdexcept>
#include <string>

namespace levyeq {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorKind {
  argument,    // precondition or parameter out of range
  config,      // malformed configuration record
  divergence,  // an integral required by the operation does not converge
  domain,      // function evaluated outside its domain
  singular,    // a likelihood ratio vanished at an observed jump
  condition,   // an admissibility condition on the measure failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

class ConfigError : public Error {
 public:
  /// `field` is the dotted path of the offending key, e.g. "measure.params.lambda".
  ConfigError(std::string field, const std::string& what)
      : Error(ErrorKind::config, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(ErrorKind::divergence, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class ConditionError : public Error {
 public:
  ConditionError(std::string condition, const std::string& what)
      : Error(ErrorKind::condition, condition + " violated: " + what), condition_(std::move(condition)) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

}  // namespace levyeq
