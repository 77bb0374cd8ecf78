#pragma once

#include <stdexcept>
#include <string>

namespace skylink {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Missing or inconsistent configuration (environment files, model configs).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares curve fit could not be performed on the given samples.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A training update produced a non-finite parameter.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string parameter_class, const std::string& what)
      : std::runtime_error(what), parameter_class_(std::move(parameter_class)) {}

  const std::string& parameter_class() const noexcept { return parameter_class_; }

 private:
  std::string parameter_class_;
};

/// Malformed CSV or JSON document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skylink
