#pragma once

#include <stdexcept>
#include <string>

namespace gelfand {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of the function being evaluated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// exp(A ln g) would leave the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class EigenIterationError : public Error {
 public:
  using Error::Error;
};

/// The existence predicate does not change sign across the initial bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration. `field` names the offending config path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace gelfand
