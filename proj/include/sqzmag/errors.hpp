#pragma once

#include <stdexcept>
#include <string>

namespace sqzmag {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric argument is outside the domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A config file, preset, or parameter set is malformed or inconsistent.
/// CLI exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// The request is well formed but physically or numerically unattainable
/// (squeezing deeper than the gain allows, rotation outside the small-angle
/// regime, trace too large to materialize). CLI exit code 3.
class InfeasibilityError : public Error {
public:
  using Error::Error;
};

/// A measurement could not be extracted from an otherwise valid run
/// (tone below the detection threshold). CLI exit code 4.
class MetrologyError : public Error {
public:
  using Error::Error;
};

} // namespace sqzmag
