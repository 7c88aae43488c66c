#pragma once

#include <stdexcept>
#include <string>

namespace nhb {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A formula hit a pole (e.g. vanishing denominator of the group velocity).
class SingularParameter : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// Non-finite intermediate, root-finder or quadrature failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Sampling too coarse for the requested output window.
class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Closed form requested outside the coupling regime it describes.
class WrongRegime : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// No real coupling strength makes the eigenvalues coalesce.
class NoCoalescence : public Error {
 public:
  NoCoalescence(const std::string& what, double min_splitting)
      : Error(what), min_splitting_(min_splitting) {}
  double min_splitting() const noexcept { return min_splitting_; }

 private:
  double min_splitting_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class NoSignal : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhb
