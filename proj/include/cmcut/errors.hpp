#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cmcut {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distribution with no usable mass (e.g. all mass at degree 0).
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain where a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Odd half-edge total handed to a pairing routine.
class ParityError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent arguments.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling ran out of attempts.
class RejectionFailureError : public Error {
 public:
  RejectionFailureError(const std::string& what, std::uint64_t attempts)
      : Error(what), attempts_(attempts) {}
  std::uint64_t attempts() const noexcept { return attempts_; }

 private:
  std::uint64_t attempts_;
};

/// Requested 2-core is empty.
class NoCoreError : public Error {
 public:
  using Error::Error;
};

/// A configured computational limit would be exceeded.
class LimitError : public Error {
 public:
  using Error::Error;
};

/// Text or JSON input that fails to parse or validate.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Experiment specification that fails schema validation.
class SpecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmcut
