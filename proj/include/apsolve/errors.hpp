#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace apsolve {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ZeroInfimum : public Error {
 public:
  using Error::Error;
};

class ZeroMass : public Error {
 public:
  using Error::Error;
};

class NotContained : public Error {
 public:
  using Error::Error;
};

class NeverFinite : public Error {
 public:
  using Error::Error;
};

class ZeroDivisor : public Error {
 public:
  using Error::Error;
};

class AllShiftsBad : public Error {
 public:
  using Error::Error;
};

class WrongDomainTag : public Error {
 public:
  using Error::Error;
};

/// Raised when a Fourier mode carrying data meets a divisor below the
/// admissible floor. `modes` lists the offending lattice points.
class SmallDivisorBreach : public Error {
 public:
  SmallDivisorBreach(std::string what, std::vector<std::vector<long>> modes)
      : Error(std::move(what)), modes_(std::move(modes)) {}

  const std::vector<std::vector<long>>& modes() const noexcept { return modes_; }

 private:
  std::vector<std::vector<long>> modes_;
};

inline void require_dim(std::size_t got, std::size_t want, const char* where) {
  if (got != want) {
    throw DimensionMismatch(std::string(where) + ": dimension " + std::to_string(got) +
                            " does not match " + std::to_string(want));
  }
}

}  // namespace apsolve
