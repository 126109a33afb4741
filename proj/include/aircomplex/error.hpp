#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aircomplex {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  /// Stable machine-readable name ("MalformedRow", "UnknownVertex", ...).
  virtual const char* kind() const noexcept = 0;
};

#define AIRCOMPLEX_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                          \
  public:                                                              \
    using Error::Error;                                                \
    const char* kind() const noexcept override { return #Name; }       \
  };

class MalformedRow : public Error {
public:
  MalformedRow(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  const char* kind() const noexcept override { return "MalformedRow"; }
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

AIRCOMPLEX_DEFINE_ERROR(EmptyLog)
AIRCOMPLEX_DEFINE_ERROR(UnknownVertex)
AIRCOMPLEX_DEFINE_ERROR(TooFewVertices)
AIRCOMPLEX_DEFINE_ERROR(InvalidParams)
AIRCOMPLEX_DEFINE_ERROR(InvalidWeights)
AIRCOMPLEX_DEFINE_ERROR(InvalidBounds)
AIRCOMPLEX_DEFINE_ERROR(DegenerateVariance)
AIRCOMPLEX_DEFINE_ERROR(UnknownScenario)
AIRCOMPLEX_DEFINE_ERROR(UnknownRun)
AIRCOMPLEX_DEFINE_ERROR(NotReady)

#undef AIRCOMPLEX_DEFINE_ERROR

/// Raised by the sensitivity sweep when one sample row fails.
class SweepRowFailed : public Error {
public:
  SweepRowFailed(std::size_t row, const std::string& what)
      : Error("sample row " + std::to_string(row) + ": " + what), row_(row) {}
  const char* kind() const noexcept override { return "SweepRowFailed"; }
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

} // namespace aircomplex
