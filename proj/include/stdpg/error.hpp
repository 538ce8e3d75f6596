#pragma once

#include <stdexcept>
#include <string>

namespace stdpg {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Requested polynomial order is outside the supported family (p < 3).
class UnsupportedOrder : public Error {
public:
  using Error::Error;
};

class InconsistentBoundaryData : public Error {
public:
  using Error::Error;
};

class AssemblyFailure : public Error {
public:
  using Error::Error;
};

class SolverFailure : public Error {
public:
  using Error::Error;
};

class FitFailure : public Error {
public:
  using Error::Error;
};

#define STDPG_REQUIRE(cond, ExceptionType, msg)                                \
  do {                                                                         \
    if (!(cond)) throw ExceptionType(std::string(msg));                        \
  } while (false)

} // namespace stdpg
