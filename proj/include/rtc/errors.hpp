#pragma once

#include <stdexcept>
#include <string>

namespace rtc {

/// Base class for every error the toolkit reports to a user.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceLoc {
  int line = 0;
  int column = 0;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, SourceLoc loc)
      : Error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + msg),
        loc_(loc) {}
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

// Raised when no timeout lies strictly in the future.
class CalendarExhausted : public EvalError {
 public:
  using EvalError::EvalError;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtc
