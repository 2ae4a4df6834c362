#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace symtomo {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's mathematical domain (degenerate direction,
// non-finite value, non-normalized input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Grid too small, non-uniform, mismatched or unable to represent the data.
class GridError : public Error {
 public:
  using Error::Error;
};

// Requested (a,b) or (mu,nu) point not reachable from the supplied data.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// Potential whose marginal evolution equation is not purely differential.
class UnsupportedPotential : public Error {
 public:
  using Error::Error;
};

// Stable time step constraint violated.
class CflError : public Error {
 public:
  using Error::Error;
};

// Malformed or incompatible field file.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, long line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

// Non-fatal findings attached to a numerical result ("flagged result").
struct Diagnostics {
  std::vector<std::string> warnings;
  std::map<std::string, double> metrics;  // recorded numbers, never cause a flag

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool flagged() const noexcept { return !warnings.empty(); }
};

}  // namespace symtomo
