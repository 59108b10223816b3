#pragma once

#include <stdexcept>
#include <string>

namespace ld {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnsupportedStructure : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Violations of standing assumptions: surjectivity, strict complementarity,
// optimality of supplied anchors, cone membership of a direction.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(long iter, const std::string& what)
      : Error("iteration " + std::to_string(iter) + ": " + what), iter_(iter) {}
  long iter() const { return iter_; }

 private:
  long iter_;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ld
