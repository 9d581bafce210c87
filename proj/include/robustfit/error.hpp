#pragma once

#include <stdexcept>
#include <string>

namespace robustfit {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Input whose geometry leaves the requested quantity undefined
/// (e.g. all points identical, so no normalization scale exists).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Minimal sample that does not determine a unique model; callers resample.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace robustfit
