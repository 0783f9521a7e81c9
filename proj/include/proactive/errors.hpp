// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace proactive {

// Root of every error the library throws. The CLI maps the three families
// below onto its exit codes (config = 1, data = 2, everything else = 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input files.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyGraphError : public DataError {
 public:
  EmptyGraphError() : DataError("triples stream contains no triples") {}
};

class CoverageError : public DataError {
 public:
  using DataError::DataError;
};

// A checkpoint whose arrays do not fit its declared (or the expected) shape.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class EmptyCandidatesError : public Error {
 public:
  EmptyCandidatesError() : Error("candidate set is empty") {}
};

class UndefinedStateError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class MetricUndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace proactive
