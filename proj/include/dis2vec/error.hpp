#pragma once

#include <stdexcept>
#include <string>

namespace dis2vec {

// Base for every error raised by the library. Subclasses name the failure
// category; the CLI maps all of them to a nonzero exit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or missing input file.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Well-formed input that violates a data invariant (negative weight, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Caller passed an argument outside an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class EmptyVocabError : public Error {
 public:
  using Error::Error;
};

// A metric or similarity has no defined value for the given input.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace dis2vec
