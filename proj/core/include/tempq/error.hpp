#pragma once

#include <stdexcept>
#include <string>

namespace tempq {

// Base class for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed lexical input (time values, lexicon entries, CLI lists).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A graph, benchmark or model document that violates its format.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Graph content that is well-formed but inconsistent (e.g. start after end).
class DataError : public Error {
 public:
  using Error::Error;
};

// A query graph that cannot be evaluated.
class ExecutionError : public Error {
 public:
  using Error::Error;
};

// A precondition of an operation was not met by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace tempq
