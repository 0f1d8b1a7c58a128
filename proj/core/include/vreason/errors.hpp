#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vreason {

// Root of every error the engine throws. Callers that only need to report
// failures can catch this; callers that react differently per failure kind
// catch the concrete subclasses below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Backend failures.
class TransportError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

class NoMatch : public Error {
 public:
  using Error::Error;
};

// Prompt rendering and parsing.
class MissingBinding : public Error {
 public:
  using Error::Error;
};

class UnknownPlaceholder : public Error {
 public:
  using Error::Error;
};

class EmptyResponse : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class MissingImage : public Error {
 public:
  using Error::Error;
};

// Dataset record that violates the ingestion schema. `index` is the
// zero-based record (line) index in the input file.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t index, const std::string& what)
      : Error("record " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Malformed line in a trace or record file; `line` is one-based.
class RecordFormatError : public Error {
 public:
  RecordFormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A backend call failed inside a pipeline. Carries the step context so a
// report can say where a run died.
class BackendError : public Error {
 public:
  BackendError(std::string role, int attempt, int step, const std::string& cause)
      : Error(role + " (attempt " + std::to_string(attempt) + ", step " +
              std::to_string(step) + "): " + cause),
        role_(std::move(role)),
        attempt_(attempt),
        step_(step) {}

  const std::string& role() const { return role_; }
  int attempt() const { return attempt_; }
  int step() const { return step_; }

 private:
  std::string role_;
  int attempt_;
  int step_;
};

}  // namespace vreason
