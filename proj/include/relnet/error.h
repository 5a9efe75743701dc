#ifndef RELNET_ERROR_H_
#define RELNET_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace relnet {

enum class ErrorKind {
  kConfig,           // bad options, missing files
  kParse,            // malformed input text
  kType,             // undeclared predicate or argument type mismatch
  kUndefinedMetric,  // metric has no value for the given labels
  kNumeric,          // non-finite value during forward/backward
  kRuntime,
};

const char* to_string(ErrorKind kind);

/// Base class of every exception the library throws. `stage` is filled in by
/// the pipeline so the CLI can report which step failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  const std::string& stage() const { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorKind kind_;
  std::string stage_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::kConfig, message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, int column,
             const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class TypeError : public Error {
 public:
  explicit TypeError(const std::string& message)
      : Error(ErrorKind::kType, message) {}
};

class UndefinedMetricError : public Error {
 public:
  explicit UndefinedMetricError(const std::string& message)
      : Error(ErrorKind::kUndefinedMetric, message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error(ErrorKind::kNumeric, message) {}
};

}  // namespace relnet

#endif  // RELNET_ERROR_H_
