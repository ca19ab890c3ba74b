#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace psvr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph input (self-loop, duplicate edge, id out of range, disconnected).
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Random generation gave up (retry budget exhausted).
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// No connected degree-capped subgraph was found.
class SelectionError : public Error {
 public:
  using Error::Error;
};

/// API misuse at the protocol layer, e.g. an undeclared channel.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for its inputs, e.g. a gain against zero messages.
class MetricError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

struct FieldError {
  std::string path;
  std::string message;
};

/// Scenario validation failure; carries every offending field.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldError> fields);
  ValidationError(std::string path, std::string message);

  const std::vector<FieldError>& fields() const { return fields_; }

 private:
  std::vector<FieldError> fields_;
};

}  // namespace psvr
