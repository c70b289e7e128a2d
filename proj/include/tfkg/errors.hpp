#pragma once

#include <stdexcept>
#include <string>

namespace tfkg {

// Coarse error classes; the CLI maps each to an exit code.
enum class ErrorKind { argument, config, data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct SchemaError : DataError {
  explicit SchemaError(const std::string& what) : DataError("schema error: " + what) {}
};

struct ParseError : DataError {
  explicit ParseError(const std::string& what) : DataError("parse error: " + what) {}
};

struct UniquenessError : DataError {
  explicit UniquenessError(const std::string& what) : DataError("uniqueness error: " + what) {}
};

struct LookupError : DataError {
  explicit LookupError(const std::string& what) : DataError("lookup error: " + what) {}
};

struct ShapeError : DataError {
  explicit ShapeError(const std::string& what) : DataError("shape error: " + what) {}
};

struct DimensionError : DataError {
  explicit DimensionError(const std::string& what) : DataError("dimension error: " + what) {}
};

struct CapacityError : DataError {
  explicit CapacityError(const std::string& what) : DataError("capacity error: " + what) {}
};

struct ExhaustionError : DataError {
  explicit ExhaustionError(const std::string& what) : DataError("exhaustion error: " + what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, "numeric error: " + what) {}
};

}  // namespace tfkg
