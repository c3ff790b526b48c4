#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relik {

/// Base for every error the toolkit raises. `kind()` is a short stable tag
/// used by the command-line front end when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column = 0)
      : Error("parse", message), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a schema (missing vectors, wrong tags).
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message, std::size_t line = 0)
      : Error("schema", message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Argument outside the domain of an operation (bad id, triple not a fact).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

/// Inconsistent configuration (scorer/store mismatch, empty sample).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

/// A randomized procedure could not produce what was asked for.
class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& message) : Error("sampling", message) {}
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, std::size_t epoch)
      : Error("divergence", message), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace relik
