#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpgraphene {

/// Argument outside the mathematical domain of an operation (B <= 0, xi < 0, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A series or quadrature failed to reach its tolerance within its hard cap.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Well-formed input that violates a model invariant. `key()` names the
/// offending field or config key.
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

}  // namespace cpgraphene
