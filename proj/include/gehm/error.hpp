#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gehm {

// Every failure the library reports derives from Error; the CLI maps the
// concrete type onto a process exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class InputError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

class UnsupportedFormError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Collects every problem found while validating a configuration.
class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
  std::vector<std::string> issues_;
};

}  // namespace gehm
