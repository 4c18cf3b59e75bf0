#include "gehm/error.hpp"

namespace gehm {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& s : issues) {
    out += "\n  - ";
    out += s;
  }
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

}  // namespace gehm
