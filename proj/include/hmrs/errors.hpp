#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmrs {

/// Bad input data: unparseable files, dangling references, unknown ids.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
  DataError(const std::string& path, std::size_t line, const std::string& reason)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + reason),
        line_(line) {}

  /// 1-based line number for parse errors, 0 otherwise.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Invalid configuration or arguments, detected before any compute.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hmrs
