#pragma once

#include <stdexcept>
#include <string>

namespace puw {

/// File access failures (open, read, write). CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file content (bad magic, truncated payload, invalid values).
/// CLI exit code 2.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace puw
