#pragma once

#include <stdexcept>
#include <string>

namespace sqz {

/// Invalid or inconsistent configuration input (file contents, ranges,
/// unknown keys).  Mapped to exit code 2 by the CLI.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure (unreadable input, unwritable output).  Mapped to exit
/// code 4 by the CLI.  Numeric/domain errors use the std exception types and
/// map to exit code 3.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sqz
