#pragma once
#include <stdexcept>
#include <string>

namespace qvcz {

/// Unreadable or unwritable files; the CLI maps this to exit code 4.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qvcz
