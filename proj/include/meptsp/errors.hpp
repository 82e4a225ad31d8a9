#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meptsp {

/// Malformed textual input. `location` is a byte offset for formulas and a
/// 1-based line number for line-oriented formats; `what()` spells out which.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& message, std::size_t location)
        : std::runtime_error(message), location_(location) {}

    std::size_t location() const noexcept { return location_; }

  private:
    std::size_t location_;
};

/// The request is well-formed but exceeds a hard computational bound.
class ResourceLimitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace meptsp
