#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dockette {

/// Malformed input text. `line()` is 1-based, or 0 when the problem is not
/// tied to a particular line (e.g. a missing section at end of file).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line),
          message_(message) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::string message_;
};

} // namespace dockette
