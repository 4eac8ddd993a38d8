#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecgbeat {

/// Input data or arguments violate a documented precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A text file could not be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// File missing, unreadable or unwritable.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ecgbeat
