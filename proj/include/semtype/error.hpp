#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace semtype {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Dataset and bundle ids do not form a bijection.
class AlignmentError : public Error {
public:
    AlignmentError(std::vector<std::string> missing, std::vector<std::string> extra);

    /// Dataset ids with no bundle row.
    const std::vector<std::string>& missing() const noexcept { return missing_; }
    /// Bundle ids with no dataset record.
    const std::vector<std::string>& extra() const noexcept { return extra_; }

private:
    std::vector<std::string> missing_;
    std::vector<std::string> extra_;
};

}  // namespace semtype
