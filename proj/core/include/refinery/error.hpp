#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace refinery {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration: invalid policy values, unknown names, rule files that do not compile.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// A malformed input record. `line` is 1-based; 0 when unknown.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace refinery
