#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synthgen {

// Base for every error the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; line and field are 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t field = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::size_t field_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

} // namespace synthgen
