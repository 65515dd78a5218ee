#include "synthgen/error.hpp"

namespace synthgen {

namespace {
std::string with_position(const std::string& what, std::size_t line, std::size_t field) {
    if (line == 0) return what;
    std::string out = what + " (line " + std::to_string(line);
    if (field != 0) out += ", field " + std::to_string(field);
    return out + ")";
}
} // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t field)
    : Error(with_position(what, line, field)), line_(line), field_(field) {}

} // namespace synthgen
