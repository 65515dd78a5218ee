#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synthgen::csv {

struct Record {
    std::size_t line = 0; ///< 1-based line on which the record starts
    std::vector<std::string> fields;
};

struct Document {
    std::vector<Record> records;
    bool ends_with_newline = true; ///< false when the final record is unterminated
};

/// Parses RFC-4180 style CSV (quoted fields, doubled quotes, CRLF or LF).
/// Blank lines are skipped. Throws ParseError on an unterminated quote.
Document read(std::istream& in);

/// Writes one record, quoting fields that need it. Always ends with '\n'.
void write_row(std::ostream& out, std::span<const std::string> fields);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict full-field parse of a finite real; surrounding blanks are ignored.
std::optional<double> parse_double(std::string_view text);

} // namespace synthgen::csv
