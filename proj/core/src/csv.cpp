#include "synthgen/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>

#include "synthgen/error.hpp"

namespace synthgen::csv {

Document read(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    Document doc;
    doc.ends_with_newline = text.empty() || text.back() == '\n';

    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false; // distinguishes an empty record from a record with one empty field
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        if (field_started || !current.fields.empty()) {
            end_field();
            doc.records.push_back(std::move(current));
        }
        current = Record{};
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            field_started = true;
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            field.push_back(c);
            break;
        case '\n':
            end_record();
            ++line;
            current.line = line;
            break;
        default:
            field_started = true;
            field.push_back(c);
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", current.line, current.fields.size() + 1);
    end_record();
    return doc;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out << ',';
        first = false;
        const bool quote = f.find_first_of(",\"\r\n") != std::string::npos ||
                           (!f.empty() && (f.front() == ' ' || f.back() == ' '));
        if (!quote) {
            out << f;
            continue;
        }
        out << '"';
        for (char c : f) {
            if (c == '"') out << '"';
            out << c;
        }
        out << '"';
    }
    out << '\n';
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

} // namespace synthgen::csv
