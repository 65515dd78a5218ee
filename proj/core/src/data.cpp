#include "synthgen/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "synthgen/csv.hpp"
#include "synthgen/error.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::size_t resolve_class_column(const std::vector<std::string>& header, const ColumnSelector& sel) {
    if (const auto* idx = std::get_if<std::size_t>(&sel)) {
        if (*idx >= header.size())
            throw Error("class column index " + std::to_string(*idx) + " is out of range");
        return *idx;
    }
    const auto& name = std::get<std::string>(sel);
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error("class column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
}

void check_header(const csv::Record& header) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
        const auto& name = header.fields[i];
        if (name.empty()) throw ParseError("empty column name", header.line, i + 1);
        if (!seen.insert(name).second) throw ParseError("duplicate column name '" + name + "'", header.line, i + 1);
    }
}

Schema infer_from_records(const csv::Document& doc, const ColumnSelector& class_column,
                          const SchemaOptions& options) {
    if (doc.records.empty()) throw Error("empty input: no header row");
    if (doc.records.size() < 2) throw Error("empty input: no data rows");
    const auto& header = doc.records.front();
    check_header(header);
    const std::size_t width = header.fields.size();
    const std::size_t cls = resolve_class_column(header.fields, class_column);

    Schema schema;
    schema.class_index = cls;
    schema.attributes.resize(width);
    for (std::size_t j = 0; j < width; ++j) {
        auto& attr = schema.attributes[j];
        attr.name = header.fields[j];
        const bool forced = j == cls || std::find(options.force_categorical.begin(), options.force_categorical.end(),
                                                  attr.name) != options.force_categorical.end();
        bool numeric = !forced;
        std::vector<std::string> categories;
        std::set<std::string_view> seen;
        for (std::size_t r = 1; r < doc.records.size(); ++r) {
            const auto& rec = doc.records[r];
            if (rec.fields.size() != width)
                throw ParseError("expected " + std::to_string(width) + " fields, found " +
                                     std::to_string(rec.fields.size()),
                                 rec.line);
            const auto cell = trim(rec.fields[j]);
            if (cell == options.missing_marker) continue;
            if (numeric && !csv::parse_double(cell)) numeric = false;
            if (seen.insert(cell).second) categories.emplace_back(cell);
        }
        if (numeric) {
            attr.kind = AttributeKind::numeric;
        } else {
            attr.kind = AttributeKind::categorical;
            attr.categories = std::move(categories);
        }
    }
    schema.validate();
    return schema;
}

RawTable table_from_records(const csv::Document& doc, const Schema& schema, std::string_view missing_marker) {
    if (doc.records.empty()) throw Error("empty input: no header row");
    const auto& header = doc.records.front();
    const std::size_t width = schema.attributes.size();
    if (header.fields.size() != width)
        throw ParseError("header has " + std::to_string(header.fields.size()) + " columns, schema has " +
                             std::to_string(width),
                         header.line);
    for (std::size_t j = 0; j < width; ++j)
        if (header.fields[j] != schema.attributes[j].name)
            throw ParseError("header column '" + header.fields[j] + "' does not match schema attribute '" +
                                 schema.attributes[j].name + "'",
                             header.line, j + 1);

    RawTable table;
    table.schema = schema;
    table.rows.reserve(doc.records.size() - 1);
    for (std::size_t r = 1; r < doc.records.size(); ++r) {
        const auto& rec = doc.records[r];
        if (rec.fields.size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(rec.fields.size()),
                             rec.line);
        std::vector<Cell> row;
        row.reserve(width);
        for (std::size_t j = 0; j < width; ++j) {
            const auto cell = trim(rec.fields[j]);
            const auto& attr = schema.attributes[j];
            if (cell == missing_marker) {
                row.emplace_back(Missing{});
            } else if (attr.is_numeric()) {
                const auto v = csv::parse_double(cell);
                if (!v) throw ParseError("'" + std::string(cell) + "' is not a finite number", rec.line, j + 1);
                row.emplace_back(*v);
            } else {
                if (std::find(attr.categories.begin(), attr.categories.end(), cell) == attr.categories.end())
                    throw ParseError("unknown category '" + std::string(cell) + "' for attribute '" + attr.name + "'",
                                     rec.line, j + 1);
                row.emplace_back(std::string(cell));
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

} // namespace

// -- Schema --------------------------------------------------------------------

std::size_t AttributeSpec::category_index(std::string_view label) const {
    const auto it = std::find(categories.begin(), categories.end(), label);
    if (it == categories.end()) throw Error("unknown category '" + std::string(label) + "' for attribute '" + name + "'");
    return static_cast<std::size_t>(it - categories.begin());
}

void Schema::validate() const {
    if (attributes.empty()) throw Error("schema has no attributes");
    if (class_index >= attributes.size()) throw Error("class index out of range");
    std::set<std::string> names;
    for (const auto& a : attributes) {
        if (a.name.empty()) throw Error("attribute with empty name");
        if (!names.insert(a.name).second) throw Error("duplicate attribute name '" + a.name + "'");
        if (a.kind == AttributeKind::categorical) {
            std::set<std::string> cats(a.categories.begin(), a.categories.end());
            if (cats.size() != a.categories.size()) throw Error("attribute '" + a.name + "' repeats a category");
            if (a.categories.size() < 2)
                throw Error("categorical attribute '" + a.name + "' needs at least 2 distinct values");
        } else if (a.range && !(a.range->min <= a.range->max)) {
            throw Error("attribute '" + a.name + "' has min > max");
        }
    }
    if (attributes[class_index].kind != AttributeKind::categorical)
        throw Error("class attribute '" + attributes[class_index].name + "' must be categorical");
}

std::size_t Schema::encoded_width() const {
    std::size_t w = 0;
    for (const auto& a : attributes) w += a.is_numeric() ? 1 : a.categories.size();
    return w;
}

bool Schema::fitted() const {
    return std::all_of(attributes.begin(), attributes.end(),
                       [](const AttributeSpec& a) { return !a.is_numeric() || a.range.has_value(); });
}

std::uint64_t Schema::fingerprint() const {
    std::string canon = std::to_string(class_index);
    for (const auto& a : attributes) {
        canon += '\x1f';
        canon += a.name;
        canon += a.is_numeric() ? "\x1eN" : "\x1e" "C";
        for (const auto& c : a.categories) {
            canon += '\x1d';
            canon += c;
        }
        if (a.range) canon += "\x1e" + csv::format_double(a.range->min) + "\x1e" + csv::format_double(a.range->max);
    }
    return derive_seed(0x5eed5c4e3aULL, canon);
}

// -- RawTable ------------------------------------------------------------------

void RawTable::validate() const {
    schema.validate();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != schema.attributes.size())
            throw Error("row " + std::to_string(r) + " has " + std::to_string(row.size()) + " cells");
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto& attr = schema.attributes[j];
            if (std::holds_alternative<Missing>(row[j])) continue;
            if (attr.is_numeric()) {
                const auto* v = std::get_if<double>(&row[j]);
                if (!v || !std::isfinite(*v))
                    throw Error("row " + std::to_string(r) + ": attribute '" + attr.name + "' needs a finite number");
            } else {
                const auto* s = std::get_if<std::string>(&row[j]);
                if (!s) throw Error("row " + std::to_string(r) + ": attribute '" + attr.name + "' needs a label");
                attr.category_index(*s);
            }
        }
    }
}

std::size_t RawTable::missing_count() const {
    std::size_t n = 0;
    for (const auto& row : rows)
        for (const auto& c : row) n += std::holds_alternative<Missing>(c);
    return n;
}

// -- ingestion -----------------------------------------------------------------

Schema infer_schema(std::istream& in, const ColumnSelector& class_column, const SchemaOptions& options) {
    return infer_from_records(csv::read(in), class_column, options);
}

RawTable read_table(std::istream& in, const Schema& schema, std::string_view missing_marker) {
    schema.validate();
    return table_from_records(csv::read(in), schema, missing_marker);
}

RawTable ingest_csv(std::istream& in, const ColumnSelector& class_column, const SchemaOptions& options) {
    const auto doc = csv::read(in);
    const auto schema = infer_from_records(doc, class_column, options);
    return table_from_records(doc, schema, options.missing_marker);
}

RawTable impute_missing(RawTable table) {
    const std::size_t width = table.schema.attributes.size();
    for (std::size_t j = 0; j < width; ++j) {
        const auto& attr = table.schema.attributes[j];
        bool any_missing = false;
        double sum = 0.0;
        std::size_t present = 0;
        std::vector<std::size_t> counts(attr.categories.size(), 0);
        for (const auto& row : table.rows) {
            if (std::holds_alternative<Missing>(row[j])) {
                any_missing = true;
                continue;
            }
            ++present;
            if (attr.is_numeric())
                sum += std::get<double>(row[j]);
            else
                ++counts[attr.category_index(std::get<std::string>(row[j]))];
        }
        if (!any_missing) continue;
        if (present == 0) throw Error("attribute '" + attr.name + "' has no non-missing values to impute from");
        Cell fill;
        if (attr.is_numeric()) {
            fill = sum / static_cast<double>(present);
        } else {
            const auto best = std::max_element(counts.begin(), counts.end()); // first maximum = lowest index
            fill = attr.categories[static_cast<std::size_t>(best - counts.begin())];
        }
        for (auto& row : table.rows)
            if (std::holds_alternative<Missing>(row[j])) row[j] = fill;
    }
    return table;
}

// -- encoding ------------------------------------------------------------------

std::vector<ColumnRef> make_column_map(const Schema& schema) {
    std::vector<ColumnRef> map;
    map.reserve(schema.encoded_width());
    for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
        const auto& attr = schema.attributes[a];
        if (attr.is_numeric()) {
            map.push_back({a, std::nullopt});
        } else {
            for (std::size_t c = 0; c < attr.categories.size(); ++c) map.push_back({a, c});
        }
    }
    return map;
}

std::vector<std::string> encoded_column_names(const Schema& schema) {
    std::vector<std::string> names;
    for (const auto& ref : make_column_map(schema)) {
        const auto& attr = schema.attributes[ref.attribute];
        names.push_back(ref.category ? attr.name + "=" + attr.categories[*ref.category] : attr.name);
    }
    return names;
}

Schema fit_schema(const RawTable& table, std::span<const std::size_t> fit_rows) {
    Schema schema = table.schema;
    std::vector<std::size_t> all;
    if (fit_rows.empty()) {
        all.resize(table.rows.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        fit_rows = all;
    }
    for (std::size_t j = 0; j < schema.attributes.size(); ++j) {
        auto& attr = schema.attributes[j];
        if (!attr.is_numeric()) continue;
        std::optional<NumericRange> range;
        for (const std::size_t r : fit_rows) {
            if (r >= table.rows.size()) throw Error("fit row index out of range");
            const auto* v = std::get_if<double>(&table.rows[r][j]);
            if (!v) continue;
            if (!range)
                range = NumericRange{*v, *v};
            else {
                range->min = std::min(range->min, *v);
                range->max = std::max(range->max, *v);
            }
        }
        if (!range) throw Error("attribute '" + attr.name + "' has no values to fit a range on");
        attr.range = range;
    }
    return schema;
}

EncodedDataset encode(const RawTable& table, const Schema& fitted) {
    fitted.validate();
    if (!fitted.fitted()) throw Error("schema has unfitted numeric attributes");
    if (fitted.attributes.size() != table.schema.attributes.size())
        throw DimensionError("table and schema attribute counts differ");

    EncodedDataset out;
    out.schema = fitted;
    out.column_map = make_column_map(fitted);
    out.matrix = Matrix(table.rows.size(), out.column_map.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != fitted.attributes.size()) throw DimensionError("row " + std::to_string(r) + " has wrong width");
        std::size_t col = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto& attr = fitted.attributes[j];
            if (std::holds_alternative<Missing>(row[j]))
                throw Error("missing value in row " + std::to_string(r) + ", attribute '" + attr.name +
                            "'; impute before encoding");
            if (attr.is_numeric()) {
                const double v = std::get<double>(row[j]);
                const double span = attr.range->max - attr.range->min;
                const double scaled = span > 0.0 ? (v - attr.range->min) / span : 0.0;
                out.matrix(r, col++) = std::clamp(scaled, 0.0, 1.0);
            } else {
                const std::size_t c = attr.category_index(std::get<std::string>(row[j]));
                out.matrix(r, col + c) = 1.0;
                col += attr.categories.size();
            }
        }
    }
    return out;
}

EncodedDataset fit_encode(const RawTable& table) {
    return encode(table, fit_schema(table));
}

RawTable decode(const Matrix& rows, const Schema& fitted) {
    if (!fitted.fitted()) throw Error("schema has unfitted numeric attributes");
    const std::size_t w = fitted.encoded_width();
    if (rows.cols() != w)
        throw DimensionError("decode: matrix has " + std::to_string(rows.cols()) + " columns, schema needs " +
                             std::to_string(w));
    RawTable out;
    out.schema = fitted;
    out.rows.reserve(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const auto values = rows.row(r);
        std::vector<Cell> row;
        row.reserve(fitted.attributes.size());
        std::size_t col = 0;
        for (const auto& attr : fitted.attributes) {
            if (attr.is_numeric()) {
                const double v = std::clamp(values[col++], 0.0, 1.0);
                row.emplace_back(attr.range->min + v * (attr.range->max - attr.range->min));
            } else {
                const std::size_t k = attr.categories.size();
                std::size_t best = 0;
                for (std::size_t c = 1; c < k; ++c)
                    if (values[col + c] > values[col + best]) best = c; // strict: ties keep the lower index
                row.emplace_back(attr.categories[best]);
                col += k;
            }
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

// -- splitting -----------------------------------------------------------------

SplitIndices split_25_25_50(std::size_t n, std::uint64_t rng_seed) {
    if (n < 8) throw Error("split needs at least 8 instances, got " + std::to_string(n));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    CounterRng rng(rng_seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

    const std::size_t quarter = n / 4;
    SplitIndices out;
    out.rng_seed = rng_seed;
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(quarter));
    out.seed.assign(perm.begin() + static_cast<std::ptrdiff_t>(quarter),
                    perm.begin() + static_cast<std::ptrdiff_t>(2 * quarter));
    out.eval.assign(perm.begin() + static_cast<std::ptrdiff_t>(2 * quarter), perm.end());
    return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= m.rows()) throw DimensionError("row index out of range");
        std::copy(m.row(rows[i]).begin(), m.row(rows[i]).end(), out.row(i).begin());
    }
    return out;
}

EncodedDataset select_rows(const EncodedDataset& d, std::span<const std::size_t> rows) {
    return EncodedDataset{d.schema, select_rows(d.matrix, rows), d.column_map};
}

std::vector<std::size_t> class_labels(const EncodedDataset& d) {
    std::size_t first = d.column_map.size();
    std::size_t k = 0;
    for (std::size_t c = 0; c < d.column_map.size(); ++c) {
        if (d.column_map[c].attribute != d.schema.class_index) continue;
        if (first == d.column_map.size()) first = c;
        ++k;
    }
    if (k == 0) throw Error("dataset has no class columns");
    std::vector<std::size_t> labels(d.size());
    for (std::size_t r = 0; r < d.size(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (d.matrix(r, first + c) > d.matrix(r, first + best)) best = c;
        labels[r] = best;
    }
    return labels;
}

// -- persistence ---------------------------------------------------------------

void write_table(std::ostream& out, const RawTable& table, std::string_view missing_marker) {
    std::vector<std::string> fields;
    for (const auto& a : table.schema.attributes) fields.push_back(a.name);
    csv::write_row(out, fields);
    for (const auto& row : table.rows) {
        fields.clear();
        for (const auto& cell : row) {
            if (std::holds_alternative<Missing>(cell))
                fields.emplace_back(missing_marker);
            else if (const auto* v = std::get_if<double>(&cell))
                fields.push_back(csv::format_double(*v));
            else
                fields.push_back(std::get<std::string>(cell));
        }
        csv::write_row(out, fields);
    }
}

void write_schema(std::ostream& out, const Schema& schema) {
    json attrs = json::array();
    for (const auto& a : schema.attributes) {
        json j;
        j["name"] = a.name;
        j["kind"] = a.is_numeric() ? "numeric" : "categorical";
        if (a.is_numeric()) {
            if (a.range) {
                j["min"] = a.range->min;
                j["max"] = a.range->max;
            }
        } else {
            j["categories"] = a.categories;
        }
        attrs.push_back(std::move(j));
    }
    json doc;
    doc["format"] = kSchemaFormatTag;
    doc["class_index"] = schema.class_index;
    doc["attributes"] = std::move(attrs);
    out << doc.dump(2) << '\n';
}

Schema read_schema(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("schema: ") + e.what(), line_of_offset(text, e.byte));
    }
    try {
        const auto tag = doc.at("format").get<std::string>();
        if (tag != kSchemaFormatTag) throw Error("schema: unsupported format '" + tag + "'");
        Schema schema;
        schema.class_index = doc.at("class_index").get<std::size_t>();
        for (const auto& j : doc.at("attributes")) {
            AttributeSpec a;
            a.name = j.at("name").get<std::string>();
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "numeric") {
                a.kind = AttributeKind::numeric;
                if (j.contains("min") || j.contains("max"))
                    a.range = NumericRange{j.at("min").get<double>(), j.at("max").get<double>()};
            } else if (kind == "categorical") {
                a.kind = AttributeKind::categorical;
                a.categories = j.at("categories").get<std::vector<std::string>>();
            } else {
                throw Error("schema: unknown attribute kind '" + kind + "'");
            }
            schema.attributes.push_back(std::move(a));
        }
        schema.validate();
        return schema;
    } catch (const json::exception& e) {
        throw Error(std::string("schema: ") + e.what());
    }
}

void write_encoded(std::ostream& out, const EncodedDataset& d) {
    const auto names = encoded_column_names(d.schema);
    if (names.size() != d.width()) throw DimensionError("dataset width does not match its schema");
    csv::write_row(out, names);
    std::vector<std::string> fields(d.width());
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.width(); ++c) fields[c] = csv::format_double(d.matrix(r, c));
        csv::write_row(out, fields);
    }
}

EncodedDataset read_encoded(std::istream& in, const Schema& schema) {
    schema.validate();
    const auto doc = csv::read(in);
    if (doc.records.empty()) throw ParseError("encoded file is empty", 1);
    if (!doc.ends_with_newline) throw ParseError("truncated file: last record is unterminated", doc.records.back().line);
    const auto names = encoded_column_names(schema);
    const auto& header = doc.records.front();
    if (header.fields != names) {
        if (header.fields.size() != names.size())
            throw ParseError("header has " + std::to_string(header.fields.size()) + " columns, schema needs " +
                                 std::to_string(names.size()),
                             header.line);
        for (std::size_t c = 0; c < names.size(); ++c)
            if (header.fields[c] != names[c])
                throw ParseError("header column '" + header.fields[c] + "' should be '" + names[c] + "'", header.line,
                                 c + 1);
    }
    EncodedDataset out;
    out.schema = schema;
    out.column_map = make_column_map(schema);
    out.matrix = Matrix(doc.records.size() - 1, names.size());
    for (std::size_t r = 1; r < doc.records.size(); ++r) {
        const auto& rec = doc.records[r];
        if (rec.fields.size() != names.size())
            throw ParseError("expected " + std::to_string(names.size()) + " fields, found " +
                                 std::to_string(rec.fields.size()),
                             rec.line);
        for (std::size_t c = 0; c < names.size(); ++c) {
            const auto v = csv::parse_double(rec.fields[c]);
            if (!v) throw ParseError("'" + rec.fields[c] + "' is not a number", rec.line, c + 1);
            if (*v < 0.0 || *v > 1.0) throw ParseError("encoded value outside [0,1]", rec.line, c + 1);
            out.matrix(r - 1, c) = *v;
        }
    }
    return out;
}

namespace {
std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot open '" + p.string() + "' for writing");
    return f;
}
std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error("cannot open '" + p.string() + "'");
    return f;
}
} // namespace

void save_schema(const std::filesystem::path& path, const Schema& schema) {
    auto f = open_out(path);
    write_schema(f, schema);
}

Schema load_schema(const std::filesystem::path& path) {
    auto f = open_in(path);
    return read_schema(f);
}

void save_encoded(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path,
                  const EncodedDataset& d) {
    save_schema(schema_path, d.schema);
    auto f = open_out(csv_path);
    write_encoded(f, d);
}

EncodedDataset load_encoded(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path) {
    const auto schema = load_schema(schema_path);
    auto f = open_in(csv_path);
    return read_encoded(f, schema);
}

} // namespace synthgen
