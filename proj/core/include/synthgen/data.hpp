#pragma once

// Tabular ingestion: schema inference, imputation, [0,1] encoding with one-hot
// groups, the 25/25/50 split, and file persistence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synthgen/matrix.hpp"

namespace synthgen {

enum class AttributeKind { numeric, categorical };

struct NumericRange {
    double min = 0.0;
    double max = 0.0;
    friend bool operator==(const NumericRange&, const NumericRange&) = default;
};

struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::numeric;
    std::vector<std::string> categories;  ///< categorical only; order fixes one-hot column order
    std::optional<NumericRange> range;    ///< numeric only; set by fitting

    bool is_numeric() const noexcept { return kind == AttributeKind::numeric; }
    /// Index of `label` in `categories`; throws Error when unknown.
    std::size_t category_index(std::string_view label) const;

    friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

struct Schema {
    std::vector<AttributeSpec> attributes;
    std::size_t class_index = 0;

    /// Throws Error when an invariant is broken (unique names, categorical class, >= 2 categories).
    void validate() const;
    /// Numeric attributes count 1 column, categorical ones one per category.
    std::size_t encoded_width() const;
    /// Attribute count excluding the class.
    std::size_t feature_count() const noexcept { return attributes.size() - 1; }
    bool fitted() const;
    const AttributeSpec& class_attribute() const { return attributes.at(class_index); }
    /// Stable 64-bit hash of names, kinds, categories and ranges.
    std::uint64_t fingerprint() const;

    friend bool operator==(const Schema&, const Schema&) = default;
};

struct Missing {
    friend bool operator==(Missing, Missing) = default;
};

using Cell = std::variant<Missing, double, std::string>;

struct RawTable {
    Schema schema;
    std::vector<std::vector<Cell>> rows;

    /// Row width, cell kinds and category membership against the schema.
    void validate() const;
    std::size_t missing_count() const;
};

/// Where an encoded column comes from.
struct ColumnRef {
    std::size_t attribute = 0;
    std::optional<std::size_t> category;
    friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct EncodedDataset {
    Schema schema;
    Matrix matrix;
    std::vector<ColumnRef> column_map;

    std::size_t size() const noexcept { return matrix.rows(); }
    std::size_t width() const noexcept { return matrix.cols(); }
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> seed;
    std::vector<std::size_t> eval;
    std::uint64_t rng_seed = 0;
};

/// Names a column either by header text or by 0-based position.
using ColumnSelector = std::variant<std::string, std::size_t>;

struct SchemaOptions {
    std::string missing_marker = "?";
    std::vector<std::string> force_categorical;
};

// -- schema and table ingestion ------------------------------------------------

Schema infer_schema(std::istream& csv, const ColumnSelector& class_column, const SchemaOptions& options = {});

/// Parses a CSV with header against an existing schema (header names must match).
RawTable read_table(std::istream& csv, const Schema& schema, std::string_view missing_marker = "?");

/// infer_schema + read_table over a single pass of the stream.
RawTable ingest_csv(std::istream& csv, const ColumnSelector& class_column, const SchemaOptions& options = {});

/// Mean for numeric attributes, mode (lowest category index on ties) for categorical ones.
RawTable impute_missing(RawTable table);

// -- encoding -------------------------------------------------------------------

std::vector<ColumnRef> make_column_map(const Schema& schema);
std::vector<std::string> encoded_column_names(const Schema& schema);

/// Learns numeric min/max. With `fit_rows` empty the whole table is used.
Schema fit_schema(const RawTable& table, std::span<const std::size_t> fit_rows = {});

/// Encodes with an already fitted schema; numeric values outside the fitted range are clipped.
EncodedDataset encode(const RawTable& table, const Schema& fitted);

/// fit_schema over the whole table followed by encode.
EncodedDataset fit_encode(const RawTable& table);

/// Inverse of encode: numeric columns clipped to [0,1] and rescaled, one-hot groups by argmax.
RawTable decode(const Matrix& rows, const Schema& fitted);

// -- splitting ------------------------------------------------------------------

/// Seeded permutation partitioned into training (n/4), seeding (n/4) and evaluation (rest).
SplitIndices split_25_25_50(std::size_t n, std::uint64_t rng_seed);

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);
EncodedDataset select_rows(const EncodedDataset& d, std::span<const std::size_t> rows);

/// Class-category index per row, read from the class one-hot group (argmax).
std::vector<std::size_t> class_labels(const EncodedDataset& d);

// -- persistence ------------------------------------------------------------------

void write_table(std::ostream& out, const RawTable& table, std::string_view missing_marker = "?");

void write_schema(std::ostream& out, const Schema& schema);
Schema read_schema(std::istream& in);

void write_encoded(std::ostream& csv, const EncodedDataset& d);
EncodedDataset read_encoded(std::istream& csv, const Schema& schema);

void save_schema(const std::filesystem::path& path, const Schema& schema);
Schema load_schema(const std::filesystem::path& path);
void save_encoded(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path,
                  const EncodedDataset& d);
EncodedDataset load_encoded(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path);

inline constexpr std::string_view kSchemaFormatTag = "synthgen-schema v1";

} // namespace synthgen
