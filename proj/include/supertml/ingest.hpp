#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace supertml {

enum class ColumnKind { Integer, Real, Categorical };

std::string_view to_string(ColumnKind kind) noexcept;
ColumnKind parse_column_kind(std::string_view s);

inline bool is_numeric(ColumnKind kind) noexcept { return kind != ColumnKind::Categorical; }

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;

    bool operator==(const Column&) const = default;
};

/// Column layout of a dataset. `columns` includes the label column; the
/// features are every other column, in file order.
struct TabularSchema {
    std::vector<Column> columns;
    std::size_t label_column = 0;
    std::set<std::string> missing_tokens;

    std::size_t feature_count() const noexcept { return columns.empty() ? 0 : columns.size() - 1; }
    /// Column index of feature `f`.
    std::size_t feature_column(std::size_t f) const noexcept { return f < label_column ? f : f + 1; }
    const Column& feature(std::size_t f) const { return columns.at(feature_column(f)); }
    std::vector<std::string> feature_names() const;
    bool is_missing_token(std::string_view trimmed) const;

    /// Throws DataError when the label index or the column names are invalid.
    void validate() const;

    bool operator==(const TabularSchema&) const = default;
};

/// {"", "?", "NA", "na", "N/A"}
std::set<std::string> default_missing_tokens();

/// One table cell. A missing cell remembers the token it was read from so a
/// renderer may choose to show the source token instead of a placeholder.
class CellValue {
public:
    static CellValue present(std::string lexical) { return CellValue(std::move(lexical), false); }
    static CellValue missing(std::string source_token = {}) { return CellValue(std::move(source_token), true); }

    bool is_missing() const noexcept { return missing_; }
    /// Lexical text for present cells, the source token for missing ones.
    const std::string& text() const noexcept { return text_; }

    bool operator==(const CellValue&) const = default;

private:
    CellValue(std::string text, bool missing) : text_(std::move(text)), missing_(missing) {}

    std::string text_;
    bool missing_;
};

struct Sample {
    std::vector<CellValue> values;
    std::string label;

    bool operator==(const Sample&) const = default;
};

struct CsvOptions {
    char delimiter = ',';
    bool has_header = true;
};

/// Records as read from disk: cells trimmed, quotes removed, nothing typed yet.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

RawTable read_table(std::istream& in, const CsvOptions& options);
RawTable read_table(const std::filesystem::path& path, const CsvOptions& options);

bool is_integer_literal(std::string_view s) noexcept;
bool is_decimal_literal(std::string_view s) noexcept;

/// Infers one ColumnKind per column. Cells equal to a missing token do not
/// take part in inference. `names` may be empty, in which case columns are
/// called F1..Fn.
TabularSchema infer_schema(const std::vector<std::vector<std::string>>& rows, std::size_t label_column,
                           std::set<std::string> missing_tokens, std::vector<std::string> names = {});

std::vector<Sample> parse_records(const RawTable& table, const TabularSchema& schema);
std::vector<Sample> parse_dataset(const std::filesystem::path& path, const TabularSchema& schema,
                                  const CsvOptions& options = {});

/// Resolves "--label" style selectors: a column name, or a 0-based index.
std::size_t resolve_column(const std::vector<std::string>& names, std::string_view selector);

nlohmann::json schema_to_json(const TabularSchema& schema);
TabularSchema schema_from_json(const nlohmann::json& j);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded shuffle split of [0, n). Both halves are returned in ascending
/// order; the permutation depends only on (n, seed).
SplitIndices split_indices(std::size_t n, unsigned train_parts, unsigned test_parts, std::uint64_t seed);

}  // namespace supertml
