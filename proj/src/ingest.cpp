#include "supertml/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "supertml/error.hpp"
#include "supertml/text.hpp"

namespace supertml {

std::string_view to_string(ColumnKind kind) noexcept {
    switch (kind) {
        case ColumnKind::Integer: return "integer";
        case ColumnKind::Real: return "real";
        case ColumnKind::Categorical: return "categorical";
    }
    return "categorical";
}

ColumnKind parse_column_kind(std::string_view s) {
    if (s == "integer") return ColumnKind::Integer;
    if (s == "real") return ColumnKind::Real;
    if (s == "categorical") return ColumnKind::Categorical;
    throw DataError(fmt::format("unknown column kind '{}'", s));
}

std::vector<std::string> TabularSchema::feature_names() const {
    std::vector<std::string> names;
    for (std::size_t f = 0; f < feature_count(); ++f) names.push_back(feature(f).name);
    return names;
}

bool TabularSchema::is_missing_token(std::string_view trimmed) const {
    return missing_tokens.find(std::string(trimmed)) != missing_tokens.end();
}

void TabularSchema::validate() const {
    if (columns.empty()) throw DataError("schema has no columns");
    if (label_column >= columns.size())
        throw DataError(fmt::format("label column {} out of range for {} columns", label_column, columns.size()));
    std::set<std::string> seen;
    for (const auto& c : columns) {
        if (!seen.insert(c.name).second) throw DataError(fmt::format("duplicate column name '{}'", c.name));
    }
}

std::set<std::string> default_missing_tokens() { return {"", "?", "NA", "na", "N/A"}; }

// ---------------------------------------------------------------------------
// Delimited text reader (RFC 4180 quoting; unquoted cells are trimmed).

namespace {

class RecordReader {
public:
    RecordReader(std::string_view text, char delimiter) : text_(text), delim_(delimiter) {}

    /// Reads the next non-blank record; false at end of input.
    bool next(std::vector<std::string>& cells, std::size_t& line) {
        while (pos_ < text_.size()) {
            line = line_;
            std::size_t p = pos_;
            while (p < text_.size() && (text_[p] == ' ' || (text_[p] == '\t' && delim_ != '\t'))) ++p;
            if (p == text_.size()) return false;
            if (text_[p] == '\n' || text_[p] == '\r') {
                pos_ = p;
                consume_line_end();
                continue;
            }
            cells.clear();
            read_record(cells);
            return true;
        }
        return false;
    }

private:
    bool at_line_end() const { return text_[pos_] == '\n' || text_[pos_] == '\r'; }

    void consume_line_end() {
        if (text_[pos_] == '\r') ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        ++line_;
    }

    void read_record(std::vector<std::string>& cells) {
        for (;;) {
            cells.push_back(read_cell());
            if (pos_ >= text_.size()) return;
            if (text_[pos_] == delim_) {
                ++pos_;
                if (pos_ >= text_.size() || at_line_end()) {
                    cells.emplace_back();
                    if (pos_ < text_.size()) consume_line_end();
                    return;
                }
                continue;
            }
            consume_line_end();
            return;
        }
    }

    std::string read_cell() {
        std::size_t p = pos_;
        while (p < text_.size() && (text_[p] == ' ' || text_[p] == '\t') && text_[p] != delim_) ++p;
        if (p < text_.size() && text_[p] == '"') {
            pos_ = p + 1;
            std::string out;
            for (;;) {
                if (pos_ >= text_.size()) throw DataError(fmt::format("line {}: unterminated quoted field", line_));
                const char c = text_[pos_++];
                if (c == '"') {
                    if (pos_ < text_.size() && text_[pos_] == '"') {
                        out.push_back('"');
                        ++pos_;
                        continue;
                    }
                    break;
                }
                if (c == '\n') ++line_;
                out.push_back(c);
            }
            // Anything between the closing quote and the delimiter must be blank.
            while (pos_ < text_.size() && text_[pos_] != delim_ && !at_line_end()) {
                if (text_[pos_] != ' ' && text_[pos_] != '\t')
                    throw DataError(fmt::format("line {}: unexpected text after quoted field", line_));
                ++pos_;
            }
            return out;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != delim_ && !at_line_end()) ++pos_;
        return std::string(trim(text_.substr(start, pos_ - start)));
    }

    std::string_view text_;
    char delim_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

RawTable read_table(std::istream& in, const CsvOptions& options) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("read failure");
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
    if (!is_valid_utf8(text)) throw DataError("input is not valid UTF-8");

    RawTable table;
    RecordReader reader(text, options.delimiter);
    std::vector<std::string> cells;
    std::size_t line = 0;
    bool first = true;
    std::size_t arity = 0;
    while (reader.next(cells, line)) {
        if (first) {
            arity = cells.size();
            first = false;
            if (options.has_header) {
                table.header = cells;
                continue;
            }
        }
        if (cells.size() != arity)
            throw DataError(fmt::format("line {}: expected {} fields, found {}", line, arity, cells.size()));
        table.rows.push_back(cells);
        table.line_numbers.push_back(line);
    }
    if (!options.has_header && arity > 0) {
        for (std::size_t i = 0; i < arity; ++i) table.header.push_back(fmt::format("F{}", i + 1));
    }
    return table;
}

RawTable read_table(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return read_table(in, options);
}

// ---------------------------------------------------------------------------
// Kind inference.

bool is_integer_literal(std::string_view s) noexcept {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

bool is_decimal_literal(std::string_view s) noexcept {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    }
    if (digits == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++exp_digits;
        if (exp_digits == 0) return false;
    }
    return i == s.size();
}

TabularSchema infer_schema(const std::vector<std::vector<std::string>>& rows, std::size_t label_column,
                           std::set<std::string> missing_tokens, std::vector<std::string> names) {
    if (rows.empty()) throw DataError("cannot infer a schema from an empty table");
    const std::size_t arity = rows.front().size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != arity)
            throw DataError(fmt::format("row {}: expected {} fields, found {}", r, arity, rows[r].size()));
    }
    if (arity == 0) throw DataError("table has no columns");
    if (label_column >= arity)
        throw DataError(fmt::format("label column {} out of range for {} columns", label_column, arity));
    if (names.empty()) {
        for (std::size_t i = 0; i < arity; ++i) names.push_back(fmt::format("F{}", i + 1));
    } else if (names.size() != arity) {
        throw DataError(fmt::format("{} column names given for {} columns", names.size(), arity));
    }

    TabularSchema schema;
    schema.label_column = label_column;
    schema.missing_tokens = std::move(missing_tokens);
    for (std::size_t c = 0; c < arity; ++c) {
        bool all_integer = true;
        bool all_decimal = true;
        for (const auto& row : rows) {
            const std::string_view cell = trim(row[c]);
            if (schema.is_missing_token(cell)) continue;
            all_integer = all_integer && is_integer_literal(cell);
            all_decimal = all_decimal && is_decimal_literal(cell);
            if (!all_decimal) break;
        }
        ColumnKind kind = ColumnKind::Categorical;
        if (all_integer)
            kind = ColumnKind::Integer;
        else if (all_decimal)
            kind = ColumnKind::Real;
        schema.columns.push_back({names[c], kind});
    }
    schema.validate();
    return schema;
}

std::vector<Sample> parse_records(const RawTable& table, const TabularSchema& schema) {
    schema.validate();
    std::vector<Sample> samples;
    samples.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != schema.columns.size()) {
            const std::size_t line = r < table.line_numbers.size() ? table.line_numbers[r] : r;
            throw DataError(
                fmt::format("line {}: expected {} fields, found {}", line, schema.columns.size(), row.size()));
        }
        Sample s;
        s.values.reserve(schema.feature_count());
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string_view cell = trim(row[c]);
            if (c == schema.label_column) {
                s.label = std::string(cell);
            } else if (schema.is_missing_token(cell)) {
                s.values.push_back(CellValue::missing(std::string(cell)));
            } else {
                s.values.push_back(CellValue::present(std::string(cell)));
            }
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<Sample> parse_dataset(const std::filesystem::path& path, const TabularSchema& schema,
                                  const CsvOptions& options) {
    return parse_records(read_table(path, options), schema);
}

std::size_t resolve_column(const std::vector<std::string>& names, std::string_view selector) {
    const auto it = std::find(names.begin(), names.end(), selector);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
    if (is_integer_literal(selector) && selector.front() != '-' && selector.front() != '+') {
        const std::size_t idx = std::stoul(std::string(selector));
        if (idx < names.size()) return idx;
    }
    throw UsageError(fmt::format("no column matches '{}'", selector));
}

nlohmann::json schema_to_json(const TabularSchema& schema) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : schema.columns) cols.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
    return {{"columns", cols},
            {"label_column", schema.label_column},
            {"missing_tokens", std::vector<std::string>(schema.missing_tokens.begin(), schema.missing_tokens.end())}};
}

TabularSchema schema_from_json(const nlohmann::json& j) {
    TabularSchema schema;
    try {
        for (const auto& c : j.at("columns"))
            schema.columns.push_back({c.at("name").get<std::string>(), parse_column_kind(c.at("kind").get<std::string>())});
        schema.label_column = j.at("label_column").get<std::size_t>();
        if (j.contains("missing_tokens")) {
            for (const auto& t : j.at("missing_tokens")) schema.missing_tokens.insert(t.get<std::string>());
        } else {
            schema.missing_tokens = default_missing_tokens();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("malformed schema document: {}", e.what()));
    }
    schema.validate();
    return schema;
}

SplitIndices split_indices(std::size_t n, unsigned train_parts, unsigned test_parts, std::uint64_t seed) {
    if (train_parts + test_parts == 0) throw UsageError("split ratio must have a nonzero part");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    // Fisher-Yates with explicit rejection sampling: std::shuffle and the
    // standard distributions are not specified bit-for-bit across libraries.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do x = rng();
        while (x >= limit);
        std::swap(perm[i - 1], perm[x % bound]);
    }
    const std::size_t n_train = (n * train_parts + (train_parts + test_parts) / 2) / (train_parts + test_parts);
    SplitIndices out;
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

}  // namespace supertml
