#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "supertml/ingest.hpp"

namespace supertml {

/// Formatting rules for a single feature column.
struct ColumnFormat {
    std::string missing_text = "missing";
    bool keep_missing_token = false;
    std::size_t max_chars = 16;
    std::map<std::string, std::string> abbreviations;
};

/// Dataset-wide formatting options; resolved per column with for_feature().
struct FormatOptions {
    std::string missing_text = "missing";
    // Draw the source token ("?") instead of missing_text.
    bool keep_missing_token = false;
    std::size_t max_chars_numeric = 16;
    std::size_t max_chars_categorical = 24;
    // column name -> (lexical value -> short form)
    std::map<std::string, std::map<std::string, std::string>> abbreviations;

    /// Throws DataError on an empty missing_text, a zero cap, or an
    /// abbreviation map that sends two values to the same short form.
    void validate() const;
    ColumnFormat for_feature(const TabularSchema& schema, std::size_t feature) const;
};

struct Formatted {
    std::string text;
    bool truncated = false;
};

Formatted format_value(const CellValue& value, const ColumnFormat& format);

/// Per-feature character budgets for a dataset: the longest formatted value
/// of each feature (at least 1), plus how many cells had to be truncated.
struct CharBudgets {
    std::vector<std::size_t> budgets;
    std::vector<std::size_t> truncated_per_feature;

    std::size_t truncated_total() const;
};

CharBudgets compute_char_budgets(const std::vector<Sample>& samples, const TabularSchema& schema,
                                 const FormatOptions& options);

/// Throws DataError when two distinct source values of one column format to
/// the same string under the column's abbreviation map.
void check_distinct_formatting(const std::vector<Sample>& samples, const TabularSchema& schema,
                               const FormatOptions& options);

/// Reads {"column": {"value": "short", ...}, ...}.
std::map<std::string, std::map<std::string, std::string>> load_abbreviations(const std::filesystem::path& path);

nlohmann::json format_options_to_json(const FormatOptions& options);

}  // namespace supertml
