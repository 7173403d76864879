#include "supertml/format.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "supertml/error.hpp"
#include "supertml/text.hpp"

namespace supertml {

void FormatOptions::validate() const {
    if (missing_text.empty()) throw DataError("missing text must be non-empty");
    if (max_chars_numeric == 0 || max_chars_categorical == 0) throw DataError("character caps must be positive");
    for (const auto& [column, map] : abbreviations) {
        std::map<std::string, std::string> seen;
        for (const auto& [value, shortened] : map) {
            if (shortened.empty())
                throw DataError(fmt::format("column '{}': empty abbreviation for '{}'", column, value));
            auto [it, inserted] = seen.emplace(shortened, value);
            if (!inserted)
                throw DataError(fmt::format("column '{}': '{}' and '{}' both abbreviate to '{}'", column, it->second,
                                            value, shortened));
        }
    }
}

ColumnFormat FormatOptions::for_feature(const TabularSchema& schema, std::size_t feature) const {
    const Column& column = schema.feature(feature);
    ColumnFormat out;
    out.missing_text = missing_text;
    out.keep_missing_token = keep_missing_token;
    out.max_chars = is_numeric(column.kind) ? max_chars_numeric : max_chars_categorical;
    if (auto it = abbreviations.find(column.name); it != abbreviations.end()) out.abbreviations = it->second;
    return out;
}

Formatted format_value(const CellValue& value, const ColumnFormat& format) {
    std::string text;
    if (value.is_missing()) {
        text = format.keep_missing_token && !value.text().empty() ? value.text() : format.missing_text;
    } else if (auto it = format.abbreviations.find(value.text()); it != format.abbreviations.end()) {
        text = it->second;
    } else {
        text = value.text();
    }
    if (char_count(text) <= format.max_chars) return {std::move(text), false};
    return {truncate_chars(text, format.max_chars), true};
}

std::size_t CharBudgets::truncated_total() const {
    std::size_t total = 0;
    for (auto t : truncated_per_feature) total += t;
    return total;
}

CharBudgets compute_char_budgets(const std::vector<Sample>& samples, const TabularSchema& schema,
                                 const FormatOptions& options) {
    const std::size_t n = schema.feature_count();
    CharBudgets out;
    out.budgets.assign(n, 1);
    out.truncated_per_feature.assign(n, 0);
    std::vector<ColumnFormat> formats;
    for (std::size_t f = 0; f < n; ++f) formats.push_back(options.for_feature(schema, f));
    for (const auto& s : samples) {
        if (s.values.size() != n)
            throw DataError(fmt::format("sample has {} values, schema has {} features", s.values.size(), n));
        for (std::size_t f = 0; f < n; ++f) {
            const Formatted r = format_value(s.values[f], formats[f]);
            out.budgets[f] = std::max(out.budgets[f], char_count(r.text));
            if (r.truncated) ++out.truncated_per_feature[f];
        }
    }
    return out;
}

void check_distinct_formatting(const std::vector<Sample>& samples, const TabularSchema& schema,
                               const FormatOptions& options) {
    const std::size_t n = schema.feature_count();
    for (std::size_t f = 0; f < n; ++f) {
        const ColumnFormat format = options.for_feature(schema, f);
        if (format.abbreviations.empty()) continue;
        std::set<std::string> values;
        for (const auto& s : samples)
            if (!s.values.at(f).is_missing()) values.insert(s.values[f].text());
        std::map<std::string, std::string> rendered;
        for (const auto& v : values) {
            auto [it, inserted] = rendered.emplace(format_value(CellValue::present(v), format).text, v);
            if (!inserted)
                throw DataError(fmt::format("feature '{}': values '{}' and '{}' render identically as '{}'",
                                            schema.feature(f).name, it->second, v, it->first));
        }
    }
}

std::map<std::string, std::map<std::string, std::string>> load_abbreviations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::map<std::string, std::map<std::string, std::string>> out;
    try {
        const auto j = nlohmann::json::parse(in);
        if (!j.is_object()) throw DataError(fmt::format("{}: expected an object of columns", path.string()));
        for (const auto& [column, map] : j.items()) {
            if (!map.is_object())
                throw DataError(fmt::format("{}: column '{}' must map values to short forms", path.string(), column));
            for (const auto& [value, shortened] : map.items()) out[column][value] = shortened.get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("{}: malformed abbreviation file: {}", path.string(), e.what()));
    }
    return out;
}

nlohmann::json format_options_to_json(const FormatOptions& options) {
    return {{"missing_text", options.missing_text},
            {"keep_missing_token", options.keep_missing_token},
            {"max_chars_numeric", options.max_chars_numeric},
            {"max_chars_categorical", options.max_chars_categorical},
            {"abbreviations", options.abbreviations}};
}

}  // namespace supertml
