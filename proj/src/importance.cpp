#include "supertml/importance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "supertml/error.hpp"
#include "supertml/text.hpp"

namespace supertml {

namespace {

constexpr std::size_t kBins = 10;

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

ImportanceVector reorder(const std::map<std::string, double>& by_name, const TabularSchema& schema,
                         std::string origin) {
    ImportanceVector v;
    v.source = ImportanceVector::Source::External;
    v.origin = std::move(origin);
    const auto names = schema.feature_names();
    for (const auto& [name, score] : by_name) {
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw DataError(fmt::format("importance given for unknown feature '{}'", name));
    }
    for (const auto& name : names) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) throw DataError(fmt::format("no importance given for feature '{}'", name));
        v.scores.push_back(it->second);
    }
    v.validate(names.size());
    return v;
}

// Category keys for one feature; equal-frequency bins for numeric columns.
std::vector<std::string> discretize(const std::vector<Sample>& samples, std::size_t f, ColumnKind kind) {
    std::vector<std::string> keys(samples.size());
    std::vector<double> numbers;
    std::vector<double> parsed(samples.size());
    std::vector<bool> is_number(samples.size(), false);
    for (std::size_t r = 0; r < samples.size(); ++r) {
        const CellValue& v = samples[r].values[f];
        if (v.is_missing()) {
            keys[r] = "missing";
        } else if (is_numeric(kind) && parse_double(v.text(), parsed[r])) {
            is_number[r] = true;
            numbers.push_back(parsed[r]);
        } else {
            keys[r] = "value:" + v.text();
        }
    }
    std::sort(numbers.begin(), numbers.end());
    for (std::size_t r = 0; r < samples.size(); ++r) {
        if (!is_number[r]) continue;
        const auto below = static_cast<std::size_t>(
            std::lower_bound(numbers.begin(), numbers.end(), parsed[r]) - numbers.begin());
        keys[r] = fmt::format("bin:{}", std::min(kBins - 1, below * kBins / numbers.size()));
    }
    return keys;
}

}  // namespace

void ImportanceVector::validate(std::size_t n_features) const {
    if (scores.size() != n_features)
        throw DataError(fmt::format("{} importance scores for {} features", scores.size(), n_features));
    bool any_positive = false;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw DataError(fmt::format("importance {} is not finite", i));
        if (scores[i] < 0) throw DataError(fmt::format("importance {} is negative", i));
        any_positive = any_positive || scores[i] > 0;
    }
    if (!any_positive) throw DataError("at least one importance score must be positive");
}

ImportanceVector parse_importance(std::string_view text, const TabularSchema& schema, ImportanceFormat format,
                                  std::string origin) {
    if (format == ImportanceFormat::Auto) {
        const auto t = trim(text);
        format = !t.empty() && t.front() == '{' ? ImportanceFormat::Json : ImportanceFormat::Csv;
    }
    std::map<std::string, double> by_name;
    if (format == ImportanceFormat::Json) {
        try {
            const auto j = nlohmann::json::parse(text);
            if (!j.is_object()) throw DataError("importance JSON must be an object");
            for (const auto& [name, score] : j.items()) {
                if (!score.is_number()) throw DataError(fmt::format("importance of '{}' is not a number", name));
                by_name[name] = score.get<double>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("malformed importance JSON: {}", e.what()));
        }
    } else {
        std::istringstream in{std::string(text)};
        const RawTable table = read_table(in, CsvOptions{',', false});
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            if (row.size() != 2)
                throw DataError(fmt::format("line {}: expected name,score", table.line_numbers[r]));
            double score;
            if (!parse_double(row[1], score)) {
                if (r == 0) continue;  // header
                throw DataError(fmt::format("line {}: '{}' is not a number", table.line_numbers[r], row[1]));
            }
            if (!by_name.emplace(row[0], score).second)
                throw DataError(fmt::format("feature '{}' listed twice", row[0]));
        }
    }
    return reorder(by_name, schema, std::move(origin));
}

ImportanceVector load_importance(const std::filesystem::path& path, const TabularSchema& schema,
                                 ImportanceFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    if (format == ImportanceFormat::Auto) {
        const auto ext = path.extension().string();
        if (ext == ".json") format = ImportanceFormat::Json;
        if (ext == ".csv") format = ImportanceFormat::Csv;
    }
    return parse_importance(buf.str(), schema, format, path.string());
}

ImportanceVector estimate_importance(const std::vector<Sample>& samples, const TabularSchema& schema) {
    const std::size_t n = schema.feature_count();
    std::map<std::string, std::size_t> label_counts;
    for (const auto& s : samples) {
        if (s.values.size() != n)
            throw DataError(fmt::format("sample has {} values, schema has {} features", s.values.size(), n));
        ++label_counts[s.label];
    }
    if (label_counts.size() < 2) throw DataError("importance estimation needs at least two distinct labels");

    const double total = static_cast<double>(samples.size());
    ImportanceVector out;
    out.source = ImportanceVector::Source::Builtin;
    out.origin = "mutual_information";
    out.scores.assign(n, 0.0);
    for (std::size_t f = 0; f < n; ++f) {
        const auto keys = discretize(samples, f, schema.feature(f).kind);
        std::map<std::string, std::size_t> x_counts;
        std::map<std::pair<std::string, std::string>, std::size_t> joint;
        for (std::size_t r = 0; r < samples.size(); ++r) {
            ++x_counts[keys[r]];
            ++joint[{keys[r], samples[r].label}];
        }
        double mi = 0;
        for (const auto& [xy, count] : joint) {
            const double nxy = static_cast<double>(count);
            const double nx = static_cast<double>(x_counts[xy.first]);
            const double ny = static_cast<double>(label_counts[xy.second]);
            mi += nxy / total * std::log(nxy * total / (nx * ny));
        }
        out.scores[f] = std::max(0.0, mi);
    }
    // A dataset carrying no information at all ranks every feature equally.
    if (std::all_of(out.scores.begin(), out.scores.end(), [](double s) { return s == 0.0; }))
        std::fill(out.scores.begin(), out.scores.end(), 1.0);
    return out;
}

nlohmann::json importance_to_json(const ImportanceVector& importance, const TabularSchema& schema) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t f = 0; f < importance.scores.size(); ++f) j[schema.feature(f).name] = importance.scores[f];
    return j;
}

}  // namespace supertml
