#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "supertml/ingest.hpp"

namespace supertml {

/// Per-feature importance, in schema feature order. Only the ranking is
/// consumed by the variant-font planner.
struct ImportanceVector {
    enum class Source { External, Builtin };

    std::vector<double> scores;
    Source source = Source::Builtin;
    std::string origin;  // file path or estimator name

    /// Throws DataError unless there is one finite, nonnegative score per
    /// feature and at least one is positive.
    void validate(std::size_t n_features) const;
};

enum class ImportanceFormat { Auto, Json, Csv };

/// Reads a {feature_name: score} JSON object or a two-column name,score CSV
/// (header optional) and reorders it to schema order.
ImportanceVector load_importance(const std::filesystem::path& path, const TabularSchema& schema,
                                 ImportanceFormat format = ImportanceFormat::Auto);
ImportanceVector parse_importance(std::string_view text, const TabularSchema& schema, ImportanceFormat format,
                                  std::string origin = {});

/// Mutual information (nats) between each feature and the label. Numeric
/// features are cut into 10 equal-frequency bins, categorical ones keep their
/// values, and missing cells form a category of their own.
ImportanceVector estimate_importance(const std::vector<Sample>& samples, const TabularSchema& schema);

nlohmann::json importance_to_json(const ImportanceVector& importance, const TabularSchema& schema);

}  // namespace supertml
