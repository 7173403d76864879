#pragma once

// Golden-image fixtures shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "supertml/error.hpp"
#include "supertml/format.hpp"
#include "supertml/ingest.hpp"
#include "supertml/layout.hpp"
#include "supertml/png.hpp"
#include "supertml/render.hpp"

namespace fixtures {

inline const std::string kData = SUPERTML_TEST_DATA_DIR;
inline const std::string kGolden = SUPERTML_GOLDEN_DIR;

struct GoldenCase {
    std::string name;
    supertml::RasterImage image;
};

struct Prepared {
    supertml::TabularSchema schema;
    std::vector<supertml::Sample> samples;
    supertml::LayoutPlan plan;
};

/// Equal-font plan at 224 px with default formatting.
inline Prepared prepare(const std::string& file, const std::string& label) {
    using namespace supertml;
    const RawTable t = read_table(kData + "/" + file, {});
    Prepared p;
    p.schema = infer_schema(t.rows, resolve_column(t.header, label), default_missing_tokens(), t.header);
    p.samples = parse_records(t, p.schema);
    const auto budgets = compute_char_budgets(p.samples, p.schema, FormatOptions{});
    p.plan = plan_equal_font(p.schema.feature_count(), budgets.budgets, CanvasSpec{});
    p.plan.feature_names = p.schema.feature_names();
    return p;
}

/// The weather sample ("blue", 55, missing, 17 -> Sunny) and the Iris sample
/// (6.0, 2.2, 5.0, 1.5 -> Iris-virginica).
inline std::vector<GoldenCase> golden_cases() {
    using namespace supertml;
    std::vector<GoldenCase> out;
    const Prepared weather = prepare("weather.csv", "label");
    out.push_back({"weather_sunny", render_sample(weather.samples.at(0), weather.plan, weather.schema, FormatOptions{})});

    const Prepared iris = prepare("iris.csv", "species");
    const Sample want{{CellValue::present("6.0"), CellValue::present("2.2"), CellValue::present("5.0"),
                       CellValue::present("1.5")},
                      "Iris-virginica"};
    const auto it = std::find(iris.samples.begin(), iris.samples.end(), want);
    if (it == iris.samples.end()) throw DataError("iris fixture row not found");
    out.push_back({"iris_virginica", render_sample(*it, iris.plan, iris.schema, FormatOptions{})});
    return out;
}

inline std::filesystem::path golden_path(const std::string& name) { return kGolden + "/" + name + ".png"; }

inline supertml::RasterImage read_golden(const std::string& name) {
    std::ifstream in(golden_path(name), std::ios::binary);
    if (!in) throw supertml::IoError("cannot open golden image " + golden_path(name).string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), {}};
    return supertml::decode_png(bytes);
}

/// Set SUPERTML_UPDATE_GOLDEN=1 to rewrite the committed images.
inline bool update_requested() {
    const char* v = std::getenv("SUPERTML_UPDATE_GOLDEN");
    return v != nullptr && std::string(v) == "1";
}

inline void write_golden(const GoldenCase& c) {
    const auto bytes = supertml::encode_png(c.image);
    std::ofstream out(golden_path(c.name), std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace fixtures
