#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "supertml/emit.hpp"
#include "supertml/error.hpp"
#include "supertml/format.hpp"
#include "supertml/ingest.hpp"
#include "supertml/layout.hpp"
#include "supertml/png.hpp"
#include "supertml/render.hpp"
#include "temp_dir.hpp"

using namespace supertml;
namespace fs = std::filesystem;

namespace {

const std::string kData = SUPERTML_TEST_DATA_DIR;

struct Dataset {
    TabularSchema schema;
    std::vector<Sample> samples;
    LayoutPlan plan;
};

Dataset load(const std::string& file, std::size_t label) {
    const RawTable t = read_table(kData + file, {});
    Dataset d;
    d.schema = infer_schema(t.rows, label, default_missing_tokens(), t.header);
    d.samples = parse_records(t, d.schema);
    const auto budgets = compute_char_budgets(d.samples, d.schema, FormatOptions{});
    d.plan = plan_equal_font(d.schema.feature_count(), budgets.budgets, CanvasSpec{});
    d.plan.feature_names = d.schema.feature_names();
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

TabularSchema weather_schema() {
    TabularSchema s;
    s.columns = {{"sky", ColumnKind::Categorical},
                 {"temperature", ColumnKind::Integer},
                 {"humidity", ColumnKind::Integer},
                 {"wind", ColumnKind::Integer},
                 {"label", ColumnKind::Categorical}};
    s.label_column = 4;
    s.missing_tokens = default_missing_tokens();
    return s;
}

}  // namespace

TEST_SUITE("emit") {

TEST_CASE("file names carry the label and a zero-based index") {
    CHECK(image_filename("Sunny", 0) == "Sunny_00000.png");
    CHECK(image_filename("x", 123456) == "x_123456.png");
    CHECK(sanitize_label("Iris-virginica") == "Iris-virginica");
    CHECK(sanitize_label(">50K") == "-50K");
    CHECK(sanitize_label("a b.c") == "a-b-c");
    CHECK(sanitize_label("caf\xC3\xA9") == "caf-");
    CHECK(label_from_filename("sub/Sunny_00000.png") == "Sunny");
    CHECK(label_from_filename("a_b_00001.png") == "a_b");
    CHECK_THROWS_AS(label_from_filename("nolabel.png"), DataError);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("the weather sample is written as Sunny_00000.png") {
    TempDir dir("weather");
    const TabularSchema s = weather_schema();
    const std::vector<Sample> samples{{{CellValue::present("blue"), CellValue::present("55"), CellValue::missing("?"),
                                        CellValue::present("17")},
                                       "Sunny"}};
    const auto budgets = compute_char_budgets(samples, s, FormatOptions{});
    const LayoutPlan plan = plan_equal_font(4, budgets.budgets, CanvasSpec{});
    const DatasetManifest m = emit_dataset(samples, plan, s, FormatOptions{}, dir / "out");
    REQUIRE(m.entries.size() == 1);
    CHECK(m.entries[0].image_path == "Sunny_00000.png");
    const std::string png = slurp(dir / "out/Sunny_00000.png");
    const RasterImage img = decode_png(std::vector<std::uint8_t>(png.begin(), png.end()));
    CHECK(img == render_sample(samples[0], plan, s, FormatOptions{}));
    CHECK(fs::exists(dir / "out/manifest.tsv"));
    CHECK(fs::exists(dir / "out/manifest.json"));
    CHECK(slurp(dir / "out/plan.json") == serialize_plan(plan));
}

TEST_CASE("no samples, no images") {
    TempDir dir("empty");
    const Dataset iris = load("/iris.csv", 4);
    const DatasetManifest m = emit_dataset({}, iris.plan, iris.schema, FormatOptions{}, dir / "out");
    CHECK(m.entries.empty());
    std::size_t pngs = 0;
    for (const auto& e : fs::directory_iterator(dir / "out")) pngs += e.path().extension() == ".png";
    CHECK(pngs == 0);
    CHECK(parse_manifest(dir / "out/manifest.tsv").manifest == m);
}

TEST_CASE("iris labels come back from the file names") {
    TempDir dir("iris");
    const Dataset iris = load("/iris.csv", 4);
    const DatasetManifest m = emit_dataset(iris.samples, iris.plan, iris.schema, FormatOptions{}, dir / "out");
    std::map<std::string, int> from_files, from_source;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "out"))
        if (e.path().extension() == ".png") {
            ++files;
            ++from_files[label_from_filename(e.path().filename().string())];
        }
    for (const auto& s : iris.samples) ++from_source[sanitize_label(s.label)];
    CHECK(files == 150);
    CHECK(from_files == from_source);
    CHECK(from_files == std::map<std::string, int>{{"Iris-setosa", 50}, {"Iris-versicolor", 50}, {"Iris-virginica", 50}});
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        CHECK(m.entries[i].label == iris.samples[i].label);
        CHECK(label_from_filename(m.entries[i].image_path) == sanitize_label(m.entries[i].label));
    }
}

TEST_CASE("parse(write(m)) == m") {
    TempDir dir("roundtrip");
    const Dataset adult = load("/adult_1000.csv", 14);
    std::vector<Sample> head(adult.samples.begin(), adult.samples.begin() + 40);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < head.size(); ++i) rows.push_back(1000 - i);
    EmitOptions opts;
    opts.by_class_dirs = true;
    const DatasetManifest m = emit_dataset(head, adult.plan, adult.schema, FormatOptions{}, dir / "out", opts, rows);
    const ManifestCheck check = parse_manifest(dir / "out/manifest.tsv");
    CHECK(check.warnings.empty());
    CHECK(check.manifest == m);
    CHECK(m.entries[3].source_row == 997);
    CHECK(m.entries[0].image_path.find('/') != std::string::npos);
}

TEST_CASE("labels with tabs and backslashes survive the manifest") {
    TempDir dir("escape");
    TabularSchema s = weather_schema();
    std::vector<Sample> samples{
        {{CellValue::present("a"), CellValue::present("1"), CellValue::present("2"), CellValue::present("3")}, "x\ty"},
        {{CellValue::present("b"), CellValue::present("1"), CellValue::present("2"), CellValue::present("3")}, "p\\q"},
    };
    const auto budgets = compute_char_budgets(samples, s, FormatOptions{});
    const DatasetManifest m =
        emit_dataset(samples, plan_equal_font(4, budgets.budgets, CanvasSpec{}), s, FormatOptions{}, dir / "out");
    CHECK(parse_manifest(dir / "out/manifest.tsv").manifest == m);
}

TEST_CASE("a missing image is reported as a warning") {
    TempDir dir("missing");
    const Dataset iris = load("/iris.csv", 4);
    std::vector<Sample> head(iris.samples.begin(), iris.samples.begin() + 5);
    emit_dataset(head, iris.plan, iris.schema, FormatOptions{}, dir / "out");
    fs::remove(dir / "out/Iris-setosa_00002.png");
    const ManifestCheck check = parse_manifest(dir / "out/manifest.tsv");
    REQUIRE(check.warnings.size() == 1);
    CHECK(check.warnings[0].find("Iris-setosa_00002.png") != std::string::npos);
}

TEST_CASE("an edited plan file fails the digest check") {
    TempDir dir("tamper");
    const Dataset iris = load("/iris.csv", 4);
    std::vector<Sample> head(iris.samples.begin(), iris.samples.begin() + 3);
    emit_dataset(head, iris.plan, iris.schema, FormatOptions{}, dir / "out");
    std::string plan = slurp(dir / "out/plan.json");
    const auto pos = plan.find("\"side\": 224");
    REQUIRE(pos != std::string::npos);
    plan[pos + 10] = '5';  // 224 -> 225
    std::ofstream(dir / "out/plan.json", std::ios::binary) << plan;
    CHECK_THROWS_AS(parse_manifest(dir / "out/manifest.tsv"), IntegrityError);
}

TEST_CASE("malformed manifests are data errors") {
    TempDir dir("malformed");
    const Dataset iris = load("/iris.csv", 4);
    std::vector<Sample> head(iris.samples.begin(), iris.samples.begin() + 3);
    emit_dataset(head, iris.plan, iris.schema, FormatOptions{}, dir / "out");
    const std::string good = slurp(dir / "out/manifest.tsv");
    auto rewrite = [&](const std::string& text) { std::ofstream(dir / "out/manifest.tsv", std::ios::binary) << text; };

    std::string gap = good;
    gap.replace(gap.find("\t1\t"), 3, "\t7\t");
    rewrite(gap);
    CHECK_THROWS_AS(parse_manifest(dir / "out/manifest.tsv"), DataError);
    rewrite("nonsense\n");
    CHECK_THROWS_AS(parse_manifest(dir / "out/manifest.tsv"), DataError);
    CHECK_THROWS_AS(parse_manifest(dir / "nowhere/manifest.tsv"), IoError);
}

TEST_CASE("repeated and parallel emission give identical bytes") {
    TempDir dir("parallel");
    const Dataset wine = load("/wine.csv", 0);
    emit_dataset(wine.samples, wine.plan, wine.schema, FormatOptions{}, dir / "a");
    emit_dataset(wine.samples, wine.plan, wine.schema, FormatOptions{}, dir / "b");
    EmitOptions par;
    par.workers = 8;
    emit_dataset(wine.samples, wine.plan, wine.schema, FormatOptions{}, dir / "c", par);
    const auto a = tree(dir / "a");
    CHECK(a.size() == 178 + 3);
    CHECK(a == tree(dir / "b"));
    CHECK(a == tree(dir / "c"));
}

TEST_CASE("colliding labels are refused before anything is written") {
    TempDir dir("collide");
    TabularSchema s = weather_schema();
    const std::vector<Sample> samples{
        {{CellValue::present("a"), CellValue::present("1"), CellValue::present("2"), CellValue::present("3")}, "a b"},
        {{CellValue::present("b"), CellValue::present("1"), CellValue::present("2"), CellValue::present("3")}, "a.b"},
    };
    const auto budgets = compute_char_budgets(samples, s, FormatOptions{});
    CHECK_THROWS_AS(emit_dataset(samples, plan_equal_font(4, budgets.budgets, CanvasSpec{}), s, FormatOptions{},
                                 dir / "out"),
                    DataError);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("a failure part way removes the partial output") {
    TempDir dir("cleanup");
    TabularSchema s = weather_schema();
    std::vector<Sample> samples;
    for (int i = 0; i < 30; ++i)
        samples.push_back({{CellValue::present("a"), CellValue::present("1"), CellValue::present("2"),
                            CellValue::present("3")},
                           "L"});
    const auto budgets = compute_char_budgets(samples, s, FormatOptions{});
    const LayoutPlan plan = plan_equal_font(4, budgets.budgets, CanvasSpec{});
    // A value longer than the plan budgets is rejected up front.
    samples[20].values[0] = CellValue::present("much-too-long");
    for (unsigned workers : {1u, 4u}) {
        EmitOptions opts;
        opts.workers = workers;
        CHECK_THROWS_AS(emit_dataset(samples, plan, s, FormatOptions{}, dir / "out", opts), DataError);
        CHECK_FALSE(fs::exists(dir / "out"));
    }
    // A write failure part way through: a directory squats on one image name.
    samples[20].values[0] = CellValue::present("a");
    fs::create_directories(dir / "out/L_00020.png");
    for (unsigned workers : {1u, 4u}) {
        EmitOptions opts;
        opts.workers = workers;
        CHECK_THROWS_AS(emit_dataset(samples, plan, s, FormatOptions{}, dir / "out", opts), IoError);
        std::vector<std::string> left;
        for (const auto& e : fs::directory_iterator(dir / "out")) left.push_back(e.path().filename().string());
        CHECK(left == std::vector<std::string>{"L_00020.png"});
    }
}

TEST_CASE("plan and schema must agree") {
    TempDir dir("mismatch");
    const Dataset iris = load("/iris.csv", 4);
    const Dataset wine = load("/wine.csv", 0);
    CHECK_THROWS_AS(emit_dataset(iris.samples, wine.plan, iris.schema, FormatOptions{}, dir / "out"), DataError);
}

}  // TEST_SUITE
