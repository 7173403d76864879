// supertml: convert delimited tables into text-image datasets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "supertml/emit.hpp"
#include "supertml/error.hpp"
#include "supertml/format.hpp"
#include "supertml/importance.hpp"
#include "supertml/ingest.hpp"
#include "supertml/layout.hpp"
#include "supertml/text.hpp"

namespace fs = std::filesystem;
using namespace supertml;

namespace {

struct DataArgs {
    std::string path;
    std::string label;
    std::string schema_file;
    bool no_header = false;
    std::string delimiter = ",";
    std::vector<std::string> missing_tokens;
    bool missing_tokens_given = false;
};

struct FormatArgs {
    std::string missing_text = "missing";
    bool keep_missing_token = false;
    std::string abbrev_file;
    std::size_t max_chars_numeric = 16;
    std::size_t max_chars_categorical = 24;
};

struct PlanArgs {
    std::string mode = "ef";
    int size = 224;
    std::optional<int> margin;
    std::string importance = "builtin";
    std::vector<int> tiers;
    std::string sew = "off";
    std::string from_plan;
};

struct Dataset {
    TabularSchema schema;
    std::vector<Sample> samples;
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
    cmd->add_option("data", a.path, "Delimited input table")->required();
    cmd->add_option("--label", a.label, "Label column name or 0-based index (default: last column)");
    cmd->add_option("--schema", a.schema_file, "Schema JSON to use instead of inference");
    cmd->add_flag("--no-header", a.no_header, "Input has no header row; columns are named F1..Fn");
    cmd->add_option("--delimiter", a.delimiter, "Field delimiter (one character, or 'tab')");
    cmd->add_option("--missing-token", a.missing_tokens, "Cell text treated as missing (repeatable; replaces the defaults)");
}

void add_format_options(CLI::App* cmd, FormatArgs& a) {
    cmd->add_option("--missing-text", a.missing_text, "Text drawn for missing cells");
    cmd->add_flag("--keep-missing-token", a.keep_missing_token, "Draw the source token (e.g. '?') for missing cells");
    cmd->add_option("--abbrev", a.abbrev_file, "JSON map {column: {value: short}}");
    cmd->add_option("--max-chars-numeric", a.max_chars_numeric, "Character cap for numeric cells");
    cmd->add_option("--max-chars-categorical", a.max_chars_categorical, "Character cap for categorical cells");
}

void add_plan_options(CLI::App* cmd, PlanArgs& a) {
    cmd->add_option("--mode", a.mode, "Layout mode")->check(CLI::IsMember({"ef", "vf"}));
    cmd->add_option("--size", a.size, "Canvas side in pixels")->check(CLI::PositiveNumber);
    cmd->add_option("--margin", a.margin, "Gap between cells in pixels (default scales with --size)");
    cmd->add_option("--importance", a.importance, "Importance file (JSON or CSV) or 'builtin'");
    cmd->add_option("--tiers", a.tiers, "Descending font sizes for vf mode")->delimiter(',');
    cmd->add_option("--sew", a.sew, "Squared-word columns: auto, off, or a comma list of names");
    cmd->add_option("--from-plan", a.from_plan, "Rescale this plan to --size instead of replanning");
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", p.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError(fmt::format("cannot write '{}'", path));
}

CsvOptions csv_options(const DataArgs& a) {
    CsvOptions o;
    o.has_header = !a.no_header;
    if (a.delimiter == "tab" || a.delimiter == "\\t")
        o.delimiter = '\t';
    else if (a.delimiter.size() == 1)
        o.delimiter = a.delimiter[0];
    else
        throw UsageError(fmt::format("delimiter must be a single character, got '{}'", a.delimiter));
    return o;
}

Dataset load_dataset(const DataArgs& a) {
    const RawTable table = read_table(fs::path(a.path), csv_options(a));
    Dataset d;
    if (!a.schema_file.empty()) {
        d.schema = schema_from_json(nlohmann::json::parse(read_text(a.schema_file)));
        if (!table.header.empty() && table.header.size() != d.schema.columns.size())
            throw DataError(fmt::format("schema lists {} columns, the table has {}", d.schema.columns.size(),
                                        table.header.size()));
        if (!a.label.empty()) {
            std::vector<std::string> names;
            for (const auto& c : d.schema.columns) names.push_back(c.name);
            d.schema.label_column = resolve_column(names, a.label);
        }
        if (a.missing_tokens_given)
            d.schema.missing_tokens = {a.missing_tokens.begin(), a.missing_tokens.end()};
    } else {
        if (table.rows.empty()) throw DataError(fmt::format("'{}' has no data rows", a.path));
        const std::size_t label =
            a.label.empty() ? table.header.size() - 1 : resolve_column(table.header, a.label);
        auto tokens = a.missing_tokens_given ? std::set<std::string>(a.missing_tokens.begin(), a.missing_tokens.end())
                                             : default_missing_tokens();
        d.schema = infer_schema(table.rows, label, std::move(tokens), table.header);
    }
    d.samples = parse_records(table, d.schema);
    return d;
}

FormatOptions format_options(const FormatArgs& a) {
    FormatOptions o;
    o.missing_text = a.missing_text;
    o.keep_missing_token = a.keep_missing_token;
    o.max_chars_numeric = a.max_chars_numeric;
    o.max_chars_categorical = a.max_chars_categorical;
    if (!a.abbrev_file.empty()) o.abbreviations = load_abbreviations(a.abbrev_file);
    o.validate();
    return o;
}

std::set<std::size_t> sew_features(const std::string& selection, const TabularSchema& schema) {
    std::set<std::size_t> out;
    if (selection == "off" || selection.empty()) return out;
    if (selection == "auto") {
        for (std::size_t f = 0; f < schema.feature_count(); ++f)
            if (schema.feature(f).kind == ColumnKind::Categorical) out.insert(f);
        return out;
    }
    const auto names = schema.feature_names();
    std::stringstream ss(selection);
    std::string name;
    while (std::getline(ss, name, ',')) {
        const std::size_t f = resolve_column(names, std::string(trim(name)));
        if (schema.feature(f).kind != ColumnKind::Categorical)
            throw UsageError(fmt::format("squared-word rendering applies to categorical columns; '{}' is {}",
                                         names[f], to_string(schema.feature(f).kind)));
        out.insert(f);
    }
    return out;
}

LayoutPlan build_plan(const Dataset& d, const FormatOptions& fo, const PlanArgs& pa) {
    if (!pa.from_plan.empty()) {
        const LayoutPlan base = parse_plan(read_text(pa.from_plan));
        return scale_plan(base, pa.size);
    }
    CanvasSpec canvas = CanvasSpec::for_side(pa.size);
    if (pa.margin) canvas.margin = *pa.margin;
    canvas.validate();

    check_distinct_formatting(d.samples, d.schema, fo);
    const CharBudgets budgets = compute_char_budgets(d.samples, d.schema, fo);
    if (budgets.truncated_total() > 0)
        std::cerr << fmt::format("warning: {} cell(s) truncated to the character cap\n", budgets.truncated_total());
    const auto sew = sew_features(pa.sew, d.schema);
    const std::size_t n = d.schema.feature_count();

    LayoutPlan plan;
    try {
        if (pa.mode == "ef") {
            plan = plan_equal_font(n, budgets.budgets, canvas, sew);
        } else {
            const ImportanceVector imp = pa.importance == "builtin"
                                             ? estimate_importance(d.samples, d.schema)
                                             : load_importance(pa.importance, d.schema);
            const std::vector<int> tiers = pa.tiers.empty() ? default_font_tiers(pa.size) : pa.tiers;
            plan = plan_variant_font(imp.scores, budgets.budgets, canvas, tiers, sew);
        }
    } catch (const InfeasibleLayout& e) {
        throw InfeasibleLayout(fmt::format("{} [features: {}]", e.what(), fmt::join(d.schema.feature_names(), ", ")));
    }
    plan.feature_names = d.schema.feature_names();
    return plan;
}

void check_plan_matches(const LayoutPlan& plan, const TabularSchema& schema) {
    if (plan.feature_count() != schema.feature_count())
        throw DataError(fmt::format("plan has {} cells, the data has {} features", plan.feature_count(),
                                    schema.feature_count()));
    if (!plan.feature_names.empty() && plan.feature_names != schema.feature_names())
        throw DataError("plan feature names do not match the data columns");
}

std::pair<unsigned, unsigned> parse_ratio(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError(fmt::format("split must look like 80:20, got '{}'", s));
    const auto a = s.substr(0, colon), b = s.substr(colon + 1);
    if (!is_integer_literal(a) || !is_integer_literal(b)) throw UsageError(fmt::format("bad split '{}'", s));
    return {static_cast<unsigned>(std::stoul(a)), static_cast<unsigned>(std::stoul(b))};
}

int report(const std::exception& e, int code) {
    std::cerr << "supertml: " << e.what() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convert tabular data into SuperTML text images"};
    app.require_subcommand(1);

    DataArgs data;
    FormatArgs fmt_args;
    PlanArgs plan_args;

    auto* schema_cmd = app.add_subcommand("schema", "Infer and print the table schema");
    std::string schema_out;
    add_data_options(schema_cmd, data);
    schema_cmd->add_option("-o,--out", schema_out, "Write the schema here instead of stdout");

    auto* plan_cmd = app.add_subcommand("plan", "Compute a layout plan");
    std::string plan_out;
    add_data_options(plan_cmd, data);
    add_format_options(plan_cmd, fmt_args);
    add_plan_options(plan_cmd, plan_args);
    plan_cmd->add_option("-o,--out", plan_out, "Write the plan here instead of stdout");

    auto* convert_cmd = app.add_subcommand("convert", "Render every row to an image");
    std::string plan_file, out_dir, split;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool by_class_dirs = false;
    add_data_options(convert_cmd, data);
    add_format_options(convert_cmd, fmt_args);
    add_plan_options(convert_cmd, plan_args);
    convert_cmd->add_option("--plan", plan_file, "Use this plan instead of planning");
    convert_cmd->add_option("--out", out_dir, "Output directory")->required();
    convert_cmd->add_option("--split", split, "train:test ratio, e.g. 80:20");
    convert_cmd->add_option("--seed", seed, "Seed for --split");
    convert_cmd->add_option("--workers", workers, "Render threads")->check(CLI::PositiveNumber);
    convert_cmd->add_flag("--by-class-dirs", by_class_dirs, "Put images in one folder per label");

    auto* validate_cmd = app.add_subcommand("validate", "Check a plan file or a manifest");
    std::string validate_path;
    validate_cmd->add_option("path", validate_path, "plan JSON, manifest.tsv, or an output directory")
        ->required();

    auto* importance_cmd = app.add_subcommand("importance", "Estimate feature importance (mutual information)");
    std::string importance_out;
    add_data_options(importance_cmd, data);
    importance_cmd->add_option("-o,--out", importance_out, "Write scores here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
    }
    for (auto* cmd : {schema_cmd, plan_cmd, convert_cmd, importance_cmd})
        if (cmd->parsed() && cmd->count("--missing-token") > 0) data.missing_tokens_given = true;

    try {
        if (schema_cmd->parsed()) {
            const Dataset d = load_dataset(data);
            write_text(schema_out, schema_to_json(d.schema).dump(2) + "\n");
        } else if (plan_cmd->parsed()) {
            const Dataset d = load_dataset(data);
            const LayoutPlan plan = build_plan(d, format_options(fmt_args), plan_args);
            write_text(plan_out, serialize_plan(plan));
        } else if (convert_cmd->parsed()) {
            const Dataset d = load_dataset(data);
            const FormatOptions fo = format_options(fmt_args);
            LayoutPlan plan;
            if (!plan_file.empty()) {
                for (const char* flag : {"--mode", "--size", "--margin", "--importance", "--tiers", "--sew", "--from-plan"})
                    if (convert_cmd->count(flag) > 0)
                        throw UsageError(fmt::format("{} conflicts with --plan", flag));
                plan = parse_plan(read_text(plan_file));
            } else {
                plan = build_plan(d, fo, plan_args);
            }
            check_plan_matches(plan, d.schema);
            EmitOptions eo;
            eo.workers = workers;
            eo.by_class_dirs = by_class_dirs;
            std::size_t truncated = 0;
            if (split.empty()) {
                const auto m = emit_dataset(d.samples, plan, d.schema, fo, out_dir, eo);
                truncated = m.truncated_cells;
                std::cout << fmt::format("wrote {} images to {}\n", m.entries.size(), out_dir);
            } else {
                const auto [train, test] = parse_ratio(split);
                const SplitIndices idx = split_indices(d.samples.size(), train, test, seed);
                for (const auto& [name, rows] : {std::pair{"train", &idx.train}, std::pair{"test", &idx.test}}) {
                    std::vector<Sample> part;
                    for (auto r : *rows) part.push_back(d.samples[r]);
                    const auto m = emit_dataset(part, plan, d.schema, fo, fs::path(out_dir) / name, eo, *rows);
                    truncated += m.truncated_cells;
                    std::cout << fmt::format("wrote {} {} images to {}\n", m.entries.size(), name,
                                             (fs::path(out_dir) / name).string());
                }
            }
            if (truncated > 0)
                std::cerr << fmt::format("warning: {} cell(s) truncated to the character cap\n", truncated);
        } else if (validate_cmd->parsed()) {
            fs::path p = validate_path;
            if (fs::is_directory(p)) p /= kManifestFile;
            if (p.extension() == ".tsv") {
                const ManifestCheck check = parse_manifest(p);
                const auto plan = parse_plan(read_text(p.parent_path() / kPlanFile));
                const auto violations = validate_plan(plan);
                for (const auto& v : violations) std::cout << "violation: " << v.message << "\n";
                for (const auto& w : check.warnings) std::cout << "warning: " << w << "\n";
                std::cout << fmt::format("{} entries, {} warning(s), {} plan violation(s)\n",
                                         check.manifest.entries.size(), check.warnings.size(), violations.size());
                return violations.empty() && check.warnings.empty() ? 0 : static_cast<int>(ErrorKind::Data);
            }
            const auto violations = validate_plan(parse_plan(read_text(p)));
            for (const auto& v : violations)
                std::cout << fmt::format("{}: {}\n", to_string(v.kind), v.message);
            std::cout << fmt::format("{} violation(s)\n", violations.size());
            return violations.empty() ? 0 : static_cast<int>(ErrorKind::Data);
        } else if (importance_cmd->parsed()) {
            const Dataset d = load_dataset(data);
            write_text(importance_out, importance_to_json(estimate_importance(d.samples, d.schema), d.schema).dump(2) + "\n");
        }
    } catch (const Error& e) {
        return report(e, static_cast<int>(e.kind()));
    } catch (const nlohmann::json::exception& e) {
        return report(e, static_cast<int>(ErrorKind::Data));
    } catch (const std::filesystem::filesystem_error& e) {
        return report(e, static_cast<int>(ErrorKind::Io));
    } catch (const std::exception& e) {
        return report(e, static_cast<int>(ErrorKind::Data));
    }
    return 0;
}
