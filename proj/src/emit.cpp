#include "supertml/emit.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "supertml/error.hpp"
#include "supertml/png.hpp"
#include "supertml/render.hpp"
#include "supertml/text.hpp"

namespace fs = std::filesystem;

namespace supertml {

namespace {

constexpr std::string_view kTsvHeader = "image_path\tlabel\trow_index\tsource_row";

std::string tsv_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string tsv_unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out.push_back(s[i]);
            continue;
        }
        switch (s[++i]) {
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: out.push_back(s[i]);
        }
    }
    return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', start);
        out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) return out;
        start = tab + 1;
    }
}

// Removes every path it tracks unless dismissed.
class OutputGuard {
public:
    void track(fs::path p) {
        std::lock_guard lock(mu_);
        paths_.push_back(std::move(p));
    }
    void dismiss() { dismissed_ = true; }
    ~OutputGuard() {
        if (dismissed_) return;
        std::error_code ec;
        for (auto it = paths_.rbegin(); it != paths_.rend(); ++it) fs::remove(*it, ec);
    }

private:
    std::mutex mu_;
    std::vector<fs::path> paths_;
    bool dismissed_ = false;
};

// Only files this call managed to open are handed to the guard, so a failed
// open never removes something that was already there.
void write_file(const fs::path& path, std::string_view bytes, OutputGuard& guard) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot create '{}'", path.string()));
    guard.track(path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}


}  // namespace

std::string sanitize_label(std::string_view label) {
    std::string out;
    for (char32_t cp : decode_utf8(label)) {
        const bool alnum = (cp >= U'0' && cp <= U'9') || (cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z');
        out.push_back(alnum ? static_cast<char>(cp) : '-');
    }
    return out;
}

std::string image_filename(std::string_view sanitized_label, std::size_t row_index) {
    return fmt::format("{}_{:05}.png", sanitized_label, row_index);
}

std::string label_from_filename(std::string_view filename) {
    const auto slash = filename.find_last_of('/');
    if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
    const auto underscore = filename.rfind('_');
    if (underscore == std::string_view::npos) throw DataError(fmt::format("'{}' carries no label", filename));
    return std::string(filename.substr(0, underscore));
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw DataError("sha256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::string config_digest(const TabularSchema& schema, const FormatOptions& options) {
    const nlohmann::json j = {{"schema", schema_to_json(schema)}, {"format", format_options_to_json(options)}};
    return sha256_hex(j.dump());
}

DatasetManifest emit_dataset(const std::vector<Sample>& samples, const LayoutPlan& plan, const TabularSchema& schema,
                             const FormatOptions& options, const fs::path& out_dir, const EmitOptions& emit_options,
                             std::span<const std::size_t> source_rows, const GlyphFont& font) {
    if (const auto violations = validate_plan(plan); !violations.empty())
        throw DataError(fmt::format("plan is invalid: {}", violations.front().message));
    if (plan.feature_count() != schema.feature_count())
        throw DataError(fmt::format("plan has {} cells, schema has {} features", plan.feature_count(),
                                    schema.feature_count()));
    if (!source_rows.empty() && source_rows.size() != samples.size())
        throw DataError("source row list does not match the sample count");
    options.validate();

    const CharBudgets budgets = compute_char_budgets(samples, schema, options);
    for (std::size_t f = 0; f < budgets.budgets.size(); ++f) {
        if (budgets.budgets[f] > plan.char_budget[f])
            throw DataError(fmt::format("feature '{}' needs {} characters, the plan budgets {}",
                                        schema.feature(f).name, budgets.budgets[f], plan.char_budget[f]));
    }
    check_distinct_formatting(samples, schema, options);

    std::map<std::string, std::string> sanitized_to_label;
    std::vector<std::string> sanitized(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sanitized[i] = sanitize_label(samples[i].label);
        const auto [it, inserted] = sanitized_to_label.emplace(sanitized[i], samples[i].label);
        if (!inserted && it->second != samples[i].label)
            throw DataError(fmt::format("labels '{}' and '{}' both sanitize to '{}'", it->second, samples[i].label,
                                        sanitized[i]));
    }

    OutputGuard guard;
    std::error_code ec;
    if (!fs::exists(out_dir)) {
        if (!fs::create_directories(out_dir, ec)) throw IoError(fmt::format("cannot create '{}'", out_dir.string()));
        guard.track(out_dir);
    }
    if (emit_options.by_class_dirs) {
        for (const auto& [dir, label] : sanitized_to_label) {
            const fs::path p = out_dir / dir;
            if (fs::exists(p)) continue;
            if (!fs::create_directory(p, ec)) throw IoError(fmt::format("cannot create '{}'", p.string()));
            guard.track(p);
        }
    }

    DatasetManifest manifest;
    manifest.truncated_cells = budgets.truncated_total();
    manifest.config_digest = config_digest(schema, options);
    const std::string plan_text = serialize_plan(plan);
    manifest.plan_digest = sha256_hex(plan_text);
    write_file(out_dir / kPlanFile, plan_text, guard);

    manifest.entries.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ManifestEntry& e = manifest.entries[i];
        const std::string name = image_filename(sanitized[i], i);
        e.image_path = emit_options.by_class_dirs ? sanitized[i] + "/" + name : name;
        e.label = samples[i].label;
        e.row_index = i;
        e.source_row = source_rows.empty() ? i : source_rows[i];
    }

    // Workers claim rows from a shared counter; the lowest failing row wins
    // so the reported error does not depend on scheduling.
    std::atomic<std::size_t> next{0};
    std::mutex error_mu;
    std::optional<std::size_t> failed_row;
    std::exception_ptr failure;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= samples.size()) return;
            try {
                const RasterImage image = render_sample(samples[i], plan, schema, options, font);
                const auto png = encode_png(image);
                const fs::path path = out_dir / manifest.entries[i].image_path;
                write_file(path, std::string_view(reinterpret_cast<const char*>(png.data()), png.size()), guard);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!failed_row || i < *failed_row) {
                    failed_row = i;
                    failure = std::current_exception();
                }
                next.store(samples.size());
                return;
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(emit_options.workers, static_cast<unsigned>(samples.size())));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    std::string tsv(kTsvHeader);
    tsv += '\n';
    for (const auto& e : manifest.entries)
        tsv += fmt::format("{}\t{}\t{}\t{}\n", tsv_escape(e.image_path), tsv_escape(e.label), e.row_index, e.source_row);
    const nlohmann::json sidecar = {{"plan_file", kPlanFile},
                                    {"plan_digest", manifest.plan_digest},
                                    {"config_digest", manifest.config_digest},
                                    {"image_count", manifest.entries.size()},
                                    {"truncated_cells", manifest.truncated_cells},
                                    {"image_format", "png"}};
    write_file(out_dir / kManifestFile, tsv, guard);
    write_file(out_dir / kDigestFile, sidecar.dump(2) + "\n", guard);
    guard.dismiss();
    return manifest;
}

ManifestCheck parse_manifest(const fs::path& manifest_path) {
    const fs::path dir = manifest_path.parent_path();
    ManifestCheck check;
    DatasetManifest& m = check.manifest;

    std::istringstream tsv(read_file(manifest_path));
    std::string line;
    if (!std::getline(tsv, line) || line != kTsvHeader)
        throw DataError(fmt::format("'{}' does not start with the manifest header", manifest_path.string()));
    std::set<std::string> paths;
    std::size_t line_no = 1;
    while (std::getline(tsv, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 4) throw DataError(fmt::format("manifest line {}: expected 4 fields", line_no));
        ManifestEntry e;
        e.image_path = tsv_unescape(fields[0]);
        e.label = tsv_unescape(fields[1]);
        if (!is_integer_literal(fields[2]) || !is_integer_literal(fields[3]))
            throw DataError(fmt::format("manifest line {}: bad row index", line_no));
        e.row_index = std::stoull(fields[2]);
        e.source_row = std::stoull(fields[3]);
        if (e.row_index != m.entries.size())
            throw DataError(fmt::format("manifest line {}: row index {} breaks the dense sequence", line_no, e.row_index));
        if (!paths.insert(e.image_path).second)
            throw DataError(fmt::format("manifest line {}: duplicate image path '{}'", line_no, e.image_path));
        if (sanitize_label(e.label) != label_from_filename(e.image_path))
            check.warnings.push_back(fmt::format("'{}' does not encode label '{}'", e.image_path, e.label));
        if (!fs::exists(dir / e.image_path)) check.warnings.push_back(fmt::format("missing image '{}'", e.image_path));
        m.entries.push_back(std::move(e));
    }

    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(read_file(dir / kDigestFile));
        m.plan_digest = sidecar.at("plan_digest").get<std::string>();
        m.config_digest = sidecar.at("config_digest").get<std::string>();
        m.truncated_cells = sidecar.value("truncated_cells", std::size_t{0});
        if (sidecar.value("image_count", m.entries.size()) != m.entries.size())
            throw DataError("manifest entry count disagrees with its sidecar");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("malformed manifest sidecar: {}", e.what()));
    }
    const std::string plan_file = sidecar.value("plan_file", std::string(kPlanFile));
    const std::string actual = sha256_hex(read_file(dir / plan_file));
    if (actual != m.plan_digest)
        throw IntegrityError(fmt::format("'{}' does not match the recorded plan digest", (dir / plan_file).string()));
    return check;
}

}  // namespace supertml
