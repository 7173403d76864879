#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "supertml/font.hpp"
#include "supertml/format.hpp"
#include "supertml/ingest.hpp"
#include "supertml/layout.hpp"

namespace supertml {

inline constexpr std::string_view kManifestFile = "manifest.tsv";
inline constexpr std::string_view kDigestFile = "manifest.json";
inline constexpr std::string_view kPlanFile = "plan.json";

struct ManifestEntry {
    std::string image_path;  // relative to the manifest's directory
    std::string label;
    std::size_t row_index = 0;   // dense from 0 within this manifest
    std::size_t source_row = 0;  // data row in the source table

    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::string plan_digest;    // sha256 of the plan file bytes
    std::string config_digest;  // sha256 of schema + format options
    std::size_t truncated_cells = 0;

    bool operator==(const DatasetManifest&) const = default;
};

struct EmitOptions {
    unsigned workers = 1;
    bool by_class_dirs = false;
};

/// Non-alphanumeric code points become '-'.
std::string sanitize_label(std::string_view label);
/// "<sanitized_label>_<row_index, zero-padded to 5>.png"
std::string image_filename(std::string_view sanitized_label, std::size_t row_index);
/// Sanitized label encoded in an image file name.
std::string label_from_filename(std::string_view filename);

std::string sha256_hex(std::string_view bytes);
std::string config_digest(const TabularSchema& schema, const FormatOptions& options);

/// Renders every sample to `<out_dir>/<label>_<index>.png` and writes the
/// plan, a TSV manifest and a JSON digest sidecar next to them. Output is
/// identical for any worker count. On failure every file written so far is
/// removed. `source_rows`, when given, records each sample's row in the
/// original table (defaults to the sample's position).
DatasetManifest emit_dataset(const std::vector<Sample>& samples, const LayoutPlan& plan, const TabularSchema& schema,
                             const FormatOptions& options, const std::filesystem::path& out_dir,
                             const EmitOptions& emit_options = {}, std::span<const std::size_t> source_rows = {},
                             const GlyphFont& font = GlyphFont::builtin());

struct ManifestCheck {
    DatasetManifest manifest;
    std::vector<std::string> warnings;  // e.g. images that are not on disk
};

/// Reads `manifest.tsv` and its sidecar, and checks the co-located plan file
/// against the recorded digest (IntegrityError on mismatch).
ManifestCheck parse_manifest(const std::filesystem::path& manifest_path);

}  // namespace supertml
