#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace supertml {

struct CanvasSpec {
    int side = 224;
    int margin = 2;  // minimum gap between cells and around the border
    std::uint8_t background = 255;
    std::uint8_t foreground = 0;

    /// Default canvas for a side length: margin is 2 px at 224, scaled
    /// proportionally (at least 1 px).
    static CanvasSpec for_side(int side);
    void validate() const;

    bool operator==(const CanvasSpec&) const = default;
};

struct CellSpec {
    std::size_t feature = 0;
    int x = 0;  // top-left
    int y = 0;
    int width = 0;
    int height = 0;
    int font_size = 0;  // glyph height in pixels
    int lines = 1;      // text lines the planner budgeted for this cell
    bool sew = false;   // squared-word cell; width == height

    int right() const noexcept { return x + width; }
    int bottom() const noexcept { return y + height; }

    bool operator==(const CellSpec&) const = default;
};

enum class LayoutMode { EqualFont, VariantFont };

std::string_view to_string(LayoutMode mode) noexcept;

/// Fixed placement of every feature on the canvas, shared by all samples of
/// a dataset.
struct LayoutPlan {
    CanvasSpec canvas;
    LayoutMode mode = LayoutMode::EqualFont;
    std::vector<CellSpec> cells;  // cells[i].feature == i
    std::vector<std::size_t> char_budget;
    std::vector<std::string> feature_names;  // optional; empty or one per feature
    int grid_rows = 0;  // equal-font plans only
    int grid_cols = 0;

    std::size_t feature_count() const noexcept { return cells.size(); }

    bool operator==(const LayoutPlan&) const = default;
};

struct Violation {
    enum class Kind {
        OutOfBounds,
        Overlap,
        MarginBreach,
        FontTooSmall,
        TextOverflow,
        NotSquare,
        FeatureMismatch,
    };
    Kind kind;
    std::size_t first = 0;   // cell index
    std::size_t second = 0;  // other cell index, for pairwise violations
    std::string message;
};

std::string_view to_string(Violation::Kind kind) noexcept;

/// Empty iff the plan satisfies every layout invariant.
std::vector<Violation> validate_plan(const LayoutPlan& plan);

/// Squared-word grid arity for a word of `chars` characters: ceil(sqrt(chars)).
int sew_grid_arity(std::size_t chars) noexcept;

/// Largest uniform font for a grid of `rows` x `cols` equal cells, or 0 when
/// the grid cannot host every feature at a legible size.
int equal_font_for_grid(int rows, int cols, std::span<const std::size_t> char_budget, const CanvasSpec& canvas,
                        const std::set<std::size_t>& sew_features);

/// Grid layout giving every feature the same, maximal, font size.
LayoutPlan plan_equal_font(std::size_t n_features, std::span<const std::size_t> char_budget,
                           const CanvasSpec& canvas, const std::set<std::size_t>& sew_features = {});

/// {48, 32, 24, 16, 12, 8} at 224 px, scaled for other sides.
std::vector<int> default_font_tiers(int side = 224);

/// Tier index (into font_tiers) of every feature before any fitting
/// adjustment: features are ranked by importance and split into contiguous
/// groups by cumulative importance mass. Equal importances share a group.
std::vector<std::size_t> assign_tier_groups(std::span<const double> importances, std::size_t n_tiers);

/// Importance-sized layout: more important features get larger fonts, cells
/// are packed by guillotine splits in rank order.
LayoutPlan plan_variant_font(std::span<const double> importances, std::span<const std::size_t> char_budget,
                             const CanvasSpec& canvas, std::span<const int> font_tiers,
                             const std::set<std::size_t>& sew_features = {});

/// Rescales a plan to another canvas side, keeping every cell's relative
/// position and shrinking fonts only where rounding would overflow a cell.
LayoutPlan scale_plan(const LayoutPlan& plan, int new_side);

nlohmann::json plan_to_json(const LayoutPlan& plan);
LayoutPlan plan_from_json(const nlohmann::json& j);
/// Canonical serialized form; plan digests are taken over these bytes.
std::string serialize_plan(const LayoutPlan& plan);
LayoutPlan parse_plan(std::string_view text);

}  // namespace supertml
