#include "supertml/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "supertml/error.hpp"
#include "supertml/font.hpp"

namespace supertml {

namespace {

constexpr int kMinFont = GlyphFont::kMinLegibleSize;

int ceil_div(std::size_t a, std::size_t b) { return static_cast<int>((a + b - 1) / b); }

// Largest font whose advance is at most `advance_px`.
int max_font_for_advance(int advance_px) {
    if (advance_px < 1) return 0;
    // advance(f) = (4f + 3) / 6 <= a  <=>  f <= (6a + 2) / 4
    return (6 * advance_px + 2) / 4;
}

// Largest single-line font at which `budget` characters fit a w x h box.
int fit_text(std::size_t budget, int w, int h) {
    if (w < 1 || h < 1) return 0;
    return std::min(h, max_font_for_advance(w / static_cast<int>(budget)));
}

int cell_extent(int side, int margin, int count) { return (side - (count + 1) * margin) / count; }

// Leading edge of grid slot k: slots share the span after the first margin,
// so any leftover pixels are spread between cells instead of piling up at the
// far edge.
int slot_origin(int side, int margin, int count, int k) { return margin + k * (side - margin) / count; }

}  // namespace

// ---------------------------------------------------------------------------

CanvasSpec CanvasSpec::for_side(int side) {
    CanvasSpec c;
    c.side = side;
    c.margin = std::max(1, static_cast<int>(std::lround(2.0 * side / 224.0)));
    return c;
}

void CanvasSpec::validate() const {
    if (side <= 0) throw DataError(fmt::format("canvas side must be positive, got {}", side));
    if (margin < 0 || 2 * margin >= side)
        throw DataError(fmt::format("margin {} does not fit a {} px canvas", margin, side));
}

std::string_view to_string(LayoutMode mode) noexcept {
    return mode == LayoutMode::EqualFont ? "equal_font" : "variant_font";
}

std::string_view to_string(Violation::Kind kind) noexcept {
    switch (kind) {
        case Violation::Kind::OutOfBounds: return "out_of_bounds";
        case Violation::Kind::Overlap: return "overlap";
        case Violation::Kind::MarginBreach: return "margin_breach";
        case Violation::Kind::FontTooSmall: return "font_too_small";
        case Violation::Kind::TextOverflow: return "text_overflow";
        case Violation::Kind::NotSquare: return "not_square";
        case Violation::Kind::FeatureMismatch: return "feature_mismatch";
    }
    return "unknown";
}

int sew_grid_arity(std::size_t chars) noexcept {
    int g = 0;
    while (static_cast<std::size_t>(g) * static_cast<std::size_t>(g) < chars) ++g;
    return g;
}

std::vector<Violation> validate_plan(const LayoutPlan& plan) {
    std::vector<Violation> out;
    const auto& cv = plan.canvas;
    const int m = cv.margin;
    if (plan.char_budget.size() != plan.cells.size())
        out.push_back({Violation::Kind::FeatureMismatch, 0, 0,
                       fmt::format("{} character budgets for {} cells", plan.char_budget.size(), plan.cells.size())});
    if (!plan.feature_names.empty() && plan.feature_names.size() != plan.cells.size())
        out.push_back({Violation::Kind::FeatureMismatch, 0, 0,
                       fmt::format("{} feature names for {} cells", plan.feature_names.size(), plan.cells.size())});

    for (std::size_t i = 0; i < plan.cells.size(); ++i) {
        const CellSpec& c = plan.cells[i];
        if (c.feature != i)
            out.push_back({Violation::Kind::FeatureMismatch, i, i,
                           fmt::format("cell {} is assigned to feature {}", i, c.feature)});
        if (c.width < 1 || c.height < 1 || c.x < 0 || c.y < 0 || c.right() > cv.side || c.bottom() > cv.side) {
            out.push_back({Violation::Kind::OutOfBounds, i, i,
                           fmt::format("cell {} ({},{} {}x{}) leaves the {} px canvas", i, c.x, c.y, c.width,
                                       c.height, cv.side)});
            continue;
        }
        const std::size_t budget = i < plan.char_budget.size() ? plan.char_budget[i] : 1;
        if (c.sew) {
            if (c.width != c.height)
                out.push_back({Violation::Kind::NotSquare, i, i,
                               fmt::format("squared-word cell {} is {}x{}", i, c.width, c.height)});
            const int slot = std::min(c.width, c.height) / sew_grid_arity(budget);
            if (slot < kMinFont)
                out.push_back({Violation::Kind::FontTooSmall, i, i,
                               fmt::format("cell {}: squared-word glyphs of {} px", i, slot)});
        } else {
            if (c.font_size < kMinFont)
                out.push_back({Violation::Kind::FontTooSmall, i, i,
                               fmt::format("cell {}: font {} px below {} px", i, c.font_size, kMinFont)});
            const int per_line = c.lines > 0 ? ceil_div(budget, static_cast<std::size_t>(c.lines)) : 0;
            if (c.lines < 1 || c.lines * c.font_size > c.height ||
                per_line * GlyphFont::advance(c.font_size) > c.width)
                out.push_back({Violation::Kind::TextOverflow, i, i,
                               fmt::format("cell {}: {} chars on {} line(s) at {} px exceed {}x{}", i, budget,
                                           c.lines, c.font_size, c.width, c.height)});
        }
    }

    for (std::size_t i = 0; i < plan.cells.size(); ++i) {
        for (std::size_t j = i + 1; j < plan.cells.size(); ++j) {
            const CellSpec& a = plan.cells[i];
            const CellSpec& b = plan.cells[j];
            const int gap_x = std::max(b.x - a.right(), a.x - b.right());
            const int gap_y = std::max(b.y - a.bottom(), a.y - b.bottom());
            if (gap_x < 0 && gap_y < 0) {
                out.push_back({Violation::Kind::Overlap, i, j, fmt::format("cells {} and {} overlap", i, j)});
            } else if (gap_x < m && gap_y < m) {
                out.push_back({Violation::Kind::MarginBreach, i, j,
                               fmt::format("cells {} and {} are closer than {} px", i, j, m)});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equal font

namespace {

struct BudgetSummary {
    std::size_t text_max = 0;  // longest non-squared budget, 0 if none
    std::size_t text_argmax = 0;
    std::size_t sew_max = 0;
    std::size_t sew_argmax = 0;
};

BudgetSummary summarize(std::span<const std::size_t> budget, const std::set<std::size_t>& sew) {
    BudgetSummary s;
    for (std::size_t i = 0; i < budget.size(); ++i) {
        if (sew.count(i)) {
            if (budget[i] > s.sew_max) s.sew_max = budget[i], s.sew_argmax = i;
        } else if (budget[i] > s.text_max) {
            s.text_max = budget[i], s.text_argmax = i;
        }
    }
    return s;
}

// Font ignoring the legibility floor. The longest budget bounds every text
// feature.
int raw_grid_font(int rows, int cols, const BudgetSummary& s, const CanvasSpec& canvas) {
    const int w = cell_extent(canvas.side, canvas.margin, cols);
    const int h = cell_extent(canvas.side, canvas.margin, rows);
    if (w < 1 || h < 1) return 0;
    int f = std::numeric_limits<int>::max();
    if (s.text_max > 0) f = fit_text(s.text_max, w, h);
    if (s.sew_max > 0) {
        const int square = std::min(w, h);
        if (square / sew_grid_arity(s.sew_max) < kMinFont) return 0;
        f = std::min(f, square);
    }
    return f;
}

void check_budgets(std::size_t n, std::span<const std::size_t> budget, const std::set<std::size_t>& sew) {
    if (n == 0) throw DataError("a layout needs at least one feature");
    if (budget.size() != n) throw DataError(fmt::format("{} character budgets for {} features", budget.size(), n));
    for (std::size_t i = 0; i < n; ++i)
        if (budget[i] < 1) throw DataError(fmt::format("feature {} has an empty character budget", i));
    for (auto i : sew)
        if (i >= n) throw DataError(fmt::format("squared-word feature {} out of range", i));
}

}  // namespace

int equal_font_for_grid(int rows, int cols, std::span<const std::size_t> char_budget, const CanvasSpec& canvas,
                        const std::set<std::size_t>& sew_features) {
    const int f = raw_grid_font(rows, cols, summarize(char_budget, sew_features), canvas);
    return f >= kMinFont ? f : 0;
}

LayoutPlan plan_equal_font(std::size_t n_features, std::span<const std::size_t> char_budget,
                           const CanvasSpec& canvas, const std::set<std::size_t>& sew_features) {
    canvas.validate();
    check_budgets(n_features, char_budget, sew_features);
    const BudgetSummary summary = summarize(char_budget, sew_features);
    const int n = static_cast<int>(n_features);

    int best_f = 0, best_r = 0, best_c = 0;
    int raw_best = -1, raw_r = 1, raw_c = n;
    auto better = [&](int f, int r, int c) {
        if (f != best_f) return f > best_f;
        const int d = std::abs(r - c), best_d = std::abs(best_r - best_c);
        if (d != best_d) return d < best_d;
        return r < best_r;
    };
    for (int c = 1; c <= n; ++c) {
        const int r_min = (n + c - 1) / c;
        int first = -1;
        for (int r = r_min; r <= n; ++r) {
            const int raw = raw_grid_font(r, c, summary, canvas);
            if (raw > raw_best) raw_best = raw, raw_r = r, raw_c = c;
            const int f = raw >= kMinFont ? raw : 0;
            if (first < 0) first = f;
            // Taller grids only shrink cells; stop once the font drops.
            if (f < first || f == 0) break;
            if (better(f, r, c)) best_f = f, best_r = r, best_c = c;
        }
    }
    if (best_f == 0) {
        const int w = cell_extent(canvas.side, canvas.margin, raw_c);
        const int h = cell_extent(canvas.side, canvas.margin, raw_r);
        const bool text_blocks = summary.text_max > 0 && fit_text(summary.text_max, w, h) < kMinFont;
        const std::size_t blocker = text_blocks || summary.sew_max == 0 ? summary.text_argmax : summary.sew_argmax;
        throw InfeasibleLayout(fmt::format(
            "no grid fits feature {} ({} chars) at the {} px minimum font on a {} px canvas", blocker,
            char_budget[blocker], kMinFont, canvas.side));
    }

    const int w = cell_extent(canvas.side, canvas.margin, best_c);
    const int h = cell_extent(canvas.side, canvas.margin, best_r);
    LayoutPlan plan;
    plan.canvas = canvas;
    plan.mode = LayoutMode::EqualFont;
    plan.char_budget.assign(char_budget.begin(), char_budget.end());
    plan.grid_rows = best_r;
    plan.grid_cols = best_c;
    for (std::size_t i = 0; i < n_features; ++i) {
        const int row = static_cast<int>(i) / best_c;
        const int col = static_cast<int>(i) % best_c;
        CellSpec cell;
        cell.feature = i;
        cell.x = slot_origin(canvas.side, canvas.margin, best_c, col);
        cell.y = slot_origin(canvas.side, canvas.margin, best_r, row);
        cell.font_size = best_f;
        if (sew_features.count(i)) {
            cell.sew = true;
            cell.width = cell.height = std::min(w, h);
        } else {
            cell.width = w;
            cell.height = h;
        }
        plan.cells.push_back(cell);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Variant font

std::vector<int> default_font_tiers(int side) {
    static constexpr int kTiers224[] = {48, 32, 24, 16, 12, 8};
    std::vector<int> tiers;
    for (int t : kTiers224) {
        const int scaled = std::max(kMinFont, static_cast<int>(std::lround(t * static_cast<double>(side) / 224.0)));
        if (tiers.empty() || scaled < tiers.back()) tiers.push_back(scaled);
    }
    return tiers;
}

namespace {

std::vector<std::size_t> importance_order(std::span<const double> importances) {
    std::vector<std::size_t> order(importances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return importances[a] > importances[b]; });
    return order;
}

void check_importances(std::span<const double> importances) {
    for (std::size_t i = 0; i < importances.size(); ++i) {
        if (!std::isfinite(importances[i]))
            throw DataError(fmt::format("importance of feature {} is not finite", i));
        if (importances[i] < 0) throw DataError(fmt::format("importance of feature {} is negative", i));
    }
}

struct Rect {
    int x, y, w, h;
};

// Places footprints (cell plus leading margin) in the given order, each in the
// top-most, then left-most free rectangle that holds it, and splits the rest
// of that rectangle in two. Returns false when some footprint does not fit.
bool guillotine_pack(const std::vector<std::size_t>& order, const std::vector<int>& widths,
                     const std::vector<int>& heights, const CanvasSpec& canvas, std::vector<CellSpec>& cells) {
    const int m = canvas.margin;
    std::vector<Rect> free{{0, 0, canvas.side - m, canvas.side - m}};
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        const int need_w = widths[i] + m;
        const int need_h = heights[i] + m;
        std::sort(free.begin(), free.end(),
                  [](const Rect& a, const Rect& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
        auto it = std::find_if(free.begin(), free.end(),
                               [&](const Rect& r) { return r.w >= need_w && r.h >= need_h; });
        if (it == free.end()) return false;
        const Rect f = *it;
        free.erase(it);
        cells[i].x = f.x + m;
        cells[i].y = f.y + m;
        cells[i].width = widths[i];
        cells[i].height = heights[i];
        Rect right, below;
        // Cut along the shorter leftover side so the larger remainder stays whole.
        if (f.w - need_w >= f.h - need_h) {
            right = {f.x + need_w, f.y, f.w - need_w, f.h};
            below = {f.x, f.y + need_h, need_w, f.h - need_h};
        } else {
            right = {f.x + need_w, f.y, f.w - need_w, need_h};
            below = {f.x, f.y + need_h, f.w, f.h - need_h};
        }
        if (right.w > 0 && right.h > 0) free.push_back(right);
        if (below.w > 0 && below.h > 0) free.push_back(below);
    }
    return true;
}

}  // namespace

std::vector<std::size_t> assign_tier_groups(std::span<const double> importances, std::size_t n_tiers) {
    check_importances(importances);
    const std::size_t n = importances.size();
    std::vector<std::size_t> group(n, 0);
    if (n_tiers == 0 || n == 0) return group;
    const auto order = importance_order(importances);
    long double total = 0;
    for (double v : importances) total += v;
    long double before = 0;  // mass ranked strictly ahead of the current tie class
    long double running = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        if (k == 0 || importances[i] != importances[order[k - 1]]) before = running;
        std::size_t g = 0;
        if (total > 0) {
            const long double pos = before / total * static_cast<long double>(n_tiers) + 1e-9L;
            g = std::min(n_tiers - 1, static_cast<std::size_t>(std::floor(pos)));
        }
        group[i] = g;
        running += importances[i];
    }
    return group;
}

LayoutPlan plan_variant_font(std::span<const double> importances, std::span<const std::size_t> char_budget,
                             const CanvasSpec& canvas, std::span<const int> font_tiers,
                             const std::set<std::size_t>& sew_features) {
    canvas.validate();
    const std::size_t n = importances.size();
    check_budgets(n, char_budget, sew_features);
    check_importances(importances);
    if (font_tiers.empty()) throw DataError("at least one font tier is required");
    for (std::size_t t = 0; t < font_tiers.size(); ++t) {
        if (font_tiers[t] < kMinFont)
            throw DataError(fmt::format("font tier {} px is below the {} px minimum", font_tiers[t], kMinFont));
        if (t > 0 && font_tiers[t] >= font_tiers[t - 1]) throw DataError("font tiers must be strictly descending");
    }

    const auto order = importance_order(importances);
    const auto groups = assign_tier_groups(importances, font_tiers.size());

    LayoutPlan plan;
    plan.canvas = canvas;
    plan.mode = LayoutMode::VariantFont;
    plan.char_budget.assign(char_budget.begin(), char_budget.end());
    plan.cells.resize(n);
    std::vector<int> widths(n), heights(n);
    const int usable = canvas.side - 2 * canvas.margin;

    // Cap the largest tiers step by step until everything packs. Capping is
    // monotone, so the importance order of font sizes survives.
    for (std::size_t cap = 0; cap < font_tiers.size(); ++cap) {
        bool sized = true;
        for (std::size_t i = 0; i < n; ++i) {
            const int f = font_tiers[std::max(groups[i], cap)];
            CellSpec& cell = plan.cells[i];
            cell = CellSpec{};
            cell.feature = i;
            cell.font_size = f;
            if (sew_features.count(i)) {
                cell.sew = true;
                widths[i] = heights[i] = f * sew_grid_arity(char_budget[i]);
                continue;
            }
            // Text wider than the canvas wraps onto the fewest balanced lines.
            const int adv = GlyphFont::advance(f);
            const int max_per_line = usable / adv;
            if (max_per_line < 1) {
                sized = false;
                break;
            }
            cell.lines = ceil_div(char_budget[i], static_cast<std::size_t>(max_per_line));
            widths[i] = ceil_div(char_budget[i], static_cast<std::size_t>(cell.lines)) * adv;
            heights[i] = cell.lines * f;
        }
        if (sized && guillotine_pack(order, widths, heights, canvas, plan.cells)) return plan;
    }
    const std::size_t widest = *std::max_element(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return widths[a] * heights[a] < widths[b] * heights[b];
    });
    throw InfeasibleLayout(fmt::format("features do not pack on a {} px canvas even at the {} px tier (largest: "
                                       "feature {}, {} chars)",
                                       canvas.side, font_tiers.back(), widest, char_budget[widest]));
}

// ---------------------------------------------------------------------------

LayoutPlan scale_plan(const LayoutPlan& plan, int new_side) {
    CanvasSpec canvas = plan.canvas;
    const double s = static_cast<double>(new_side) / plan.canvas.side;
    canvas.side = new_side;
    canvas.margin = static_cast<int>(std::floor(plan.canvas.margin * s));
    canvas.validate();
    auto scale = [s](int v) { return static_cast<int>(std::lround(v * s)); };

    LayoutPlan out = plan;
    out.canvas = canvas;
    for (auto& c : out.cells) {
        const int x0 = scale(c.x), y0 = scale(c.y);
        const int x1 = scale(c.right()), y1 = scale(c.bottom());
        c.x = x0;
        c.y = y0;
        c.width = x1 - x0;
        c.height = y1 - y0;
        if (c.sew) c.width = c.height = std::min(c.width, c.height);
        const std::size_t budget = plan.char_budget.at(c.feature);
        int f = static_cast<int>(std::floor(c.font_size * s));
        if (c.sew) {
            c.font_size = std::max(f, 1);
            continue;
        }
        while (f > 0) {
            const int per_line = ceil_div(budget, static_cast<std::size_t>(c.lines));
            if (c.lines * f <= c.height && per_line * GlyphFont::advance(f) <= c.width) break;
            --f;
        }
        c.font_size = f;
    }
    return out;
}

nlohmann::json plan_to_json(const LayoutPlan& plan) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : plan.cells) {
        cells.push_back({{"feature", c.feature},
                         {"x", c.x},
                         {"y", c.y},
                         {"width", c.width},
                         {"height", c.height},
                         {"font_size", c.font_size},
                         {"lines", c.lines},
                         {"sew", c.sew}});
    }
    nlohmann::json j = {
        {"canvas",
         {{"side", plan.canvas.side},
          {"margin", plan.canvas.margin},
          {"background", plan.canvas.background},
          {"foreground", plan.canvas.foreground}}},
        {"mode", to_string(plan.mode)},
        {"char_budget", plan.char_budget},
        {"feature_names", plan.feature_names},
        {"cells", cells},
    };
    if (plan.mode == LayoutMode::EqualFont) j["grid"] = {{"rows", plan.grid_rows}, {"cols", plan.grid_cols}};
    return j;
}

LayoutPlan plan_from_json(const nlohmann::json& j) {
    LayoutPlan plan;
    try {
        const auto& cv = j.at("canvas");
        plan.canvas.side = cv.at("side").get<int>();
        plan.canvas.margin = cv.at("margin").get<int>();
        plan.canvas.background = cv.value("background", std::uint8_t{255});
        plan.canvas.foreground = cv.value("foreground", std::uint8_t{0});
        const auto mode = j.at("mode").get<std::string>();
        if (mode == "equal_font")
            plan.mode = LayoutMode::EqualFont;
        else if (mode == "variant_font")
            plan.mode = LayoutMode::VariantFont;
        else
            throw DataError(fmt::format("unknown layout mode '{}'", mode));
        plan.char_budget = j.at("char_budget").get<std::vector<std::size_t>>();
        if (j.contains("feature_names")) plan.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        for (const auto& c : j.at("cells")) {
            CellSpec cell;
            cell.feature = c.at("feature").get<std::size_t>();
            cell.x = c.at("x").get<int>();
            cell.y = c.at("y").get<int>();
            cell.width = c.at("width").get<int>();
            cell.height = c.at("height").get<int>();
            cell.font_size = c.at("font_size").get<int>();
            cell.lines = c.value("lines", 1);
            cell.sew = c.value("sew", false);
            plan.cells.push_back(cell);
        }
        if (j.contains("grid")) {
            plan.grid_rows = j["grid"].at("rows").get<int>();
            plan.grid_cols = j["grid"].at("cols").get<int>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("malformed plan document: {}", e.what()));
    }
    plan.canvas.validate();
    return plan;
}

std::string serialize_plan(const LayoutPlan& plan) { return plan_to_json(plan).dump(2) + "\n"; }

LayoutPlan parse_plan(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("plan is not valid JSON: {}", e.what()));
    }
    return plan_from_json(j);
}

}  // namespace supertml
