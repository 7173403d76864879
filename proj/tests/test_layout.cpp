#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "supertml/error.hpp"
#include "supertml/font.hpp"
#include "supertml/format.hpp"
#include "supertml/importance.hpp"
#include "supertml/ingest.hpp"
#include "supertml/layout.hpp"

using namespace supertml;

namespace {

const std::string kData = SUPERTML_TEST_DATA_DIR;

std::vector<std::size_t> random_budgets(std::mt19937_64& rng, std::size_t n, std::size_t max_chars) {
    std::uniform_int_distribution<std::size_t> len(1, max_chars);
    std::vector<std::size_t> out(n);
    for (auto& b : out) b = len(rng);
    return out;
}

std::size_t count_kind(const std::vector<Violation>& v, Violation::Kind kind) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; }));
}

int assignment_index(const std::vector<int>& tiers, int font) {
    return static_cast<int>(std::find(tiers.begin(), tiers.end(), font) - tiers.begin());
}

}  // namespace

TEST_SUITE("layout") {

TEST_CASE("canvas defaults scale the margin with the side") {
    CHECK(CanvasSpec::for_side(224).margin == 2);
    CHECK(CanvasSpec::for_side(331).margin == 3);
    CHECK(CanvasSpec::for_side(56).margin == 1);
    CHECK_THROWS_AS((CanvasSpec{10, 5, 255, 0}).validate(), DataError);
}

TEST_CASE("one feature spans the canvas minus margins") {
    const std::vector<std::size_t> budget{3};
    const LayoutPlan plan = plan_equal_font(1, budget, CanvasSpec{});
    REQUIRE(plan.cells.size() == 1);
    const CellSpec& c = plan.cells[0];
    CHECK(c.x == 2);
    CHECK(c.y == 2);
    CHECK(c.width == 220);
    CHECK(c.height == 220);
    CHECK(plan.grid_rows == 1);
    CHECK(plan.grid_cols == 1);
    CHECK(validate_plan(plan).empty());
}

TEST_CASE("four modest features take one quadrant each") {
    const std::vector<std::size_t> budget{3, 2, 3, 2};
    const LayoutPlan plan = plan_equal_font(4, budget, CanvasSpec{});
    CHECK(plan.grid_rows == 2);
    CHECK(plan.grid_cols == 2);
    CHECK(validate_plan(plan).empty());
    // row-major quadrants: top left, top right, bottom left, bottom right
    CHECK(plan.cells[0].x < plan.cells[1].x);
    CHECK(plan.cells[0].y == plan.cells[1].y);
    CHECK(plan.cells[2].y > plan.cells[0].y);
    CHECK(plan.cells[3].x == plan.cells[1].x);
    CHECK(plan.cells[3].y == plan.cells[2].y);
    for (const auto& c : plan.cells) CHECK(c.font_size == plan.cells[0].font_size);
    CHECK(validate_plan(plan_equal_font(4, std::vector<std::size_t>{4, 2, 7, 2}, CanvasSpec{})).empty());
}

TEST_CASE("the quadrant numerals of a four-feature plan fit at the chosen font") {
    const std::vector<std::size_t> budget{3, 3, 3, 3};  // "6.0", "2.2", ...
    const LayoutPlan plan = plan_equal_font(4, budget, CanvasSpec{});
    CHECK(plan.grid_rows == 2);
    CHECK(plan.grid_cols == 2);
    const auto best = oracle::best_uniform_font(budget, 224, 2, {});
    CHECK(plan.cells[0].font_size == best.font);
}

TEST_CASE("thirty features get a uniform font no grid can beat") {
    std::vector<std::size_t> budget;
    for (int i = 0; i < 30; ++i) budget.push_back(static_cast<std::size_t>(i % 4 == 0 ? 9 : 8));
    const LayoutPlan plan = plan_equal_font(30, budget, CanvasSpec{});
    const auto best = oracle::best_uniform_font(budget, 224, 2, {});
    REQUIRE(best.font > 0);
    for (const auto& c : plan.cells) CHECK(c.font_size == best.font);
    CHECK(validate_plan(plan).empty());
    for (int r = 1; r <= 30; ++r)
        for (int c = 1; c <= 30; ++c)
            if (r * c >= 30) CHECK_FALSE(oracle::grid_fits(best.font + 1, r, c, budget, 224, 2, {}));
}

TEST_CASE("equal font matches the grid oracle on random instances") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> n_dist(1, 24), side_dist(64, 400), len_dist(1, 14), coin(0, 3);
    int compared = 0;
    for (int t = 0; t < 300; ++t) {
        const auto n = static_cast<std::size_t>(n_dist(rng));
        const CanvasSpec canvas = CanvasSpec::for_side(side_dist(rng));
        const auto budget = random_budgets(rng, n, static_cast<std::size_t>(len_dist(rng)));
        std::set<std::size_t> sew;
        for (std::size_t i = 0; i < n; ++i)
            if (coin(rng) == 0) sew.insert(i);
        const auto best = oracle::best_uniform_font(budget, canvas.side, canvas.margin, sew);
        if (best.font == 0) {
            CHECK_THROWS_AS(plan_equal_font(n, budget, canvas, sew), InfeasibleLayout);
            continue;
        }
        const LayoutPlan plan = plan_equal_font(n, budget, canvas, sew);
        CHECK(plan.cells[0].font_size == best.font);
        CHECK(validate_plan(plan).empty());
        ++compared;
    }
    CHECK(compared > 200);
}

TEST_CASE("equal font tie-break prefers square grids, then fewer rows") {
    // Two features of one char: 1x2 and 2x1 tie on font, 1x2 has fewer rows.
    const std::vector<std::size_t> budget{1, 1};
    const LayoutPlan plan = plan_equal_font(2, budget, CanvasSpec{});
    const auto best = oracle::best_uniform_font(budget, 224, 2, {});
    CHECK(plan.cells[0].font_size == best.font);
    if (oracle::grid_fits(best.font, 1, 2, budget, 224, 2, {}) && oracle::grid_fits(best.font, 2, 1, budget, 224, 2, {})) {
        CHECK(plan.grid_rows == 1);
        CHECK(plan.grid_cols == 2);
    }
}

TEST_CASE("an unplaceable feature is named in the infeasibility error") {
    std::vector<std::size_t> budget{2, 2, 60};
    try {
        plan_equal_font(3, budget, CanvasSpec{});
        FAIL("expected InfeasibleLayout");
    } catch (const InfeasibleLayout& e) {
        CHECK(std::string(e.what()).find("feature 2") != std::string::npos);
    }
}

TEST_CASE("squared-word cells are square") {
    const std::vector<std::size_t> budget{3, 7, 4};
    const LayoutPlan plan = plan_equal_font(3, budget, CanvasSpec{}, {1});
    CHECK(plan.cells[1].sew);
    CHECK(plan.cells[1].width == plan.cells[1].height);
    CHECK(validate_plan(plan).empty());
}

TEST_CASE("sew arity is the ceiling square root") {
    CHECK(sew_grid_arity(1) == 1);
    CHECK(sew_grid_arity(4) == 2);
    CHECK(sew_grid_arity(5) == 3);
    CHECK(sew_grid_arity(7) == 3);
    CHECK(sew_grid_arity(9) == 3);
    CHECK(sew_grid_arity(10) == 4);
    CHECK(sew_grid_arity(25) == 5);
}

TEST_CASE("validate_plan flags coincident cells once") {
    LayoutPlan plan = plan_equal_font(2, std::vector<std::size_t>{2, 2}, CanvasSpec{});
    plan.cells[1].x = plan.cells[0].x;
    plan.cells[1].y = plan.cells[0].y;
    const auto v = validate_plan(plan);
    CHECK(count_kind(v, Violation::Kind::Overlap) == 1);
    CHECK(count_kind(v, Violation::Kind::OutOfBounds) == 0);
}

TEST_CASE("validate_plan flags a cell past the canvas edge once") {
    LayoutPlan plan = plan_equal_font(2, std::vector<std::size_t>{2, 2}, CanvasSpec{});
    plan.cells[1].x = 224 - plan.cells[1].width + 5;
    const auto v = validate_plan(plan);
    CHECK(count_kind(v, Violation::Kind::OutOfBounds) == 1);
    CHECK(count_kind(v, Violation::Kind::Overlap) == 0);
}

TEST_CASE("validate_plan flags cells closer than the margin") {
    LayoutPlan plan = plan_equal_font(2, std::vector<std::size_t>{2, 2}, CanvasSpec{});
    plan.cells[0] = CellSpec{0, 2, 2, 100, 100, 12};
    plan.cells[1] = CellSpec{1, 103, 2, 100, 100, 12};  // 1 px apart, margin is 2
    const auto v = validate_plan(plan);
    CHECK(count_kind(v, Violation::Kind::MarginBreach) == 1);
    CHECK(count_kind(v, Violation::Kind::Overlap) == 0);
}

TEST_CASE("validate_plan flags text that cannot fit and illegible fonts") {
    LayoutPlan plan = plan_equal_font(1, std::vector<std::size_t>{4}, CanvasSpec{});
    plan.char_budget[0] = 400;
    CHECK(count_kind(validate_plan(plan), Violation::Kind::TextOverflow) == 1);
    plan.char_budget[0] = 4;
    plan.cells[0].font_size = 5;
    CHECK(count_kind(validate_plan(plan), Violation::Kind::FontTooSmall) == 1);
}

TEST_CASE("default tiers") {
    CHECK(default_font_tiers(224) == std::vector<int>{48, 32, 24, 16, 12, 8});
    const auto big = default_font_tiers(331);
    CHECK(big.front() == 71);
    CHECK(std::is_sorted(big.rbegin(), big.rend()));
    for (int t : default_font_tiers(64)) CHECK(t >= GlyphFont::kMinLegibleSize);
}

TEST_CASE("tier groups follow cumulative mass") {
    const std::vector<double> imp{3, 1, 2};
    const auto g = assign_tier_groups(imp, 6);
    CHECK(g[0] == 0);
    CHECK(g[2] == 3);
    CHECK(g[1] == 5);
    const std::vector<double> flat{1, 1, 1, 1};
    for (auto x : assign_tier_groups(flat, 6)) CHECK(x == 0);
}

TEST_CASE("importances [3,1,2] order the fonts 0 >= 2 >= 1") {
    const std::vector<double> imp{3, 1, 2};
    const std::vector<std::size_t> budget{3, 3, 3};
    const auto tiers = default_font_tiers(224);
    const LayoutPlan plan = plan_variant_font(imp, budget, CanvasSpec{}, tiers);
    CHECK(validate_plan(plan).empty());
    // Every assignment of tiers that respects the importance ranking.
    std::set<std::vector<int>> admissible;
    for (int a : tiers)
        for (int b : tiers)
            for (int c : tiers)
                if (a >= c && c >= b) admissible.insert({a, b, c});
    const std::vector<int> got{plan.cells[0].font_size, plan.cells[1].font_size, plan.cells[2].font_size};
    CHECK(admissible.count(got) == 1);
    CHECK(got == std::vector<int>{48, 8, 16});
    CHECK(assignment_index(tiers, got[0]) <= assignment_index(tiers, got[2]));
}

TEST_CASE("equal importances give a uniform font") {
    const std::vector<double> imp(5, 0.2);
    const std::vector<std::size_t> budget{3, 4, 3, 5, 2};
    const LayoutPlan plan = plan_variant_font(imp, budget, CanvasSpec{}, default_font_tiers());
    for (const auto& c : plan.cells) CHECK(c.font_size == plan.cells[0].font_size);
    CHECK(validate_plan(plan).empty());
}

TEST_CASE("wine: color intensity gets 48, nonflavanoid phenols 8") {
    const RawTable table = read_table(kData + "/wine.csv", {});
    const TabularSchema schema = infer_schema(table.rows, 0, default_missing_tokens(), table.header);
    const auto samples = parse_records(table, schema);
    const auto importance = load_importance(kData + "/wine_importance.json", schema);
    const auto budgets = compute_char_budgets(samples, schema, FormatOptions{});
    const LayoutPlan plan =
        plan_variant_font(importance.scores, budgets.budgets, CanvasSpec{}, default_font_tiers());
    CHECK(validate_plan(plan).empty());
    const auto names = schema.feature_names();
    auto font_of = [&](const std::string& name) {
        const auto f = static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
        return plan.cells.at(f).font_size;
    };
    CHECK(font_of("color_intensity") == 48);
    CHECK(font_of("nonflavanoid_phenols") == 8);
    int largest = 0;
    for (const auto& c : plan.cells) largest = std::max(largest, c.font_size);
    CHECK(font_of("color_intensity") == largest);
}

TEST_CASE("variant font respects importance rank on random inputs") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> n_dist(1, 20);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const auto n = static_cast<std::size_t>(n_dist(rng));
        std::vector<double> imp(n);
        for (auto& s : imp) s = score(rng);
        const auto budget = random_budgets(rng, n, 8);
        LayoutPlan plan;
        try {
            plan = plan_variant_font(imp, budget, CanvasSpec{}, default_font_tiers());
        } catch (const InfeasibleLayout&) {
            continue;
        }
        CHECK(validate_plan(plan).empty());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (imp[i] > imp[j]) CHECK(plan.cells[i].font_size >= plan.cells[j].font_size);
    }
}

TEST_CASE("variant font rejects bad importances and tiers") {
    const std::vector<std::size_t> budget{2, 2};
    CHECK_THROWS_AS(plan_variant_font(std::vector<double>{1, NAN}, budget, CanvasSpec{}, default_font_tiers()),
                    DataError);
    CHECK_THROWS_AS(plan_variant_font(std::vector<double>{1, -1}, budget, CanvasSpec{}, default_font_tiers()),
                    DataError);
    CHECK_THROWS_AS(plan_variant_font(std::vector<double>{1, 2}, budget, CanvasSpec{}, std::vector<int>{8, 16}),
                    DataError);
}

TEST_CASE("positive rescaling of importances leaves the plan unchanged") {
    const std::vector<double> imp{0.4, 0.1, 0.3, 0.05, 0.15};
    std::vector<double> scaled;
    for (double s : imp) scaled.push_back(s * 37.5);
    const std::vector<std::size_t> budget{4, 3, 6, 2, 5};
    CHECK(serialize_plan(plan_variant_font(imp, budget, CanvasSpec{}, default_font_tiers())) ==
          serialize_plan(plan_variant_font(scaled, budget, CanvasSpec{}, default_font_tiers())));
}

TEST_CASE("planning is deterministic") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 20; ++t) {
        const auto budget = random_budgets(rng, 9, 7);
        std::vector<double> imp(9);
        for (auto& s : imp) s = std::uniform_real_distribution<double>(0, 1)(rng);
        CHECK(serialize_plan(plan_equal_font(9, budget, CanvasSpec{})) ==
              serialize_plan(plan_equal_font(9, budget, CanvasSpec{})));
        CHECK(serialize_plan(plan_variant_font(imp, budget, CanvasSpec{}, default_font_tiers())) ==
              serialize_plan(plan_variant_font(imp, budget, CanvasSpec{}, default_font_tiers())));
    }
}

TEST_CASE("plans survive a JSON round trip") {
    const std::vector<std::size_t> budget{4, 7, 3};
    for (const LayoutPlan& plan : {plan_equal_font(3, budget, CanvasSpec{}, {1}),
                                   plan_variant_font(std::vector<double>{1, 2, 3}, budget, CanvasSpec{},
                                                     default_font_tiers())}) {
        const std::string text = serialize_plan(plan);
        CHECK(parse_plan(text) == plan);
        CHECK(serialize_plan(parse_plan(text)) == text);
    }
    CHECK_THROWS_AS(parse_plan("{\"canvas\": 3}"), DataError);
    CHECK_THROWS_AS(parse_plan("not json"), DataError);
}

TEST_CASE("replanning at 331 keeps equal-font cells where the 224 plan had them") {
    std::mt19937_64 rng(3);
    int compared = 0;
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 16)(rng));
        const auto budget = random_budgets(rng, n, 6);
        LayoutPlan small;
        try {
            small = plan_equal_font(n, budget, CanvasSpec::for_side(224));
        } catch (const InfeasibleLayout&) {
            continue;
        }
        const LayoutPlan large = plan_equal_font(n, budget, CanvasSpec::for_side(331));
        if (large.grid_rows != small.grid_rows || large.grid_cols != small.grid_cols) continue;
        ++compared;
        // Each plan may be off by one pixel of rounding at its own scale.
        const double s = 331.0 / 224.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(small.cells[i].x * s - large.cells[i].x) <= 1.0 + s);
            CHECK(std::abs(small.cells[i].y * s - large.cells[i].y) <= 1.0 + s);
        }
    }
    CHECK(compared > 50);
}

TEST_CASE("replanning wine at 331 keeps tiers and the arrangement of cells") {
    const RawTable table = read_table(kData + "/wine.csv", {});
    const TabularSchema schema = infer_schema(table.rows, 0, default_missing_tokens(), table.header);
    const auto samples = parse_records(table, schema);
    const auto importance = load_importance(kData + "/wine_importance.json", schema);
    const auto budgets = compute_char_budgets(samples, schema, FormatOptions{});
    const auto small_tiers = default_font_tiers(224), large_tiers = default_font_tiers(331);
    const LayoutPlan small = plan_variant_font(importance.scores, budgets.budgets, CanvasSpec::for_side(224), small_tiers);
    const LayoutPlan large = plan_variant_font(importance.scores, budgets.budgets, CanvasSpec::for_side(331), large_tiers);
    CHECK(validate_plan(large).empty());
    for (std::size_t i = 0; i < small.cells.size(); ++i) {
        CHECK(assignment_index(small_tiers, small.cells[i].font_size) ==
              assignment_index(large_tiers, large.cells[i].font_size));
        for (std::size_t j = 0; j < small.cells.size(); ++j) {
            CHECK((small.cells[i].right() <= small.cells[j].x) == (large.cells[i].right() <= large.cells[j].x));
            CHECK((small.cells[i].bottom() <= small.cells[j].y) == (large.cells[i].bottom() <= large.cells[j].y));
        }
    }
}

TEST_CASE("rescaling a plan keeps every cell within a pixel of its scaled position") {
    const std::vector<std::size_t> budget{4, 3, 6, 2, 5, 3, 3};
    const std::vector<double> imp{0.3, 0.1, 0.2, 0.05, 0.15, 0.1, 0.1};
    for (const LayoutPlan& plan : {plan_equal_font(7, budget, CanvasSpec{}),
                                   plan_variant_font(imp, budget, CanvasSpec{}, default_font_tiers())}) {
        const LayoutPlan big = scale_plan(plan, 331);
        CHECK(big.canvas.side == 331);
        CHECK(validate_plan(big).empty());
        const double s = 331.0 / 224.0;
        for (std::size_t i = 0; i < plan.cells.size(); ++i) {
            CHECK(std::abs(plan.cells[i].x * s - big.cells[i].x) <= 1.0);
            CHECK(std::abs(plan.cells[i].y * s - big.cells[i].y) <= 1.0);
            CHECK(std::abs(plan.cells[i].right() * s - big.cells[i].right()) <= 1.0);
            CHECK(std::abs(plan.cells[i].bottom() * s - big.cells[i].bottom()) <= 1.0);
        }
        const LayoutPlan back = scale_plan(big, 224);
        CHECK(validate_plan(back).empty());
    }
}

}  // TEST_SUITE
