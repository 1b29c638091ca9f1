#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "dzp/errors.hpp"
#include "dzp/rng.hpp"
#include "dzp/zigzag.hpp"
#include "test_helpers.hpp"

using namespace dzp;

namespace {

using testutil::from_tops;

ZigzagFiltration three_step(const SimplicialComplex& c1, const SimplicialComplex& u,
                            const SimplicialComplex& c2) {
    ZigzagFiltration f;
    f.complexes = {c1, u, c2};
    f.complexes[0].label_x2 = 2;
    f.complexes[1].label_x2 = 3;
    f.complexes[2].label_x2 = 4;
    f.arrows = {ArrowDir::forward, ArrowDir::backward};
    f.built_max_dim = 2;
    validate_filtration(f);
    return f;
}

void check_betti_consistency(const ZigzagFiltration& f, int max_hom_dim) {
    auto diagram = compute_zigzag_diagram(f, max_hom_dim);
    for (std::size_t p = 1; p <= f.complexes.size(); ++p) {
        auto betti = betti_numbers(f.complexes[p - 1], max_hom_dim);
        for (int k = 0; k <= max_hom_dim; ++k)
            CHECK_MESSAGE(intervals_covering(diagram, k, static_cast<int>(p)) == betti[k],
                          "position " << p << " dim " << k);
    }
}

}  // namespace

TEST_CASE("betti_numbers classical examples") {
    auto hollow = from_tops({{0, 1}, {1, 2}, {0, 2}}, 2);
    CHECK(betti_numbers(hollow, 1) == std::vector<int>{1, 1});
    auto filled = from_tops({{0, 1, 2}}, 2);
    CHECK(betti_numbers(filled, 1) == std::vector<int>{1, 0});
    auto two_edges = from_tops({{0, 1}, {2, 3}}, 2);
    CHECK(betti_numbers(two_edges, 1) == std::vector<int>{2, 0});
    SimplicialComplex empty;
    CHECK(betti_numbers(empty, 1) == std::vector<int>{0, 0});
}

TEST_CASE("worked example: constant single edge over w=2") {
    auto edge = from_tops({{0, 1}}, 2);
    auto f = three_step(edge, edge, edge);
    auto d = compute_zigzag_diagram(f, 1);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0] == Interval{0, 2, 4, true});  // dim 0, [1, 2] open
}

TEST_CASE("worked example: two vertices merge into an edge") {
    auto verts = from_tops({{0}, {1}}, 2);
    auto edge = from_tops({{0, 1}}, 3);
    auto f = three_step(verts, edge, edge);
    auto d = compute_zigzag_diagram(f, 1);
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0] == Interval{0, 2, 3, false});  // [1, 1.5]
    CHECK(d.intervals[1] == Interval{0, 2, 4, true});   // [1, 2] open
}

TEST_CASE("worked example: hollow triangle fills") {
    auto hollow = from_tops({{0, 1}, {1, 2}, {0, 2}}, 2);
    auto filled = from_tops({{0, 1, 2}}, 3);
    auto f = three_step(hollow, filled, filled);
    auto d = compute_zigzag_diagram(f, 1);
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0] == Interval{0, 2, 4, true});   // dim 0, [1, 2] open
    CHECK(d.intervals[1] == Interval{1, 2, 3, false});  // dim 1, [1, 1.5]
}

TEST_CASE("features born at the union carry half-integer births") {
    auto a = from_tops({{0}}, 2);
    auto ab = from_tops({{0}, {1}}, 3);
    auto f = three_step(a, ab, ab);
    auto d = compute_zigzag_diagram(f, 1);
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0] == Interval{0, 2, 4, true});  // [1, 2] open
    CHECK(d.intervals[1] == Interval{0, 3, 4, true});  // [1.5, 2] open: odd birth_x2
}

TEST_CASE("constant-module identity over w=3") {
    auto hollow = from_tops({{0, 1}, {1, 2}, {0, 2}}, 2);
    ZigzagFiltration f;
    for (int i = 0; i < 5; ++i) {
        f.complexes.push_back(hollow);
        f.complexes.back().label_x2 = i + 2;
    }
    f.arrows = {ArrowDir::forward, ArrowDir::backward, ArrowDir::forward, ArrowDir::backward};
    f.built_max_dim = 2;
    validate_filtration(f);
    auto d = compute_zigzag_diagram(f, 1);
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0] == Interval{0, 2, 6, true});
    CHECK(d.intervals[1] == Interval{1, 2, 6, true});
}

TEST_CASE("single complex window (w=1)") {
    auto s = make_snapshot(1, {{0, 1}, {1, 2}});
    auto f = assemble_zigzag(make_window({s}), Backend::dowker, 1, 1, 2);
    CHECK(f.complexes.size() == 1);
    CHECK(f.arrows.empty());
    auto d = compute_zigzag_diagram(f, 1);
    auto betti = betti_numbers(f.complexes[0], 1);
    CHECK(intervals_covering(d, 0, 1) == betti[0]);
    for (const auto& iv : d.intervals) {
        CHECK(iv.birth_x2 == 2);
        CHECK(iv.death_x2 == 2);
        CHECK(iv.open);
    }
}

TEST_CASE("compute_zigzag_diagram checks built_max_dim") {
    auto edge = from_tops({{0, 1}}, 2);
    ZigzagFiltration f;
    f.complexes = {edge};
    f.built_max_dim = 1;
    CHECK_THROWS_AS(compute_zigzag_diagram(f, 1), ValidationError);
    CHECK_NOTHROW(compute_zigzag_diagram(f, 0));
}

TEST_CASE("validate_filtration rejects broken sequences") {
    auto edge = from_tops({{0, 1}}, 2);
    auto verts = from_tops({{0}, {1}}, 3);

    ZigzagFiltration not_incl;
    not_incl.complexes = {edge, verts, edge};
    not_incl.arrows = {ArrowDir::forward, ArrowDir::backward};
    not_incl.built_max_dim = 2;
    CHECK_THROWS_AS(validate_filtration(not_incl), InternalError);
    try {
        validate_filtration(not_incl);
    } catch (const InternalError& e) {
        CHECK(std::string(e.what()).find("1.5") != std::string::npos);
    }

    ZigzagFiltration even;
    even.complexes = {edge, edge};
    even.arrows = {ArrowDir::forward};
    even.built_max_dim = 2;
    CHECK_THROWS_AS(validate_filtration(even), InternalError);

    ZigzagFiltration wrong_dir;
    wrong_dir.complexes = {edge, edge, edge};
    wrong_dir.arrows = {ArrowDir::backward, ArrowDir::forward};
    wrong_dir.built_max_dim = 2;
    CHECK_THROWS_AS(validate_filtration(wrong_dir), InternalError);
}

TEST_CASE("assemble_zigzag shape and labels for w=3") {
    SplitMix64 rng(9);
    auto window = testutil::random_window(3, 8, 0.25, 0.15, rng);
    for (auto backend : {Backend::dowker, Backend::vr}) {
        auto f = assemble_zigzag(window, backend, 1, 1, 2);
        REQUIRE(f.complexes.size() == 5);
        REQUIRE(f.arrows.size() == 4);
        for (int i = 0; i < 5; ++i) CHECK(f.complexes[i].label_x2 == i + 2);
        CHECK(f.arrows[0] == ArrowDir::forward);
        CHECK(f.arrows[1] == ArrowDir::backward);
        CHECK(f.arrows[2] == ArrowDir::forward);
        CHECK(f.arrows[3] == ArrowDir::backward);
    }
}

TEST_CASE("assemble_zigzag on identical snapshots gives a constant sequence") {
    auto s1 = make_snapshot(1, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    auto s2 = s1;
    s2.index = 2;
    for (auto backend : {Backend::dowker, Backend::vr}) {
        auto f = assemble_zigzag(make_window({s1, s2}), backend, 1, 1, 2);
        REQUIRE(f.complexes.size() == 3);
        CHECK(f.complexes[0] == f.complexes[1]);
        CHECK(f.complexes[1] == f.complexes[2]);
    }
}

TEST_CASE("diagram intervals are sorted and within range") {
    SplitMix64 rng(77);
    auto window = testutil::random_window(4, 9, 0.3, 0.2, rng);
    auto f = assemble_zigzag(window, Backend::dowker, 1, 1, 2);
    auto d = compute_zigzag_diagram(f, 1);
    CHECK(std::is_sorted(d.intervals.begin(), d.intervals.end()));
    const int m = static_cast<int>(f.complexes.size());
    for (const auto& iv : d.intervals) {
        CHECK(iv.birth_x2 >= 2);
        CHECK(iv.birth_x2 <= m + 1);
        CHECK(iv.death_x2 >= iv.birth_x2);
        CHECK(iv.death_x2 <= m + 1);
        if (iv.open) CHECK(iv.death_x2 == m + 1);
    }
}

TEST_CASE("betti consistency across random windows, both backends") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 15; ++trial) {
        int w = 2 + static_cast<int>(rng.below(3));
        int n = 5 + static_cast<int>(rng.below(6));
        auto window = testutil::random_window(w, n, 0.25, 0.2, rng);
        for (auto backend : {Backend::dowker, Backend::vr}) {
            auto f = assemble_zigzag(window, backend, 1, 1, 2);
            check_betti_consistency(f, 1);
        }
    }
}
