#include "alspia/datasets.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "oracles.hpp"

using namespace alspia;
using std::numbers::pi;

TEST_CASE("example generators hit the stated sample values", "[datasets]") {
    SECTION("helix starts at (10, 0, 0)") {
        const auto g = gen_example(4, 10);
        REQUIRE(g.points.size() == 11);
        CHECK(g.points.coord(0, 0) == 10.0);
        CHECK(g.points.coord(1, 0) == 0.0);
        CHECK(g.points.coord(2, 0) == 0.0);
    }
    SECTION("blob curve at theta = 0") {
        const auto g = gen_example(1, 16);
        const double r = 2.0 + 5.0 * std::cos(pi / 4.0);
        CHECK(g.points.coord(0, 0) == Catch::Approx(r).margin(1e-12));
        CHECK(g.points.coord(0, 0) == Catch::Approx(5.53553).margin(1e-5));
        CHECK(g.points.coord(1, 0) == 0.0);
    }
    SECTION("peaks surface at the origin") {
        const auto g = gen_example(6, 6, 8);
        REQUIRE(g.surface);
        REQUIRE(g.grid.rows == 7);
        REQUIRE(g.grid.cols == 9);
        // theta1 = theta2 = 0 lands at grid (3, 4); z = (8/3) e^{-1}.
        CHECK(g.grid.at(0, 3, 4) == Catch::Approx(0.0).margin(1e-12));
        CHECK(g.grid.at(1, 3, 4) == Catch::Approx(0.0).margin(1e-12));
        CHECK(g.grid.at(2, 3, 4) == Catch::Approx((8.0 / 3.0) * std::exp(-1.0)).margin(1e-12));
        CHECK(g.grid.at(2, 3, 4) == Catch::Approx(0.98101).margin(1e-5));
    }
    SECTION("domain endpoints are sampled exactly") {
        const auto g2 = gen_example(2, 12);
        // theta = 4 pi at the last sample: x = 2cos(4pi) - cos(12pi) = 1.
        CHECK(g2.points.coord(0, 12) == Catch::Approx(2.0 * std::cos(4.0 * pi) - std::cos(12.0 * pi)).margin(1e-12));
        const auto g3 = gen_example(3, 9);
        CHECK(g3.points.coord(0, 0) == 0.0);
        CHECK(g3.points.coord(0, 9) == Catch::Approx(2.0 * pi).margin(1e-15));
    }
    SECTION("lemniscate surface stays finite everywhere") {
        const auto g = gen_example(5, 24, 24);
        CHECK(g.grid.all_finite());
    }
    SECTION("invalid ids are rejected") {
        CHECK_THROWS_AS(gen_example(0, 10), std::invalid_argument);
        CHECK_THROWS_AS(gen_example(7, 10), std::invalid_argument);
        CHECK_THROWS_AS(gen_example(1, 10, 5), std::invalid_argument);
    }
}

TEST_CASE("generation is deterministic and masking deletes in place", "[datasets]") {
    const auto a = gen_example(1, 50);
    const auto b = gen_example(1, 50);
    for (std::size_t j = 0; j <= 50; ++j) {
        CHECK(a.points.coord(0, j) == b.points.coord(0, j));
        CHECK(a.points.coord(1, j) == b.points.coord(1, j));
    }

    const std::vector<HoleRange> mask = {{10, 14}, {30, 32}};
    const auto masked = gen_example(3, 50, std::nullopt, mask);
    const auto full = gen_example(3, 50);
    const auto rem = masked.remaining_points();
    REQUIRE(rem.size() == 51 - 8);
    std::size_t r = 0;
    for (std::size_t j = 0; j <= 50; ++j) {
        if ((j >= 10 && j <= 14) || (j >= 30 && j <= 32)) continue;
        CHECK(rem.coord(0, r) == full.points.coord(0, j));
        CHECK(rem.coord(1, r) == full.points.coord(1, j));
        ++r;
    }
}

TEST_CASE("mask validation", "[datasets]") {
    CHECK_THROWS_AS(gen_example(3, 20, std::nullopt, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(gen_example(3, 20, std::nullopt, {{5, 20}}), std::invalid_argument);
    CHECK_THROWS_AS(gen_example(3, 20, std::nullopt, {{5, 8}, {7, 10}}), std::invalid_argument);
    CHECK_THROWS_AS(gen_example(5, 20, 20, {{5, 8}}), std::invalid_argument);
}

namespace {

/// The hole fitting pipeline shared with the CLI: chord parameters of the
/// survivors, knots from the hole-filled sequence.
std::pair<CollocationMatrix, int> hole_collocation(int id, std::size_t m, int n,
                                                   const std::vector<HoleRange>& mask) {
    const auto geo = gen_example(id, m, std::nullopt, mask);
    const auto rem = geo.remaining_points();
    const auto params = chord_parameterize(rem);
    const auto full = fill_masked_params(params, mask, m);
    const auto kv = build_knots(full, n);
    auto a = assemble_collocation(kv, params);
    const int n1 = static_cast<int>(a.cols());
    return {std::move(a), n1};
}

}  // namespace

TEST_CASE("singular masks induce rank deficiency at desk scale", "[datasets]") {
    SECTION("example 3, one central hole") {
        const auto mask = singular_mask(3, 1460, 200);
        REQUIRE(mask.size() == 1);
        auto [a, n1] = hole_collocation(3, 1460, 200, mask);
        CHECK(NormalOperator::curve(a).has_empty_column());
        const auto dense = a.to_dense();
        const int rank = oracles::dense_rank(oracles::matmul(oracles::transpose(dense), dense));
        CHECK(rank < n1);
    }
    SECTION("example 4, three holes") {
        const auto mask = singular_mask(4, 1889, 300);
        REQUIRE(mask.size() == 3);
        auto [a, n1] = hole_collocation(4, 1889, 300, mask);
        const auto op = NormalOperator::curve(a);
        CHECK(op.has_empty_column());
        const double v = largest_eigenvalue(op).value;
        CHECK(rank_detect(op, v) == Rank::RankDeficient);
    }
    SECTION("the unmasked control case is full rank") {
        const auto geo = gen_example(3, 1460);
        const auto params = chord_parameterize(geo.points);
        const auto kv = build_knots(params, 200);
        const auto op = NormalOperator::curve(assemble_collocation(kv, params));
        const double v = largest_eigenvalue(op).value;
        CHECK(rank_detect(op, v) == Rank::FullRank);
    }
    SECTION("only examples 3 and 4 take singular masks") {
        CHECK_THROWS_AS(singular_mask(1, 1000, 100), std::invalid_argument);
    }
}
