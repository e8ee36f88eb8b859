#include "alspia/chebyshev.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "oracles.hpp"

using namespace alspia;
using std::numbers::pi;

TEST_CASE("cheb_eval matches known values", "[chebyshev]") {
    CHECK(cheb_eval(0, 0.3) == 1.0);
    CHECK(cheb_eval(4, 0.0) == Catch::Approx(1.0).margin(1e-15));
    CHECK(cheb_eval(3, 0.5) == Catch::Approx(-1.0).margin(1e-15));
    CHECK_THROWS_AS(cheb_eval(-1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cheb_eval(2, std::nan("")), std::invalid_argument);
}

TEST_CASE("cheb_eval agrees with cos(k arccos x) on [-1,1]", "[chebyshev]") {
    for (int k = 0; k <= 50; ++k) {
        for (int s = 0; s < 200; ++s) {
            const double x = -1.0 + 2.0 * s / 199.0;
            const double ref = std::cos(k * std::acos(x));
            CHECK(std::abs(cheb_eval(k, x) - ref) <= 1e-12);
        }
    }
}

TEST_CASE("cheb_eval bounded by 1 on [-1,1] and equals 1 at x=1", "[chebyshev]") {
    for (int k = 0; k <= 50; ++k) {
        CHECK(cheb_eval(k, 1.0) == Catch::Approx(1.0).margin(1e-12));
        for (int s = 0; s < 200; ++s) {
            const double x = -1.0 + 2.0 * s / 199.0;
            CHECK(std::abs(cheb_eval(k, x)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("cheb_eval matches the closed form for |x| >= 1", "[chebyshev]") {
    for (int k = 0; k <= 30; ++k) {
        for (double x : {1.0, 1.01, 1.5, 2.0, 3.7, -1.0, -1.2, -2.5}) {
            const double s = x + std::copysign(std::sqrt(x * x - 1.0), x);
            const double ref = 0.5 * (std::pow(s, k) + std::pow(s, -k));
            const double got = cheb_eval(k, x);
            CHECK(std::abs(got - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST_CASE("cheb_zeros returns the cosine grid in index order", "[chebyshev]") {
    CHECK_THROWS_AS(cheb_zeros(0), std::invalid_argument);

    const auto z1 = cheb_zeros(1);
    REQUIRE(z1.size() == 1);
    CHECK(std::abs(z1[0]) <= 1e-12);

    const auto z2 = cheb_zeros(2);
    REQUIRE(z2.size() == 2);
    CHECK(z2[0] == Catch::Approx(std::sqrt(2.0) / 2.0).margin(1e-12));
    CHECK(z2[1] == Catch::Approx(-std::sqrt(2.0) / 2.0).margin(1e-12));

    const auto z3 = cheb_zeros(3);
    REQUIRE(z3.size() == 3);
    CHECK(z3[0] == Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-12));
    CHECK(std::abs(z3[1]) <= 1e-12);
    CHECK(z3[2] == Catch::Approx(-std::sqrt(3.0) / 2.0).margin(1e-12));
}

TEST_CASE("cheb_eval vanishes at cheb_zeros", "[chebyshev]") {
    for (int k = 1; k <= 50; ++k)
        for (double z : cheb_zeros(k)) CHECK(std::abs(cheb_eval(k, z)) <= 1e-10);
}

TEST_CASE("schedule_nonsingular values", "[chebyshev]") {
    SECTION("k=1 gives the single optimal step 2/(v+u)") {
        const auto s = schedule_nonsingular({1.0, 4.0}, 1);
        REQUIRE(s.steps.size() == 1);
        CHECK(s.steps[0] == Catch::Approx(0.4).margin(1e-12));
        CHECK(s.kind == ScheduleKind::Nonsingular);
    }
    SECTION("k=2 steps are reciprocals of the mapped Chebyshev roots") {
        const auto s = schedule_nonsingular({1.0, 4.0}, 2);
        REQUIRE(s.steps.size() == 2);
        // Frozen from 2/((v+u) + (v-u) cos((2l+1)pi/4)) at u=1, v=4.
        CHECK(s.steps[0] == Catch::Approx(0.2808467957502788).epsilon(1e-12));
        CHECK(s.steps[1] == Catch::Approx(0.6947629603472821).epsilon(1e-12));
        for (double w : s.steps) {
            CHECK(w > 1.0 / 4.0);
            CHECK(w < 1.0 / 1.0);
        }
    }
    SECTION("degenerate spectrum collapses to constant 1/v") {
        const auto s = schedule_nonsingular({3.0, 3.0}, 2);
        REQUIRE(s.steps.size() == 2);
        CHECK(s.steps[0] == Catch::Approx(1.0 / 3.0).margin(1e-15));
        CHECK(s.steps[1] == Catch::Approx(1.0 / 3.0).margin(1e-15));
        CHECK(s.kind == ScheduleKind::Constant);
    }
    CHECK_THROWS_AS(schedule_nonsingular({0.0, 4.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(schedule_nonsingular({1.0, 4.0}, 0), std::invalid_argument);
}

TEST_CASE("schedule_singular values", "[chebyshev]") {
    SECTION("v=1, k=1") {
        const auto s = schedule_singular(1.0, 1);
        REQUIRE(s.steps.size() == 1);
        // (1 - cos(3pi/4)) / (cos(pi/4) - cos(3pi/4)) = (1 + sqrt(2)/2)/sqrt(2)
        CHECK(s.steps[0] == Catch::Approx(1.2071067811865475).epsilon(1e-12));
        CHECK(s.kind == ScheduleKind::Singular);
    }
    SECTION("v=1, k=2") {
        const auto s = schedule_singular(1.0, 2);
        REQUIRE(s.steps.size() == 2);
        CHECK(s.steps[0] == Catch::Approx(1.0773502691896257).epsilon(1e-12));
        CHECK(s.steps[1] == Catch::Approx(2.1547005383792515).epsilon(1e-12));
    }
    SECTION("steps scale as 1/v") {
        const auto s = schedule_singular(2.0, 2);
        REQUIRE(s.steps.size() == 2);
        CHECK(s.steps[0] == Catch::Approx(0.5386751345948129).epsilon(1e-12));
        CHECK(s.steps[1] == Catch::Approx(1.0773502691896257).epsilon(1e-12));
    }
    SECTION("all steps positive and finite for a range of k") {
        for (int k = 1; k <= 40; ++k)
            for (double w : schedule_singular(2.5, k).steps) {
                CHECK(w > 0.0);
                CHECK(std::isfinite(w));
            }
    }
    CHECK_THROWS_AS(schedule_singular(0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(schedule_singular(1.0, 0), std::invalid_argument);
}

TEST_CASE("rate_bound values", "[chebyshev]") {
    CHECK(rate_bound({1.0, 4.0}, 8, ScheduleKind::Nonsingular) ==
          Catch::Approx(2.0 * std::pow(1.0 / 3.0, 8)).epsilon(1e-12));
    CHECK(rate_bound({1.0, 4.0}, 8, ScheduleKind::Nonsingular) ==
          Catch::Approx(3.0483e-4).epsilon(1e-3));
    CHECK(rate_bound({0.0, 1.0}, 9, ScheduleKind::Singular) ==
          Catch::Approx(pi / 200.0).epsilon(1e-12));
    CHECK(rate_bound({3.0, 3.0}, 5, ScheduleKind::Nonsingular) == 0.0);
    CHECK_THROWS_AS(rate_bound({0.0, 4.0}, 3, ScheduleKind::Nonsingular), std::invalid_argument);
    CHECK_THROWS_AS(rate_bound({1.0, 4.0}, 3, ScheduleKind::Singular), std::invalid_argument);
}

TEST_CASE("nonsingular residual polynomial stays under the rate bound", "[chebyshev]") {
    for (auto [u, v, k] : {std::tuple{1.0, 4.0, 4}, {1.0, 4.0, 9}, {0.3, 7.5, 6}, {2.0, 2.5, 3}}) {
        const auto s = schedule_nonsingular({u, v}, k);
        CHECK(oracles::residual_poly(s.steps, 0.0) == Catch::Approx(1.0).margin(1e-14));
        const double bound = rate_bound({u, v}, k, ScheduleKind::Nonsingular);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const double lam = u + (v - u) * t / 999.0;
            worst = std::max(worst, std::abs(oracles::residual_poly(s.steps, lam)));
        }
        CHECK(worst <= bound + 1e-10);
    }
}

TEST_CASE("singular residual polynomial: q(0)=0, q'(0)=1, bounded", "[chebyshev]") {
    for (auto [v, k] : {std::tuple{1.0, 5}, {1.0, 9}, {2.5, 7}, {0.5, 16}}) {
        const auto s = schedule_singular(v, k);
        auto q = [&](double lam) { return lam * oracles::residual_poly(s.steps, lam); };
        CHECK(q(0.0) == 0.0);
        // q'(0) by central finite differences at step 1e-7.
        const double h = 1e-7;
        const double dq0 = (q(h) - q(-h)) / (2.0 * h);
        CHECK(dq0 == Catch::Approx(1.0).epsilon(1e-5));

        const double bound = rate_bound({0.0, v}, k, ScheduleKind::Singular);
        double worst = 0.0;
        for (int t = 0; t <= 2000; ++t) {
            const double lam = v * t / 2000.0;
            worst = std::max(worst, std::abs(q(lam)));
        }
        CHECK(worst <= bound + 1e-10);
    }
}

TEST_CASE("default cycle selection", "[chebyshev]") {
    // Inverting the rate bound for a 1e-6 per-cycle target, clamped to [4,64].
    CHECK(default_cycle_nonsingular({1.0, 4.0}) ==
          static_cast<int>(std::ceil(std::log(2e6) / std::log(3.0))));
    CHECK(default_cycle_nonsingular({1.0, 1.0}) == kMinCycle);
    CHECK(default_cycle_nonsingular({1e-9, 1.0}) == kMaxCycle);
}
