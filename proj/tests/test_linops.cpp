#include "alspia/linops.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "alspia/datasets.hpp"
#include "oracles.hpp"

using namespace alspia;

namespace {

NormalOperator tiny_surface_op(oracles::TestRng& rng, std::size_t m1, std::size_t p1,
                               std::size_t n1, oracles::Dense* a_out = nullptr,
                               oracles::Dense* by_out = nullptr) {
    oracles::Dense a(m1, std::vector<double>(n1, 0.0));
    oracles::Dense by(p1, std::vector<double>(n1, 0.0));
    for (auto& row : a)
        for (auto& v : row) v = rng.uniform(0.0, 1.0);
    for (auto& row : by)
        for (auto& v : row) v = rng.uniform(0.0, 1.0);
    if (a_out) *a_out = a;
    if (by_out) *by_out = by;
    return NormalOperator::surface(CollocationMatrix::from_dense(a),
                                   CollocationMatrix::from_dense(by));
}

/// Curve collocation of example 1 samples, the standard full-rank instance.
NormalOperator example1_op(std::size_t m, int n, CollocationMatrix* a_out = nullptr) {
    const auto geo = gen_example(1, m);
    const auto params = chord_parameterize(geo.points);
    const auto kv = build_knots(params, n);
    auto a = assemble_collocation(kv, params);
    if (a_out) *a_out = a;
    return NormalOperator::curve(std::move(a));
}

}  // namespace

TEST_CASE("apply_A basics", "[linops]") {
    const auto op = NormalOperator::curve(CollocationMatrix::from_dense({{1.0}}));
    std::vector<double> in = {3.5}, out = {0.0};
    op.apply_A(in, out);
    CHECK(out[0] == 3.5);
    op.apply_At(out, in);
    CHECK(in[0] == 3.5);

    std::vector<double> zero = {0.0}, res = {1.0};
    op.apply_A(zero, res);
    CHECK(res[0] == 0.0);
    op.apply_At(zero, res);
    CHECK(res[0] == 0.0);

    std::vector<double> bad(2, 0.0);
    CHECK_THROWS_AS(op.apply_A(bad, out), std::invalid_argument);
}

TEST_CASE("surface operator matches the dense Kronecker product", "[linops]") {
    oracles::TestRng rng(101);
    for (auto [m1, p1, n1] : {std::tuple<std::size_t, std::size_t, std::size_t>{5, 5, 3},
                              {6, 4, 3}, {7, 6, 4}, {2, 2, 2}}) {
        oracles::Dense ad, byd;
        const auto op = tiny_surface_op(rng, m1, p1, n1, &ad, &byd);
        const auto big = oracles::kron(byd, ad);  // column-major vec convention
        REQUIRE(big.size() == m1 * p1);
        REQUIRE(big[0].size() == n1 * n1);

        std::vector<double> p(n1 * n1), out(m1 * p1);
        for (auto& v : p) v = rng.uniform(-1.0, 1.0);
        op.apply_A(p, out);
        const auto ref = oracles::matvec(big, p);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out[i] - ref[i]) <= 1e-13);

        std::vector<double> r(m1 * p1), back(n1 * n1);
        for (auto& v : r) v = rng.uniform(-1.0, 1.0);
        op.apply_At(r, back);
        const auto reft = oracles::matvec(oracles::transpose(big), r);
        for (std::size_t i = 0; i < back.size(); ++i) CHECK(std::abs(back[i] - reft[i]) <= 1e-13);
    }
}

TEST_CASE("apply_At composed with apply_A reproduces normal-matrix columns", "[linops]") {
    CollocationMatrix a;
    example1_op(20, 6, &a);
    const auto op = NormalOperator::curve(a);
    const auto dense = a.to_dense();
    const auto gram = oracles::matmul(oracles::transpose(dense), dense);
    const std::size_t n1 = a.cols();
    std::vector<double> e(n1, 0.0), col(n1, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        std::fill(e.begin(), e.end(), 0.0);
        e[i] = 1.0;
        op.apply_normal(e, col);
        for (std::size_t t = 0; t < n1; ++t) CHECK(std::abs(col[t] - gram[t][i]) <= 1e-13);
    }
}

TEST_CASE("adjoint consistency over random pairs", "[linops]") {
    oracles::TestRng rng(202);
    const auto op = example1_op(40, 9);
    std::vector<double> x(op.control_size()), ax(op.data_size());
    std::vector<double> y(op.data_size()), aty(op.control_size());
    for (int t = 0; t < 100; ++t) {
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        for (auto& v : y) v = rng.uniform(-1.0, 1.0);
        op.apply_A(x, ax);
        op.apply_At(y, aty);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i) lhs += ax[i] * y[i];
        for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * aty[i];
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("largest eigenvalue estimation", "[linops]") {
    SECTION("diagonal spectrum {1, 4}") {
        const auto op = NormalOperator::curve(CollocationMatrix::from_dense({{1, 0}, {0, 2}}));
        const auto est = largest_eigenvalue(op);
        CHECK(est.converged);
        CHECK(est.value == Catch::Approx(4.0).epsilon(1e-6));
        CHECK(est.residual <= 1e-8 * 4.0 * 1.01);
    }
    SECTION("identity collocation") {
        const auto op = NormalOperator::curve(CollocationMatrix::from_dense({{1, 0}, {0, 1}}));
        const auto est = largest_eigenvalue(op);
        CHECK(est.converged);
        CHECK(est.value == Catch::Approx(1.0).epsilon(1e-6));
    }
    SECTION("surface factors multiply: {1,4} x {2,3} -> 12") {
        const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
        const auto op = NormalOperator::surface(
            CollocationMatrix::from_dense({{1, 0}, {0, 2}}),
            CollocationMatrix::from_dense({{s2, 0}, {0, s3}}));
        const auto est = largest_eigenvalue(op);
        CHECK(est.converged);
        CHECK(est.value == Catch::Approx(12.0).epsilon(1e-6));

        // Dense cross-check on the materialized Kronecker normal matrix.
        const auto big = oracles::kron(oracles::Dense{{s2, 0}, {0, s3}},
                                       oracles::Dense{{1, 0}, {0, 2}});
        const auto gram = oracles::matmul(oracles::transpose(big), big);
        const auto ev = oracles::jacobi_eigenvalues(gram);
        double vmax = 0.0;
        for (double e : ev) vmax = std::max(vmax, e);
        CHECK(vmax == Catch::Approx(12.0).margin(1e-10));
    }
}

TEST_CASE("smallest eigenvalue estimation", "[linops]") {
    SECTION("diagonal spectrum {1, 4}") {
        const auto op = NormalOperator::curve(CollocationMatrix::from_dense({{1, 0}, {0, 2}}));
        const auto est = smallest_eigenvalue(op, 4.0);
        CHECK(est.converged);
        CHECK(est.value == Catch::Approx(1.0).epsilon(1e-6));
    }
    SECTION("structurally empty column clamps to exact zero") {
        const auto op = NormalOperator::curve(CollocationMatrix::from_dense({{1, 0}, {1, 0}}));
        const auto est = smallest_eigenvalue(op, largest_eigenvalue(op).value);
        CHECK(est.converged);
        CHECK(est.value == 0.0);
    }
    SECTION("dependent columns clamp to zero without a structural certificate") {
        const auto op = NormalOperator::curve(CollocationMatrix::from_dense({{1, 1}, {1, 1}}));
        const auto est = smallest_eigenvalue(op, largest_eigenvalue(op).value);
        CHECK(est.value == 0.0);
    }
    SECTION("surface factor minima multiply: {1,...} x {2,...} -> 2") {
        const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
        const auto op = NormalOperator::surface(
            CollocationMatrix::from_dense({{1, 0}, {0, 2}}),
            CollocationMatrix::from_dense({{s2, 0}, {0, s3}}));
        const auto est = smallest_eigenvalue(op, 12.0);
        CHECK(est.value == Catch::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("eigenvalue sandwich against random probe Rayleigh quotients", "[linops]") {
    oracles::TestRng rng(303);
    const auto op = example1_op(30, 8);
    const double v = largest_eigenvalue(op).value;
    const double u = smallest_eigenvalue(op, v).value;
    std::vector<double> x(op.control_size()), nx(op.control_size());
    for (int t = 0; t < 20; ++t) {
        double norm_sq = 0.0;
        for (auto& e : x) {
            e = rng.uniform(-1.0, 1.0);
            norm_sq += e * e;
        }
        op.apply_normal(x, nx);
        double quad = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) quad += x[i] * nx[i];
        const double rayleigh = quad / norm_sq;
        CHECK(v >= rayleigh - 1e-8 * v);
        CHECK(u <= rayleigh + 1e-8 * v);
    }
}

TEST_CASE("largest eigenvalue below the row-sum bound", "[linops]") {
    CollocationMatrix a;
    example1_op(35, 10, &a);
    const auto op = NormalOperator::curve(a);
    const double v = largest_eigenvalue(op).value;
    const auto dense = a.to_dense();
    const auto gram = oracles::matmul(oracles::transpose(dense), dense);
    double max_row_sum = 0.0;
    for (const auto& row : gram) {
        double s = 0.0;
        for (double e : row) s += std::abs(e);
        max_row_sum = std::max(max_row_sum, s);
    }
    CHECK(v <= max_row_sum * (1.0 + 1e-6));
    CHECK(max_row_sum <= static_cast<double>(a.cols()) + 1e-9);
}

TEST_CASE("direct least-squares oracle", "[linops]") {
    SECTION("identity") {
        const auto a = CollocationMatrix::from_dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
        std::vector<double> q = {1.5, -2.0, 0.25};
        const auto r = direct_lsq_solve(a, q);
        CHECK(r.rank == 3);
        for (std::size_t i = 0; i < 3; ++i) CHECK(r.solution[i] == Catch::Approx(q[i]).margin(1e-14));
    }
    SECTION("overdetermined mean") {
        const auto a = CollocationMatrix::from_dense({{1.0}, {1.0}});
        const auto r = direct_lsq_solve(a, std::vector<double>{1.0, 3.0});
        CHECK(r.rank == 1);
        CHECK(r.solution[0] == Catch::Approx(2.0).margin(1e-14));
    }
    SECTION("random full-rank system satisfies the normal equations") {
        oracles::TestRng rng(404);
        CollocationMatrix a;
        example1_op(49, 9, &a);  // 50 x 10 collocation
        std::vector<double> q(a.rows());
        for (auto& v : q) v = rng.uniform(-2.0, 2.0);
        const auto r = direct_lsq_solve(a, q);
        CHECK(r.rank == static_cast<int>(a.cols()));
        // || A^T A p - A^T q || <= 1e-10 || A^T q ||
        std::vector<double> ap(a.rows()), atap(a.cols()), atq(a.cols());
        a.apply(r.solution, ap);
        a.apply_transpose(ap, atap);
        a.apply_transpose(q, atq);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < atq.size(); ++i) {
            num += (atap[i] - atq[i]) * (atap[i] - atq[i]);
            den += atq[i] * atq[i];
        }
        CHECK(std::sqrt(num) <= 1e-10 * std::sqrt(den));
    }
    SECTION("rank-deficient system still solves consistently") {
        // Two identical columns; b = A^T q is in range, pick any solution.
        const auto a = CollocationMatrix::from_dense({{1, 1}, {2, 2}, {3, 3}});
        std::vector<double> q = {2.0, 4.0, 6.0};
        const auto r = direct_lsq_solve(a, q);
        CHECK(r.rank == 1);
        std::vector<double> ap(3), atap(2), atq(2);
        a.apply(r.solution, ap);
        a.apply_transpose(ap, atap);
        a.apply_transpose(q, atq);
        for (std::size_t i = 0; i < 2; ++i) CHECK(atap[i] == Catch::Approx(atq[i]).epsilon(1e-12));
    }
}

TEST_CASE("rank detection", "[linops]") {
    SECTION("full-rank example-1 collocation") {
        CollocationMatrix a;
        const auto op = example1_op(50, 10, &a);
        const double v = largest_eigenvalue(op).value;
        CHECK(rank_detect(op, v) == Rank::FullRank);
        const auto dense = a.to_dense();
        CHECK(oracles::dense_rank(oracles::matmul(oracles::transpose(dense), dense)) == 11);
    }
    SECTION("identity") {
        const auto op = NormalOperator::curve(CollocationMatrix::from_dense({{1, 0}, {0, 1}}));
        CHECK(rank_detect(op, 1.0) == Rank::FullRank);
    }
    SECTION("a data hole that removes all support of some basis") {
        // Knots from the full 31-point parameter sequence, collocation
        // assembled only at the points surviving a wide central hole.
        std::vector<double> full(31);
        for (std::size_t j = 0; j < 31; ++j) full[j] = static_cast<double>(j) / 30.0;
        full.back() = 1.0;
        const auto full_params = ParamSequence::checked(full);
        const auto kv = build_knots(full_params, 14);

        std::vector<double> rem;
        for (std::size_t j = 0; j < 31; ++j)
            if (j < 9 || j > 23) rem.push_back(full_params[j]);
        const auto remaining = ParamSequence::checked(rem);
        const auto a = assemble_collocation(kv, remaining);
        const auto op = NormalOperator::curve(a);
        CHECK(op.has_empty_column());
        const double v = largest_eigenvalue(op).value;
        CHECK(rank_detect(op, v) == Rank::RankDeficient);

        const auto dense = a.to_dense();
        CHECK(oracles::dense_rank(oracles::matmul(oracles::transpose(dense), dense)) <
              static_cast<int>(a.cols()));
    }
}
