#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdebvm/errors.hpp"
#include "fdebvm/experiments.hpp"
#include "fdebvm/gmres.hpp"
#include "fdebvm/oracle.hpp"
#include "fdebvm/preconditioners.hpp"
#include "test_support.hpp"

using namespace fdebvm;

TEST_CASE("snapshots and the size guard") {
    const auto id = oracle::DenseSnapshot::identity("I", 5);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) CHECK(id(i, j) == (i == j ? 1.0 : 0.0));
    }
    CHECK(oracle::DenseSnapshot::zeros("Z", 3).values == std::vector<double>(9, 0.0));
    CHECK_THROWS_AS(oracle::DenseSnapshot("big", kDenseGuard + 1, {}), UsageError);
    CHECK_THROWS_AS(oracle::DenseSnapshot::zeros("big", kDenseGuard + 1), UsageError);
    CHECK_THROWS_AS(oracle::DenseSnapshot("bad", 3, std::vector<double>(8)), UsageError);
    CHECK_THROWS_AS(oracle::kron(oracle::DenseSnapshot::identity("a", 70), oracle::DenseSnapshot::identity("b", 70)),
                    UsageError);
}

TEST_CASE("dense solve") {
    testing::Rng rng(1);
    const auto rhs = testing::random_vector(rng, 6);
    const auto x = oracle::dense_solve(oracle::DenseSnapshot::identity("I", 6), rhs);
    for (std::size_t i = 0; i < 6; ++i) CHECK(x[i] == rhs[i]);

    // Hilbert matrix: solvable but flagged
    const std::size_t n = 9;
    auto hilbert = oracle::DenseSnapshot::zeros("hilbert", n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hilbert(i, j) = 1.0 / static_cast<double>(i + j + 1);
    }
    oracle::DenseSolveInfo info;
    oracle::dense_solve(hilbert, std::vector<double>(n, 1.0), &info);
    CHECK(info.ill_conditioned);
    CHECK(info.rcond < 1e-10);
    CHECK(info.warning.find("hilbert") != std::string::npos);

    oracle::DenseSolveInfo good;
    oracle::dense_solve(oracle::DenseSnapshot::identity("I", 4), std::vector<double>(4, 1.0), &good);
    CHECK_FALSE(good.ill_conditioned);
    CHECK(good.warning.empty());

    auto singular = oracle::DenseSnapshot::identity("sing", 4);
    singular(2, 2) = 0.0;
    std::string message;
    try {
        oracle::dense_solve(singular, std::vector<double>(4, 1.0));
    } catch (const SingularError& e) {
        message = e.what();
    }
    CHECK(message.find("sing") != std::string::npos);
    CHECK(message.find("pivot") != std::string::npos);
    CHECK_THROWS_AS(oracle::dense_solve(singular, std::vector<double>(3, 1.0)), UsageError);
}

TEST_CASE("dense solve agrees with preconditioned GMRES") {
    auto sys = eliminate_initial_value(assemble_block_system(default_scheme(), gaussian_pulse_problem(1.2), 24, 16));
    const auto direct = oracle::dense_solve(oracle::block_matrix(sys), sys.rhs);
    const StrangBlockPreconditioner S(sys);
    GmresConfig c;
    const auto r = gmres_solve<double>(
        [&](std::span<const double> in, std::span<double> out) { apply_block_operator(sys, in, out); },
        [&](std::span<const double> in, std::span<double> out) { S.apply_inverse(in, out); }, sys.rhs, {}, c);
    REQUIRE(r.report.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) worst = std::max(worst, std::fabs(direct[i] - r.x[i]));
    CHECK(worst <= 1e-7);
}

TEST_CASE("dense eigenvalues") {
    auto d = oracle::DenseSnapshot::zeros("diag", 5);
    const double diag[] = {3.0, -1.0, 0.5, 7.0, -2.5};
    for (std::size_t i = 0; i < 5; ++i) d(i, i) = diag[i];
    std::vector<oracle::cplx> want(diag, diag + 5);
    CHECK(oracle::multiset_distance(oracle::dense_eigenvalues(d), want) <= 1e-14);

    testing::Rng rng(2);
    const auto c = testing::random_vector(rng, 40);
    const auto circ = oracle::circulant(c);
    CHECK(oracle::multiset_distance(oracle::dense_eigenvalues(circ), circulant_eigenvalues({c})) <= 1e-10);

    const auto j = oracle::spatial_operator(gaussian_pulse_problem(1.5), 64);
    for (const auto& z : oracle::dense_eigenvalues(j)) CHECK(z.real() < 0.0);

    CHECK(oracle::dense_eigenvalues(oracle::DenseSnapshot()).empty());
}

TEST_CASE("numerical rank") {
    CHECK(oracle::numerical_rank(oracle::DenseSnapshot::identity("I", 9), 1e-8) == 9);
    testing::Rng rng(3);
    const auto u = testing::random_vector(rng, 9);
    const auto v = testing::random_vector(rng, 9);
    auto outer = oracle::DenseSnapshot::zeros("uv", 9);
    for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t k = 0; k < 9; ++k) outer(i, k) = u[i] * v[k];
    }
    CHECK(oracle::numerical_rank(outer, 1e-8) == 1);

    const auto sys = assemble_block_system(default_scheme(), gaussian_pulse_problem(1.2), 4, 8);
    auto l = oracle::solve_many(oracle::strang_block_matrix(sys), oracle::block_matrix(sys));
    for (std::size_t i = 0; i < l.n; ++i) l(i, i) -= 1.0;
    CHECK(oracle::numerical_rank(l, 1e-8) <= 32);
}

TEST_CASE("products and Kronecker") {
    testing::Rng rng(4);
    oracle::DenseSnapshot a("a", 3, testing::random_vector(rng, 9));
    oracle::DenseSnapshot b("b", 2, testing::random_vector(rng, 4));
    const auto k = oracle::kron(a, b);
    REQUIRE(k.n == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) CHECK(k(i, j) == a(i / 2, j / 2) * b(i % 2, j % 2));
    }
    const auto id = oracle::DenseSnapshot::identity("I", 3);
    CHECK(oracle::multiply(a, id).values == a.values);
    const auto x = testing::random_vector(rng, 3);
    const auto ax = oracle::multiply(a, x);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(ax[i] == doctest::Approx(a(i, 0) * x[0] + a(i, 1) * x[1] + a(i, 2) * x[2]).epsilon(1e-15));
    }
    const auto inv = oracle::solve_many(a, id);
    const auto prod = oracle::multiply(a, inv);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(oracle::multiply(a, b), UsageError);
    CHECK_THROWS_AS(oracle::multiply(a, std::vector<double>(2)), UsageError);
}

TEST_CASE("binomial weights against the recurrence") {
    for (double alpha : {1.1, 1.5, 1.93}) {
        const auto w = oracle::binomial_weights(alpha, 200);
        const auto g = grunwald_coefficients(alpha, 200);
        for (std::size_t k = 0; k <= 200; ++k) CHECK(w[k] == doctest::Approx(g[k]).epsilon(1e-12).scale(1e-300));
    }
    const auto g = oracle::grunwald_matrix(1.5, 5);
    CHECK(g(0, 0) == -1.5);
    CHECK(g(0, 1) == 1.0);
    CHECK(g(0, 2) == 0.0);
    CHECK(g(4, 0) == doctest::Approx(oracle::binomial_weights(1.5, 5)[5]).epsilon(1e-15));
}

TEST_CASE("error measures") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> y = {1.0, 2.0, 4.0};
    CHECK(oracle::relative_max_error(x, y) == doctest::Approx(0.25));
    CHECK(oracle::relative_l2_error(x, y) == doctest::Approx(1.0 / std::sqrt(21.0)));
    CHECK_THROWS_AS(oracle::relative_max_error(x, std::vector<double>(2)), UsageError);
    const std::vector<oracle::cplx> a = {1.0, 2.0};
    const std::vector<oracle::cplx> b = {2.0, 1.0};
    CHECK(oracle::multiset_distance(a, b) == 0.0);
    CHECK(std::isinf(oracle::multiset_distance(a, std::vector<oracle::cplx>(3))));
}
