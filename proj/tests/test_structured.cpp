#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fdebvm/bvm.hpp"
#include "fdebvm/errors.hpp"
#include "fdebvm/preconditioners.hpp"
#include "fdebvm/structured.hpp"
#include "test_support.hpp"

using namespace fdebvm;

namespace {

// lambda_j = sum_r c_r w^{rj}, summed directly in long double
std::vector<cplx> dft_oracle(const std::vector<double>& c) {
    const std::size_t n = c.size();
    std::vector<cplx> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t r = 0; r < n; ++r) {
            const long double theta = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>((r * j) % n) / n;
            re += c[r] * std::cos(theta);
            im += c[r] * std::sin(theta);
        }
        out[j] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

std::vector<double> dense_toeplitz(const ToeplitzMatrix& t) {
    const std::size_t n = t.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = t(i, j);
    }
    return a;
}

CirculantMatrix well_conditioned_circulant(testing::Rng& rng, std::size_t n) {
    auto c = testing::random_vector(rng, n, -0.5, 0.5);
    c[0] += static_cast<double>(n);  // diagonally dominant
    return {c};
}

}  // namespace

TEST_CASE("Toeplitz product") {
    testing::Rng rng(1);
    SUBCASE("identity") {
        std::vector<double> e1(9, 0.0);
        e1[0] = 1.0;
        const ToeplitzMatrix t(e1, e1);
        const auto v = testing::random_vector(rng, 9);
        const auto y = toeplitz_matvec(t, v);
        for (std::size_t i = 0; i < 9; ++i) CHECK(y[i] == doctest::Approx(v[i]).epsilon(1e-15).scale(1.0));
    }
    SUBCASE("random Toeplitz against the dense product, N <= 512") {
        for (std::size_t n : {1u, 2u, 8u, 31u, 100u, 256u, 512u}) {
            double worst = 0.0;
            for (int trial = 0; trial < 100; ++trial) {
                auto col = testing::random_vector(rng, n);
                auto row = testing::random_vector(rng, n);
                row[0] = col[0];
                const ToeplitzMatrix t(col, row);
                const auto v = testing::random_vector(rng, n);
                const auto ref = testing::dense_matvec(dense_toeplitz(t), n, v);
                worst = std::max(worst, testing::rel_l2(toeplitz_matvec(t, v), ref));
            }
            CAPTURE(n);
            CHECK(worst <= 1e-12);
        }
    }
    SUBCASE("G_alpha row sums are negative") {
        const std::size_t n = 16;
        const auto g = grunwald_coefficients(1.5, n);
        std::vector<double> col(n, 0.0), row(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) col[k] = g[k + 1];
        row[0] = g[1];
        row[1] = g[0];
        const auto sums = toeplitz_matvec(ToeplitzMatrix(col, row), std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i) {
            // row i holds g_0..g_{i+1} (g_0 missing on the last row)
            long double expected = 0.0L;
            for (std::size_t k = (i + 1 == n ? 1 : 0); k <= i + 1; ++k) expected += g[k];
            CHECK(sums[i] == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
            CHECK(sums[i] < 0.0);
        }
    }
    SUBCASE("invalid input") {
        CHECK_THROWS_AS(ToeplitzMatrix({1.0, 2.0}, {1.5, 2.0}), UsageError);
        CHECK_THROWS_AS(ToeplitzMatrix({1.0, 2.0}, {1.0}), UsageError);
        const ToeplitzMatrix t({1.0, 2.0}, {1.0, 3.0});
        CHECK_THROWS_AS(toeplitz_matvec(t, std::vector<double>(3)), UsageError);
    }
}

TEST_CASE("circulant eigenvalues") {
    const std::size_t n = 12;
    std::vector<double> e(n, 0.0);
    e[0] = 1.0;
    for (const auto& lam : circulant_eigenvalues({e})) {
        CHECK(lam.real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::fabs(lam.imag()) < 1e-15);
    }
    std::vector<double> e2(n, 0.0);
    e2[1] = 1.0;
    const auto roots = circulant_eigenvalues({e2});
    for (std::size_t j = 0; j < n; ++j) {
        const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / n);
        CHECK(std::abs(roots[j] - w) < 1e-14);
    }

    testing::Rng rng(3);
    for (std::size_t m : {1u, 2u, 5u, 16u, 63u, 128u}) {
        const auto c = testing::random_vector(rng, m);
        const auto lam = circulant_eigenvalues({c});
        const auto sym = circulant_symbol({c});
        const auto ref = dft_oracle(c);
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(std::abs(lam[j] - ref[j]) < 1e-13 * m);
            CHECK(std::abs(sym[j] - lam[(m - j) % m]) < 1e-13 * m);
        }
        // round trip: (1/m) sum_j lambda_j w^{-rj} = c_r
        for (std::size_t r = 0; r < m; ++r) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                acc += lam[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((r * j) % m) / m);
            }
            acc /= static_cast<double>(m);
            CHECK(std::fabs(acc.real() - c[r]) < 1e-14 * std::max<std::size_t>(m, 8));
            CHECK(std::fabs(acc.imag()) < 1e-14 * std::max<std::size_t>(m, 8));
        }
    }

    SUBCASE("s(A) of the shipped scheme has a zero eigenvalue at j = 0") {
        const auto& sch = default_scheme();
        for (std::size_t m : {6u, 16u, 64u}) {
            const auto sA = strang_circulant_of_stencil(sch.main_alpha, sch.nu, m);
            const auto lam = circulant_eigenvalues(sA);
            CHECK(std::abs(lam[0]) < 1e-14);
            std::vector<double> rhs(m, 1.0);
            CHECK_THROWS_AS(circulant_solve(sA, rhs), SingularError);
        }
    }
}

TEST_CASE("circulant product and solve") {
    testing::Rng rng(4);
    std::vector<double> e(7, 0.0);
    e[0] = 1.0;
    const auto v = testing::random_vector(rng, 7);
    const auto x = circulant_solve({e}, v);
    for (std::size_t i = 0; i < 7; ++i) CHECK(x[i] == doctest::Approx(v[i]).epsilon(1e-15).scale(1.0));

    for (std::size_t n : {3u, 10u, 64u, 200u}) {
        const auto c = well_conditioned_circulant(rng, n);
        std::vector<double> dense(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) dense[i * n + j] = c(i, j);
        }
        for (int trial = 0; trial < 10; ++trial) {
            const auto z = testing::random_vector(rng, n);
            const auto cz = circulant_matvec(c, z);
            CHECK(testing::rel_l2(cz, testing::dense_matvec(dense, n, z)) <= 1e-13);
            const auto back = circulant_solve(c, cz);
            CHECK(testing::rel_l2(back, z) <= 1e-12);
            const auto res = testing::dense_matvec(dense, n, back);
            CHECK(testing::rel_l2(res, cz) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(circulant_solve({e}, std::vector<double>(6)), UsageError);
    CHECK_THROWS_AS(circulant_matvec({e}, std::vector<double>(6)), UsageError);
    CHECK_THROWS_AS(circulant_eigenvalues(CirculantMatrix{}), UsageError);
    CHECK_THROWS_AS(circulant_solve({std::vector<double>(5, 1.0)}, std::vector<double>(5, 1.0)), SingularError);
}

TEST_CASE("Strang circulant of the Gruenwald generator") {
    const auto g5 = grunwald_coefficients(1.5, 5);
    const auto [s, st] = strang_circulant_of_grunwald(g5, 5);
    const double expected[] = {-1.5, 0.375, 0.0625, 0.0, 1.0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.first_col[i] == doctest::Approx(expected[i]).epsilon(1e-15).scale(1.0));
    const double expected_t[] = {-1.5, 1.0, 0.0, 0.0625, 0.375};
    for (std::size_t i = 0; i < 5; ++i) CHECK(st.first_col[i] == doctest::Approx(expected_t[i]).epsilon(1e-15).scale(1.0));

    SUBCASE("cutoff layout for even and odd N") {
        for (std::size_t n : {3u, 4u, 6u, 9u, 10u}) {
            const auto g = grunwald_coefficients(1.3, n);
            const auto c = strang_circulant_of_grunwald(g, n).first;
            const std::size_t cut = (n + 1) / 2;
            for (std::size_t k = 0; k < n; ++k) {
                double want = 0.0;
                if (k < cut) want = g[k + 1];
                if (k == n - 1) want = g[0];
                CAPTURE(n);
                CAPTURE(k);
                CHECK(c.first_col[k] == want);
            }
        }
    }
    SUBCASE("transpose consistency, N <= 64") {
        for (std::size_t n = 3; n <= 64; ++n) {
            const auto g = grunwald_coefficients(1.7, n);
            const auto [c, ct] = strang_circulant_of_grunwald(g, n);
            bool ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) ok = ok && ct(i, j) == c(j, i);
            }
            CHECK(ok);
        }
    }
    SUBCASE("transpose spectrum is the conjugate") {
        const auto g = grunwald_coefficients(1.4, 40);
        const auto [c, ct] = strang_circulant_of_grunwald(g, 40);
        const auto a = circulant_eigenvalues(c);
        const auto b = circulant_eigenvalues(ct);
        for (std::size_t j = 0; j < 40; ++j) CHECK(std::abs(b[j] - std::conj(a[j])) < 1e-13);
    }
    SUBCASE("eigenvalues lie in the open disc |z + alpha| < alpha") {
        for (int a10 = 11; a10 <= 19; ++a10) {
            const double alpha = a10 / 10.0;
            for (std::size_t n : {8u, 64u, 512u, 4096u}) {
                const auto g = grunwald_coefficients(alpha, n);
                const auto [c, ct] = strang_circulant_of_grunwald(g, n);
                double worst = -1.0;
                for (const auto& lam : circulant_eigenvalues(c)) worst = std::max(worst, std::abs(lam + alpha) - alpha);
                for (const auto& lam : circulant_eigenvalues(ct)) worst = std::max(worst, std::abs(lam + alpha) - alpha);
                CAPTURE(alpha);
                CAPTURE(n);
                CHECK(worst < 0.0);
                for (const auto& lam : circulant_eigenvalues(c)) CHECK(lam.real() < 0.0);
            }
        }
    }
    SUBCASE("errors") {
        const auto g = grunwald_coefficients(1.5, 10);
        CHECK_THROWS_AS(strang_circulant_of_grunwald(g, 2), UsageError);
        CHECK_THROWS_AS(strang_circulant_of_grunwald(grunwald_coefficients(1.5, 2), 8), UsageError);
    }
}
