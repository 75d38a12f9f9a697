#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fdebvm/errors.hpp"
#include "fdebvm/experiments.hpp"
#include "fdebvm/gmres.hpp"
#include "fdebvm/oracle.hpp"
#include "fdebvm/preconditioners.hpp"
#include "test_support.hpp"

using namespace fdebvm;

namespace {

LinearMap<double> identity_map() {
    return [](std::span<const double> in, std::span<double> out) { std::copy(in.begin(), in.end(), out.begin()); };
}

LinearMap<double> dense_map(const std::vector<double>& a, std::size_t n) {
    return [&a, n](std::span<const double> in, std::span<double> out) {
        const auto y = testing::dense_matvec(a, n, in);
        std::copy(y.begin(), y.end(), out.begin());
    };
}

LinearMap<double> system_map(const BlockSystem& sys) {
    return [&sys](std::span<const double> in, std::span<double> out) { apply_block_operator(sys, in, out); };
}

LinearMap<double> inverse_map(const Preconditioner& p) {
    return [&p](std::span<const double> in, std::span<double> out) { p.apply_inverse(in, out); };
}

BlockSystem small_system(std::size_t n, std::size_t s) {
    return assemble_block_system(default_scheme(), gaussian_pulse_problem(1.2), n, s);
}

}  // namespace

TEST_CASE("configuration") {
    GmresConfig c;
    CHECK(c.restart == 20);
    CHECK(c.rel_tol == 1e-8);
    CHECK(c.mode == GmresMode::restarted);
    CHECK_NOTHROW(c.validate());
    c.restart = 0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c.restart = 5;
    c.rel_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c.rel_tol = 1.0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c.rel_tol = 1e-6;
    c.max_total_iters = 0;
    CHECK_THROWS_AS(c.validate(), UsageError);

    const std::vector<double> b(3, 1.0);
    CHECK_THROWS_AS(gmres_solve<double>(identity_map(), {}, b, std::vector<double>(2), GmresConfig{}), UsageError);
    GmresConfig bad;
    bad.restart = 0;
    CHECK_THROWS_AS(gmres_solve<double>(identity_map(), {}, b, {}, bad), UsageError);
}

TEST_CASE("trivial systems") {
    const std::vector<double> zero(10, 0.0);
    const auto r0 = gmres_solve<double>(identity_map(), {}, zero, {}, GmresConfig{});
    CHECK(r0.report.converged);
    CHECK(r0.report.iterations == 0);
    for (double v : r0.x) CHECK(v == 0.0);

    testing::Rng rng(1);
    const auto b = testing::random_vector(rng, 10);
    const auto r1 = gmres_solve<double>(identity_map(), {}, b, {}, GmresConfig{});
    CHECK(r1.report.converged);
    CHECK(r1.report.iterations == 1);
    CHECK(testing::rel_l2(r1.x, b) <= 1e-15);

    // exact initial guess: nothing to do
    const auto r2 = gmres_solve<double>(identity_map(), {}, b, b, GmresConfig{});
    CHECK(r2.report.converged);
    CHECK(r2.report.iterations == 0);
}

TEST_CASE("happy breakdown returns the exact solution") {
    const std::size_t n = 8;
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0 + i;
    std::vector<double> b(n, 0.0);
    b[2] = 3.0;
    b[5] = -1.0;
    GmresConfig c;
    c.rel_tol = 1e-15;
    const auto r = gmres_solve<double>(dense_map(a, n), {}, b, {}, c);
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 2);
    CHECK(r.x[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.x[5] == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("iteration cap") {
    const auto sys = small_system(24, 16);
    GmresConfig c;
    c.max_total_iters = 7;
    c.restart = 3;
    const auto r = gmres_solve<double>(system_map(sys), {}, sys.rhs, {}, c);
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.iterations == 7);
    CHECK(r.report.residual_history.size() == 8);
    CHECK(r.report.restarts == 2);
    CHECK(r.report.final_relative_residual > c.rel_tol);
}

TEST_CASE("restarted histories: monotone cycles and the residual identity") {
    for (const char* kind : {"none", "strang", "bccb", "bccb-mod"}) {
        const auto sys = eliminate_initial_value(small_system(24, 16));
        const auto prec = make_preconditioner(kind, sys);
        const LinearMap<double> pmap = prec ? inverse_map(*prec) : LinearMap<double>{};
        GmresConfig c;
        c.restart = 20;
        c.track_true_residual = true;
        const auto r = gmres_solve<double>(system_map(sys), pmap, sys.rhs, {}, c);
        CAPTURE(kind);
        REQUIRE(r.report.converged);
        const auto& hist = r.report.residual_history;
        CHECK(hist.size() == r.report.iterations + 1);
        CHECK(hist.front() == 1.0);
        CHECK(hist.back() < c.rel_tol);
        for (std::size_t q = 2; q < hist.size(); ++q) {
            if ((q - 1) % c.restart == 0) continue;  // first step of a new cycle
            CHECK(hist[q] <= hist[q - 1]);
        }
        for (double t : r.report.true_residual_history) CHECK(std::isfinite(t));

        // P^{-1}(b - M x) recomputed outside the solver
        std::vector<double> mx(sys.dim()), u(sys.dim()), pr(sys.dim()), pb(sys.dim());
        apply_block_operator(sys, r.x, mx);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = sys.rhs[i] - mx[i];
        if (prec) {
            prec->apply_inverse(u, pr);
            prec->apply_inverse(sys.rhs, pb);
        } else {
            pr = u;
            pb = sys.rhs;
        }
        const double rel = testing::norm2(pr) / testing::norm2(pb);
        CHECK(std::fabs(rel - r.report.final_relative_residual) <= 1e-13);
        CHECK(std::fabs(rel - hist.back()) <= 1e-12);
        CHECK(r.report.final_true_relative_residual == doctest::Approx(testing::norm2(u) / testing::norm2(sys.rhs)).epsilon(1e-10));
    }
}

TEST_CASE("Strang-preconditioned benchmark cell") {
    RunConfig config;
    config.alpha = 1.2;
    config.n = 24;
    config.s = 16;
    config.precond = "strang";
    const auto run = run_single(config);
    CHECK(run.report.converged);
    CHECK(run.report.iterations == 9);
}

TEST_CASE("determinism") {
    const auto sys = eliminate_initial_value(small_system(48, 32));
    const BccbPreconditioner p(sys, true);
    const auto a = gmres_solve<double>(system_map(sys), inverse_map(p), sys.rhs, {}, GmresConfig{});
    const auto b = gmres_solve<double>(system_map(sys), inverse_map(p), sys.rhs, {}, GmresConfig{});
    CHECK(a.report.iterations == b.report.iterations);
    CHECK(a.report.residual_history == b.report.residual_history);
    CHECK(a.x == b.x);
}

TEST_CASE("complex scalars") {
    testing::Rng rng(12);
    const std::size_t n = 30;
    std::vector<std::complex<double>> a(n * n);
    for (auto& z : a) z = {testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1)};
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += std::complex<double>(8.0, 3.0);
    const LinearMap<std::complex<double>> op = [&](std::span<const std::complex<double>> in,
                                                   std::span<std::complex<double>> out) {
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * in[j];
            out[i] = acc;
        }
    };
    const auto b = testing::random_complex_vector(rng, n);
    GmresConfig c;
    c.rel_tol = 1e-12;
    c.restart = 10;
    const auto r = gmres_solve<std::complex<double>>(op, {}, b, {}, c);
    REQUIRE(r.report.converged);
    std::vector<std::complex<double>> ax(n);
    op(r.x, ax);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::norm(ax[i] - b[i]);
        den += std::norm(b[i]);
    }
    CHECK(std::sqrt(num / den) <= 1e-11);
}

TEST_CASE("full GMRES termination probes") {
    const auto sys = small_system(4, 8);
    const std::size_t dim = sys.dim();
    REQUIRE(dim == 36);
    const oracle::DenseSnapshot m("M", dim, dense_materialize(sys));
    const auto minv = oracle::solve_many(m, oracle::DenseSnapshot::identity("I", dim));
    const LinearMap<double> exact = [&](std::span<const double> in, std::span<double> out) {
        const auto y = oracle::multiply(minv, in);
        std::copy(y.begin(), y.end(), out.begin());
    };
    CHECK(full_gmres_iterations<double>(system_map(sys), exact, sys.rhs) == 1);

    const StrangBlockPreconditioner S(sys);
    CHECK(full_gmres_iterations<double>(system_map(sys), inverse_map(S), sys.rhs) <= 33);
    CHECK(full_gmres_iterations<double>(system_map(sys), {}, sys.rhs) <= 36);

    GmresConfig c;
    c.mode = GmresMode::full;
    c.rel_tol = 1e-12;
    c.max_total_iters = 100;
    const auto r = gmres_solve<double>(system_map(sys), inverse_map(S), sys.rhs, {}, c);
    CHECK(r.report.restarts == 0);
}

TEST_CASE("residual history CSV") {
    const auto sys = eliminate_initial_value(small_system(8, 8));
    GmresConfig c;
    c.restart = 4;
    const auto r = gmres_solve<double>(system_map(sys), {}, sys.rhs, {}, c);
    std::ostringstream os;
    write_residual_history_csv(os, r.report);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "iteration,preconditioned_residual,true_residual");
    std::size_t rows = 0, with_true = 0;
    while (std::getline(is, line)) {
        ++rows;
        if (line.back() != ',') ++with_true;
    }
    CHECK(rows == r.report.residual_history.size());
    // the true residual is formed at the start and at each cycle end
    CHECK(with_true == 1 + r.report.restarts + 1);
}
