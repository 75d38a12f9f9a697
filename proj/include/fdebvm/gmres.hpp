#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fdebvm/errors.hpp"

namespace fdebvm {

/// y = Op(x); both spans have the operator dimension.
template <class Scalar>
using LinearMap = std::function<void(std::span<const Scalar>, std::span<Scalar>)>;

enum class GmresMode { restarted, full };

struct GmresConfig {
    std::size_t restart = 20;
    double rel_tol = 1e-8;
    std::size_t max_total_iters = 10000;
    GmresMode mode = GmresMode::restarted;
    /// Form x_q and the unpreconditioned residual after every inner step (one
    /// extra operator product per iteration). Otherwise only at cycle ends.
    bool track_true_residual = false;

    void validate() const {
        if (restart < 1) throw UsageError("GmresConfig: restart must be >= 1");
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw UsageError("GmresConfig: rel_tol must lie in (0,1)");
        if (max_total_iters < 1) throw UsageError("GmresConfig: max_total_iters must be >= 1");
    }
};

struct SolveReport {
    /// Total Arnoldi steps over all cycles.
    std::size_t iterations = 0;
    std::size_t restarts = 0;
    /// ||r_q|| / ||r_0|| of the preconditioned residual, entry 0 is the initial 1.
    std::vector<double> residual_history;
    /// ||b - M x_q|| / ||b - M x_0||; NaN where it was not formed.
    std::vector<double> true_residual_history;
    bool converged = false;
    double wall_time = 0.0;
    /// Recomputed from the returned x (not the Givens estimate).
    double final_relative_residual = 0.0;
    double final_true_relative_residual = 0.0;
};

template <class Scalar>
struct GmresResult {
    std::vector<Scalar> x;
    SolveReport report;
};

/// CSV with header "iteration,preconditioned_residual,true_residual".
inline void write_residual_history_csv(std::ostream& os, const SolveReport& report) {
    os << "iteration,preconditioned_residual,true_residual\n";
    os.precision(17);
    for (std::size_t q = 0; q < report.residual_history.size(); ++q) {
        os << q << ',' << report.residual_history[q] << ',';
        if (q < report.true_residual_history.size() && !std::isnan(report.true_residual_history[q])) {
            os << report.true_residual_history[q];
        }
        os << '\n';
    }
}

namespace detail {

inline double conj_of(double x) { return x; }
inline std::complex<double> conj_of(std::complex<double> x) { return std::conj(x); }

template <class Scalar>
Scalar dot(std::span<const Scalar> a, std::span<const Scalar> b) {
    Scalar acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += conj_of(a[i]) * b[i];
    return acc;
}

template <class Scalar>
double norm2(std::span<const Scalar> a) {
    double acc = 0.0;
    for (const auto& v : a) acc += std::norm(v);
    return std::sqrt(acc);
}

}  // namespace detail

/// Left-preconditioned GMRES on P^{-1} M x = P^{-1} b.
///
/// Arnoldi uses modified Gram-Schmidt with a second pass whenever the new
/// vector keeps a component above 1e-8 (relative) along the basis. Convergence
/// is declared on the preconditioned residual ||P^{-1}(b - M x_q)|| / ||r_0|| < rel_tol,
/// re-verified from the updated iterate at the end of each cycle. An empty
/// `precond` means no preconditioning.
template <class Scalar>
GmresResult<Scalar> gmres_solve(const LinearMap<Scalar>& op, const LinearMap<Scalar>& precond,
                                std::span<const Scalar> b, std::span<const Scalar> x0, const GmresConfig& config) {
    using std::abs;
    using detail::conj_of;
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const std::size_t n = b.size();
    if (!x0.empty() && x0.size() != n) throw UsageError("gmres_solve: x0 has the wrong length");

    GmresResult<Scalar> result;
    auto& report = result.report;
    auto& x = result.x;
    x.assign(n, Scalar{});
    if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());

    std::vector<Scalar> tmp(n), r(n), u(n);
    auto apply_prec = [&](std::span<const Scalar> in, std::span<Scalar> out) {
        if (precond) {
            precond(in, out);
        } else {
            std::copy(in.begin(), in.end(), out.begin());
        }
    };
    // u = b - M x, r = P^{-1} u
    auto residual = [&] {
        op(x, tmp);
        for (std::size_t i = 0; i < n; ++i) u[i] = b[i] - tmp[i];
        apply_prec(u, r);
    };
    auto finish = [&] {
        report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return result;
    };

    if (detail::norm2<Scalar>(b) == 0.0) {
        std::fill(x.begin(), x.end(), Scalar{});
        report.converged = true;
        report.residual_history = {0.0};
        report.true_residual_history = {0.0};
        return finish();
    }

    residual();
    const double r0 = detail::norm2<Scalar>(r);
    const double u0 = detail::norm2<Scalar>(u);
    report.residual_history.push_back(1.0);
    report.true_residual_history.push_back(1.0);
    if (r0 == 0.0) {
        report.converged = true;
        return finish();
    }
    double beta = r0;

    const std::size_t cycle_len = config.mode == GmresMode::full ? config.max_total_iters : config.restart;
    std::vector<std::vector<Scalar>> basis;
    std::vector<std::vector<Scalar>> hess;  // hess[k] is column k, length k+2
    std::vector<double> cs;
    std::vector<Scalar> sn, g;

    auto solve_update = [&](std::size_t k, std::vector<Scalar>& xk) {
        // back substitution on the rotated (k x k) triangle, then xk = x + V y
        std::vector<Scalar> y(k);
        for (std::size_t i = k; i-- > 0;) {
            Scalar acc = g[i];
            for (std::size_t j = i + 1; j < k; ++j) acc -= hess[j][i] * y[j];
            y[i] = acc / hess[i][i];
        }
        xk = x;
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) xk[i] += y[j] * basis[j][i];
        }
    };

    while (report.iterations < config.max_total_iters) {
        if (beta / r0 < config.rel_tol) {
            report.converged = true;
            break;
        }
        const std::size_t m = std::min(cycle_len, config.max_total_iters - report.iterations);
        basis.assign(1, std::vector<Scalar>(n));
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
        hess.clear();
        cs.assign(m, 0.0);
        sn.assign(m, Scalar{});
        g.assign(m + 1, Scalar{});
        g[0] = beta;

        std::size_t k_used = 0;
        bool breakdown = false;
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<Scalar> w(n);
            op(basis[k], tmp);
            apply_prec(tmp, w);
            ++report.iterations;

            std::vector<Scalar> h(k + 2, Scalar{});
            const double w_norm_in = detail::norm2<Scalar>(w);
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t i = 0; i <= k; ++i) {
                    const Scalar c = detail::dot<Scalar>(basis[i], w);
                    h[i] += c;
                    for (std::size_t j = 0; j < n; ++j) w[j] -= c * basis[i][j];
                }
                const double w_norm = detail::norm2<Scalar>(w);
                if (pass == 1 || w_norm == 0.0) break;
                double loss = 0.0;
                for (std::size_t i = 0; i <= k; ++i) {
                    loss = std::max(loss, abs(detail::dot<Scalar>(basis[i], w)) / w_norm);
                }
                if (loss <= 1e-8) break;
            }
            const double h_next = detail::norm2<Scalar>(w);
            h[k + 1] = h_next;
            breakdown = h_next <= 1e-14 * w_norm_in || h_next == 0.0;
            if (!breakdown) {
                for (auto& wj : w) wj /= h_next;
                basis.push_back(std::move(w));
            }

            for (std::size_t i = 0; i < k; ++i) {
                const Scalar t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -conj_of(sn[i]) * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            const double a_mod = abs(h[k]);
            const double rr = std::hypot(a_mod, h_next);
            if (a_mod == 0.0) {
                cs[k] = 0.0;
                sn[k] = Scalar{1.0};
                h[k] = h_next;
            } else {
                const Scalar phase = h[k] / a_mod;
                cs[k] = a_mod / rr;
                sn[k] = phase * (h_next / rr);
                h[k] = phase * rr;
            }
            h[k + 1] = Scalar{};
            g[k + 1] = -conj_of(sn[k]) * g[k];
            g[k] = cs[k] * g[k];
            hess.push_back(std::move(h));

            const double estimate = abs(g[k + 1]) / r0;
            report.residual_history.push_back(estimate);
            k_used = k + 1;
            if (config.track_true_residual) {
                std::vector<Scalar> xk;
                solve_update(k_used, xk);
                op(xk, tmp);
                for (std::size_t i = 0; i < n; ++i) u[i] = b[i] - tmp[i];
                report.true_residual_history.push_back(detail::norm2<Scalar>(u) / u0);
            } else {
                report.true_residual_history.push_back(std::numeric_limits<double>::quiet_NaN());
            }
            if (estimate < config.rel_tol || breakdown) break;
        }

        std::vector<Scalar> x_new;
        solve_update(k_used, x_new);
        x = std::move(x_new);
        residual();
        beta = detail::norm2<Scalar>(r);
        report.true_residual_history.back() = detail::norm2<Scalar>(u) / u0;
        if (beta / r0 < config.rel_tol) {
            report.converged = true;
            break;
        }
        if (breakdown) {
            // invariant subspace reached but the recomputed residual disagrees: rounding-limited
            break;
        }
        if (report.iterations < config.max_total_iters) ++report.restarts;
    }

    report.final_relative_residual = beta / r0;
    report.final_true_relative_residual = detail::norm2<Scalar>(u) / u0;
    return finish();
}

/// Runs non-restarted GMRES to `rel_tol` and returns the iteration count
/// (dimension + 1 if it never gets there).
template <class Scalar>
std::size_t full_gmres_iterations(const LinearMap<Scalar>& op, const LinearMap<Scalar>& precond,
                                  std::span<const Scalar> b, double rel_tol = 1e-12) {
    GmresConfig config;
    config.mode = GmresMode::full;
    config.rel_tol = rel_tol;
    config.max_total_iters = b.size() + 1;
    const auto result = gmres_solve<Scalar>(op, precond, b, {}, config);
    return result.report.converged ? result.report.iterations : b.size() + 1;
}

}  // namespace fdebvm
