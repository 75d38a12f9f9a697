#include "fdebvm/oracle.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fdebvm/errors.hpp"

namespace fdebvm::oracle {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const DenseSnapshot& a) {
    return {a.values.data(), static_cast<Eigen::Index>(a.n), static_cast<Eigen::Index>(a.n)};
}

double mean(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

}  // namespace

DenseSnapshot::DenseSnapshot(std::string label_, std::size_t n_, std::vector<double> values_)
    : label(std::move(label_)), n(n_), values(std::move(values_)) {
    if (n > kDenseGuard) {
        throw UsageError("dense oracle '" + label + "': dimension " + std::to_string(n) + " exceeds guard " +
                         std::to_string(kDenseGuard) + "; use smaller N or s");
    }
    if (values.size() != n * n) throw UsageError("dense oracle '" + label + "': expected n*n values");
}

DenseSnapshot DenseSnapshot::zeros(std::string label, std::size_t n) {
    if (n > kDenseGuard) return DenseSnapshot(std::move(label), n, {});  // throws
    return DenseSnapshot(std::move(label), n, std::vector<double>(n * n, 0.0));
}

DenseSnapshot DenseSnapshot::identity(std::string label, std::size_t n) {
    auto out = zeros(std::move(label), n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

std::vector<double> dense_solve(const DenseSnapshot& a, std::span<const double> rhs, DenseSolveInfo* info) {
    if (rhs.size() != a.n) throw UsageError("dense_solve: rhs length mismatch for '" + a.label + "'");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(view(a));
    const auto& packed = lu.matrixLU();
    double min_pivot = std::numeric_limits<double>::infinity();
    double max_pivot = 0.0;
    Eigen::Index min_at = 0;
    for (Eigen::Index i = 0; i < packed.rows(); ++i) {
        const double p = std::abs(packed(i, i));
        if (p < min_pivot) {
            min_pivot = p;
            min_at = i;
        }
        max_pivot = std::max(max_pivot, p);
    }
    const double rcond = a.n == 0 ? 1.0 : lu.rcond();
    if (a.n > 0 && (min_pivot == 0.0 || !(rcond > std::numeric_limits<double>::epsilon()))) {
        std::ostringstream msg;
        msg << "dense_solve: '" << a.label << "' is numerically singular (rcond " << rcond << ", smallest pivot "
            << min_pivot << " at position " << min_at << ", largest " << max_pivot << ")";
        throw SingularError(msg.str());
    }
    if (info != nullptr) {
        info->rcond = rcond;
        info->ill_conditioned = rcond < 1e-10;
        info->warning.clear();
        if (info->ill_conditioned) {
            std::ostringstream msg;
            msg << "ill-conditioned matrix '" << a.label << "': rcond " << rcond;
            info->warning = msg.str();
        }
    }
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXd x = lu.solve(b);
    return {x.data(), x.data() + x.size()};
}

std::vector<cplx> dense_eigenvalues(const DenseSnapshot& a) {
    const auto n = static_cast<lapack_int>(a.n);
    if (n == 0) return {};
    std::vector<double> work(a.values);
    std::vector<double> wr(a.n), wi(a.n);
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(), nullptr, n, nullptr, n);
    if (info != 0) {
        throw SolverError("dense_eigenvalues: dgeev failed on '" + a.label + "' (info " + std::to_string(info) + ")");
    }
    std::vector<cplx> out(a.n);
    for (std::size_t i = 0; i < a.n; ++i) out[i] = {wr[i], wi[i]};
    return out;
}

std::size_t numerical_rank(const DenseSnapshot& a, double rel_threshold) {
    if (a.n == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(view(a));
    const auto& sv = svd.singularValues();
    const double cut = rel_threshold * sv(0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cut) ++rank;
    }
    return rank;
}

DenseSnapshot multiply(const DenseSnapshot& a, const DenseSnapshot& b) {
    if (a.n != b.n) throw UsageError("multiply: size mismatch");
    auto out = DenseSnapshot::zeros(a.label + "*" + b.label, a.n);
    Eigen::Map<RowMatrix>(out.values.data(), static_cast<Eigen::Index>(a.n), static_cast<Eigen::Index>(a.n)) =
        view(a) * view(b);
    return out;
}

std::vector<double> multiply(const DenseSnapshot& a, std::span<const double> x) {
    if (x.size() != a.n) throw UsageError("multiply: vector length mismatch");
    std::vector<double> y(a.n, 0.0);
    for (std::size_t i = 0; i < a.n; ++i) {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < a.n; ++j) acc += static_cast<long double>(a(i, j)) * x[j];
        y[i] = static_cast<double>(acc);
    }
    return y;
}

DenseSnapshot solve_many(const DenseSnapshot& a, const DenseSnapshot& b) {
    if (a.n != b.n) throw UsageError("solve_many: size mismatch");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(view(a));
    auto out = DenseSnapshot::zeros(a.label + "\\" + b.label, a.n);
    Eigen::Map<RowMatrix>(out.values.data(), static_cast<Eigen::Index>(a.n), static_cast<Eigen::Index>(a.n)) =
        lu.solve(Eigen::MatrixXd(view(b)));
    return out;
}

DenseSnapshot kron(const DenseSnapshot& a, const DenseSnapshot& b) {
    auto out = DenseSnapshot::zeros(a.label + "(x)" + b.label, a.n * b.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t j = 0; j < a.n; ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < b.n; ++k) {
                for (std::size_t l = 0; l < b.n; ++l) out(i * b.n + k, j * b.n + l) = aij * b(k, l);
            }
        }
    }
    return out;
}

std::vector<double> binomial_weights(double alpha, std::size_t K) {
    std::vector<double> g(K + 1);
    long double prod = 1.0L;
    g[0] = 1.0;
    for (std::size_t k = 1; k <= K; ++k) {
        prod *= (static_cast<long double>(k) - 1.0L - alpha) / static_cast<long double>(k);
        g[k] = static_cast<double>(prod);
    }
    return g;
}

DenseSnapshot grunwald_matrix(double alpha, std::size_t n) {
    const auto g = binomial_weights(alpha, n);
    auto out = DenseSnapshot::zeros("G_alpha", n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= std::min(i + 1, n - 1); ++j) out(i, j) = g[i + 1 - j];
    }
    return out;
}

DenseSnapshot spatial_operator(double alpha, double dx, std::span<const double> d_plus,
                               std::span<const double> d_minus) {
    const std::size_t n = d_plus.size();
    if (d_minus.size() != n) throw UsageError("spatial_operator: coefficient lengths differ");
    const auto g = grunwald_matrix(alpha, n);
    const double scale = std::pow(dx, -alpha);
    auto out = DenseSnapshot::zeros("J_N", n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) = scale * (d_plus[i] * g(i, j) + d_minus[i] * g(j, i));
    }
    return out;
}

DenseSnapshot spatial_operator(const DiffusionProblem& problem, std::size_t n) {
    problem.validate();
    const double dx = (problem.x_right - problem.x_left) / static_cast<double>(n + 1);
    std::vector<double> dp(n), dm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = problem.x_left + static_cast<double>(i + 1) * dx;
        dp[i] = problem.d_plus(x);
        dm[i] = problem.d_minus(x);
    }
    return spatial_operator(problem.alpha, dx, dp, dm);
}

DenseSnapshot block_matrix(const DenseSnapshot& a, const DenseSnapshot& b, const DenseSnapshot& j, double h) {
    if (a.n != b.n) throw UsageError("block_matrix: A and B differ in size");
    auto out = kron(a, DenseSnapshot::identity("I", j.n));
    const auto bj = kron(b, j);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= h * bj.values[i];
    out.label = "M";
    return out;
}

DenseSnapshot block_matrix(const BlockSystem& sys) {
    const std::size_t m = sys.blocks();
    const DenseSnapshot a("A", m, sys.A.to_dense());
    const DenseSnapshot b("B", m, sys.B.to_dense());
    const auto j = spatial_operator(sys.op.alpha(), sys.op.dx(), sys.op.d_plus(), sys.op.d_minus());
    return block_matrix(a, b, j, sys.h);
}

DenseSnapshot circulant(std::span<const double> first_col) {
    const std::size_t n = first_col.size();
    auto out = DenseSnapshot::zeros("C", n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) = first_col[(i + n - j) % n];
    }
    return out;
}

DenseSnapshot stencil_circulant(std::span<const double> coeffs, std::size_t nu, std::size_t m) {
    if (m <= coeffs.size() - 1) throw UsageError("stencil_circulant: m must exceed mu");
    // row t holds coeffs[i] at column (t - nu + i) mod m
    auto out = DenseSnapshot::zeros("s(stencil)", m);
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t i = 0; i < coeffs.size(); ++i) out(t, (t + m + i - nu) % m) += coeffs[i];
    }
    return out;
}

DenseSnapshot shifted_circulant(const DenseSnapshot& c) {
    const std::size_t m = c.n;
    cplx last{0.0, 0.0};
    for (std::size_t r = 0; r < m; ++r) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(r * (m - 1) % m) / static_cast<double>(m);
        last += c(r, 0) * cplx(std::cos(angle), std::sin(angle));
    }
    auto out = c;
    const double shift = last.real() / static_cast<double>(m);
    for (double& v : out.values) v += shift;
    out.label = c.label + "~";
    return out;
}

DenseSnapshot operator_circulant(double alpha, double dx, double dbar_plus, double dbar_minus, std::size_t n) {
    const auto g = binomial_weights(alpha, n);
    const std::size_t half = (n + 1) / 2;
    std::vector<double> col(n, 0.0);
    for (std::size_t k = 1; k <= half; ++k) col[k - 1] = g[k];
    col[n - 1] += g[0];
    const auto sg = circulant(col);
    const double scale = std::pow(dx, -alpha);
    auto out = DenseSnapshot::zeros("s(J_N)", n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) = scale * (dbar_plus * sg(i, j) + dbar_minus * sg(j, i));
    }
    return out;
}

DenseSnapshot strang_block_matrix(const BlockSystem& sys) {
    const std::size_t m = sys.blocks();
    const auto sa = stencil_circulant(sys.scheme.main_alpha, sys.scheme.nu, m);
    const auto sb = stencil_circulant(sys.scheme.main_beta, sys.scheme.nu, m);
    const auto j = spatial_operator(sys.op.alpha(), sys.op.dx(), sys.op.d_plus(), sys.op.d_minus());
    auto out = block_matrix(sa, sb, j, sys.h);
    out.label = "S";
    return out;
}

DenseSnapshot bccb_matrix(const BlockSystem& sys, bool modified) {
    const std::size_t m = sys.blocks();
    auto sa = stencil_circulant(sys.scheme.main_alpha, sys.scheme.nu, m);
    if (modified) sa = shifted_circulant(sa);
    const auto sb = stencil_circulant(sys.scheme.main_beta, sys.scheme.nu, m);
    const auto sj =
        operator_circulant(sys.op.alpha(), sys.op.dx(), mean(sys.op.d_plus()), mean(sys.op.d_minus()), sys.n());
    auto out = block_matrix(sa, sb, sj, sys.h);
    out.label = modified ? "S2mod" : "S2";
    return out;
}

double multiset_distance(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const auto& x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t at = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(x - b[i]);
            if (d < best) {
                best = d;
                at = i;
            }
        }
        used[at] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

double relative_max_error(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw UsageError("relative_max_error: length mismatch");
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff = std::max(diff, std::abs(x[i] - y[i]));
        ref = std::max(ref, std::abs(y[i]));
    }
    return ref == 0.0 ? diff : diff / ref;
}

double relative_l2_error(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw UsageError("relative_l2_error: length mismatch");
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff += (x[i] - y[i]) * (x[i] - y[i]);
        ref += y[i] * y[i];
    }
    return ref == 0.0 ? std::sqrt(diff) : std::sqrt(diff / ref);
}

}  // namespace fdebvm::oracle
