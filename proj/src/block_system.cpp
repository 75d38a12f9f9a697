#include "fdebvm/block_system.hpp"

#include <algorithm>
#include <string>

#include "fdebvm/errors.hpp"

namespace fdebvm {
namespace {

// out_n += coef * z_m for every band entry (n, m) of mat
void banded_block_combine(const BandedMatrix& mat, std::size_t n_space, std::span<const double> z,
                          std::span<double> out) {
    for (std::size_t row = 0; row < mat.size(); ++row) {
        const auto& r = mat.row(row);
        double* dst = out.data() + row * n_space;
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            const double coef = r.values[k];
            if (coef == 0.0) continue;
            const double* src = z.data() + (r.start + k) * n_space;
            for (std::size_t i = 0; i < n_space; ++i) dst[i] += coef * src[i];
        }
    }
}

}  // namespace

BlockSystem assemble_block_system(const BvmScheme& scheme, const DiffusionProblem& problem, std::size_t n,
                                  std::size_t s) {
    if (s < scheme.mu + 1) throw UsageError("assemble_block_system: need s >= mu + 1");
    SpatialOperator op(problem, n);
    auto [a, b] = assemble_A_B(scheme, s);
    const double h = (problem.T - problem.t0) / static_cast<double>(s);

    std::vector<double> u0(n);
    for (std::size_t i = 0; i < n; ++i) u0[i] = problem.u0(problem.x_left + static_cast<double>(i + 1) * op.dx());

    std::vector<double> f;
    if (problem.source) {
        f.resize((s + 1) * n);
        for (std::size_t t = 0; t <= s; ++t) {
            const double time = problem.t0 + static_cast<double>(t) * h;
            for (std::size_t i = 0; i < n; ++i) {
                f[t * n + i] = problem.source(problem.x_left + static_cast<double>(i + 1) * op.dx(), time);
            }
        }
    }

    std::vector<double> rhs((s + 1) * n, 0.0);
    if (!f.empty()) {
        banded_block_combine(b, n, f, rhs);
        for (double& v : rhs) v *= h;
    }
    std::copy(u0.begin(), u0.end(), rhs.begin());

    return BlockSystem{scheme, s, h, problem.t0, std::move(op), std::move(a), std::move(b), std::move(rhs),
                       std::move(u0), std::move(f), false};
}

BlockSystem eliminate_initial_value(const BlockSystem& full) {
    if (full.initial_eliminated) throw UsageError("eliminate_initial_value: system is already reduced");
    const std::size_t n = full.n();
    const std::size_t s = full.s;
    std::vector<double> rhs(s * n, 0.0);

    // h (B (x) I) f restricted to rows 1..s
    std::copy(full.rhs.begin() + static_cast<std::ptrdiff_t>(n), full.rhs.end(), rhs.begin());

    const auto ju0 = full.op.apply(full.u0);
    for (std::size_t row = 1; row <= s; ++row) {
        const double a0 = full.A(row, 0);
        const double b0 = full.B(row, 0);
        if (a0 == 0.0 && b0 == 0.0) continue;
        double* dst = rhs.data() + (row - 1) * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] += -a0 * full.u0[i] + full.h * b0 * ju0[i];
    }

    BlockSystem reduced{full.scheme, full.s,        full.h,    full.t0,
                        full.op,     full.A.trailing_block(), full.B.trailing_block(),
                        std::move(rhs), full.u0,    full.f_samples, true};
    return reduced;
}

void apply_block_operator(const BlockSystem& sys, std::span<const double> z, std::span<double> out) {
    const std::size_t dim = sys.dim();
    if (z.size() != dim || out.size() != dim) {
        throw UsageError("apply_block_operator: expected vectors of length " + std::to_string(dim));
    }
    const std::size_t n = sys.n();
    std::fill(out.begin(), out.end(), 0.0);
    banded_block_combine(sys.A, n, z, out);

    std::vector<double> bz(dim, 0.0);
    banded_block_combine(sys.B, n, z, bz);
    std::vector<double> jw(n);
    for (std::size_t t = 0; t < sys.blocks(); ++t) {
        const std::span<const double> w(bz.data() + t * n, n);
        if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) continue;
        sys.op.apply(w, jw);
        double* dst = out.data() + t * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] -= sys.h * jw[i];
    }
}

std::vector<double> apply_block_operator(const BlockSystem& sys, std::span<const double> z) {
    std::vector<double> out(sys.dim());
    apply_block_operator(sys, z, out);
    return out;
}

std::vector<double> dense_materialize(const BlockSystem& sys) {
    const std::size_t dim = sys.dim();
    if (dim > kDenseGuard) {
        throw UsageError("dense_materialize: dimension " + std::to_string(dim) + " exceeds guard " +
                         std::to_string(kDenseGuard) + "; use smaller N or s");
    }
    const std::size_t n = sys.n();
    const auto j = sys.op.to_dense();
    std::vector<double> m(dim * dim, 0.0);
    for (std::size_t row = 0; row < sys.blocks(); ++row) {
        for (std::size_t col = 0; col < sys.blocks(); ++col) {
            const double a = sys.A(row, col);
            const double b = sys.B(row, col);
            if (a == 0.0 && b == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) {
                double* dst = m.data() + (row * n + i) * dim + col * n;
                for (std::size_t k = 0; k < n; ++k) dst[k] = -sys.h * b * j[i * n + k];
                dst[i] += a;
            }
        }
    }
    return m;
}

std::vector<double> expand_solution(const BlockSystem& sys, std::span<const double> x) {
    if (x.size() != sys.dim()) throw UsageError("expand_solution: dimension mismatch");
    if (!sys.initial_eliminated) return {x.begin(), x.end()};
    std::vector<double> out(sys.u0);
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

}  // namespace fdebvm
