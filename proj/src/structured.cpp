#include "fdebvm/structured.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdebvm/errors.hpp"
#include "fdebvm/fft.hpp"

namespace fdebvm {

ToeplitzMatrix::ToeplitzMatrix(std::vector<double> col, std::vector<double> row)
    : first_col(std::move(col)), first_row(std::move(row)) {
    if (first_col.empty() || first_col.size() != first_row.size()) {
        throw UsageError("ToeplitzMatrix: first column and first row must be nonempty and of equal length");
    }
    if (first_col[0] != first_row[0]) throw UsageError("ToeplitzMatrix: first_row[0] must equal first_col[0]");
}

std::vector<double> CirculantMatrix::first_row() const {
    const std::size_t n = first_col.size();
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = first_col[(n - j) % n];
    return row;
}

std::vector<double> toeplitz_matvec(const ToeplitzMatrix& t, std::span<const double> v) {
    const std::size_t n = t.size();
    if (v.size() != n) throw UsageError("toeplitz_matvec: dimension mismatch");
    const std::size_t len = 2 * n;
    const auto plan = fft::cached_plan(len);

    std::vector<cplx> embed(len), work(len);
    for (std::size_t k = 0; k < n; ++k) embed[k] = t.first_col[k];
    for (std::size_t k = 1; k < n; ++k) embed[len - k] = t.first_row[k];
    std::copy(v.begin(), v.end(), work.begin());
    plan->execute(fft::Direction::forward, embed);
    plan->execute(fft::Direction::forward, work);
    for (std::size_t k = 0; k < len; ++k) work[k] *= embed[k];
    plan->execute(fft::Direction::backward, work);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = work[i].real() / static_cast<double>(len);
    return out;
}

namespace {

std::vector<cplx> transform(const CirculantMatrix& c, fft::Direction dir) {
    if (c.first_col.empty()) throw UsageError("circulant: empty first column");
    std::vector<cplx> out(c.first_col.begin(), c.first_col.end());
    fft::cached_plan(out.size())->execute(dir, out);
    return out;
}

}  // namespace

std::vector<cplx> circulant_eigenvalues(const CirculantMatrix& c) { return transform(c, fft::Direction::backward); }

std::vector<cplx> circulant_symbol(const CirculantMatrix& c) { return transform(c, fft::Direction::forward); }

std::vector<double> circulant_matvec(const CirculantMatrix& c, std::span<const double> v) {
    const std::size_t n = c.size();
    if (v.size() != n) throw UsageError("circulant_matvec: dimension mismatch");
    const auto symbol = circulant_symbol(c);
    std::vector<cplx> work(v.begin(), v.end());
    const auto plan = fft::cached_plan(n);
    plan->execute(fft::Direction::forward, work);
    for (std::size_t k = 0; k < n; ++k) work[k] *= symbol[k];
    plan->execute(fft::Direction::backward, work);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = work[i].real() / static_cast<double>(n);
    return out;
}

std::vector<double> circulant_solve(const CirculantMatrix& c, std::span<const double> rhs) {
    const std::size_t n = c.size();
    if (rhs.size() != n) throw UsageError("circulant_solve: dimension mismatch");
    const auto symbol = circulant_symbol(c);
    double max_mod = 0.0;
    for (const auto& z : symbol) max_mod = std::max(max_mod, std::abs(z));
    for (std::size_t k = 0; k < n; ++k) {
        if (!(std::abs(symbol[k]) >= kSingularCirculantTol * max_mod) || max_mod == 0.0) {
            throw SingularError("circulant_solve: eigenvalue " + std::to_string(k) + " is numerically zero");
        }
    }
    std::vector<cplx> work(rhs.begin(), rhs.end());
    const auto plan = fft::cached_plan(n);
    plan->execute(fft::Direction::forward, work);
    for (std::size_t k = 0; k < n; ++k) work[k] /= symbol[k];
    plan->execute(fft::Direction::backward, work);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = work[i].real() / static_cast<double>(n);
    return out;
}

std::pair<CirculantMatrix, CirculantMatrix> strang_circulant_of_grunwald(const GrunwaldCoefficients& coeffs,
                                                                         std::size_t n) {
    if (n < 3) throw UsageError("strang_circulant_of_grunwald: n must be >= 3");
    const std::size_t cutoff = (n + 1) / 2;
    if (coeffs.size() < cutoff + 1) {
        throw UsageError("strang_circulant_of_grunwald: need at least floor((n+1)/2)+1 coefficients");
    }
    CirculantMatrix lower{std::vector<double>(n, 0.0)};
    for (std::size_t k = 1; k <= cutoff; ++k) lower.first_col[k - 1] = coeffs[k];
    lower.first_col[n - 1] = coeffs[0];
    auto upper = lower.transposed();
    return {std::move(lower), std::move(upper)};
}

}  // namespace fdebvm
