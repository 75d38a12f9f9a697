#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fdebvm/grunwald.hpp"

namespace fdebvm {

using cplx = std::complex<double>;

/// Square Toeplitz matrix: entry (i,j) is first_col[i-j] for i >= j, else first_row[j-i].
struct ToeplitzMatrix {
    std::vector<double> first_col;
    std::vector<double> first_row;

    ToeplitzMatrix(std::vector<double> col, std::vector<double> row);
    std::size_t size() const { return first_col.size(); }
    double operator()(std::size_t i, std::size_t j) const {
        return i >= j ? first_col[i - j] : first_row[j - i];
    }
};

/// Real circulant matrix given by its first column; entry (i,j) = first_col[(i-j) mod n].
struct CirculantMatrix {
    std::vector<double> first_col;

    std::size_t size() const { return first_col.size(); }
    double operator()(std::size_t i, std::size_t j) const {
        const std::size_t n = first_col.size();
        return first_col[(i + n - j) % n];
    }
    /// First row; also the first column of the transpose.
    std::vector<double> first_row() const;
    CirculantMatrix transposed() const { return {first_row()}; }
};

/// t v through a circulant embedding of length 2N. Throws UsageError on mismatch.
std::vector<double> toeplitz_matvec(const ToeplitzMatrix& t, std::span<const double> v);

/// lambda_j = sum_r c_r w^{rj}, w = exp(2 pi i / n), j = 0..n-1.
std::vector<cplx> circulant_eigenvalues(const CirculantMatrix& c);

/// Forward-DFT symbol chat_j = sum_r c_r w^{-rj}: the multiplier of mode j when
/// products and solves are carried out with forward transforms. Same multiset
/// as circulant_eigenvalues, with the index order reversed modulo n.
std::vector<cplx> circulant_symbol(const CirculantMatrix& c);

std::vector<double> circulant_matvec(const CirculantMatrix& c, std::span<const double> v);

/// Relative modulus below which a circulant eigenvalue counts as zero.
inline constexpr double kSingularCirculantTol = 1e-14;

/// Solves c x = rhs by transform, scale, inverse transform. Throws SingularError
/// if some |eigenvalue| < kSingularCirculantTol * max |eigenvalue|.
std::vector<double> circulant_solve(const CirculantMatrix& c, std::span<const double> rhs);

/// Strang-type circulants (s(G_alpha), s(G_alpha^T)) of size n. The first column
/// of s(G_alpha) is [g_1, ..., g_m, 0, ..., 0, g_0] with m = floor((n+1)/2);
/// s(G_alpha^T) is its transpose. Throws UsageError for n < 3 or too few coefficients.
std::pair<CirculantMatrix, CirculantMatrix> strang_circulant_of_grunwald(const GrunwaldCoefficients& coeffs,
                                                                         std::size_t n);

}  // namespace fdebvm
