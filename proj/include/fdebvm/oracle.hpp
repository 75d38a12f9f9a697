#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fdebvm/block_system.hpp"

namespace fdebvm::oracle {

using cplx = std::complex<double>;

/// Square real matrix, row-major, at most kDenseGuard rows.
struct DenseSnapshot {
    std::string label;
    std::size_t n = 0;
    std::vector<double> values;

    DenseSnapshot() = default;
    /// Throws UsageError if n > kDenseGuard or values.size() != n*n.
    DenseSnapshot(std::string label, std::size_t n, std::vector<double> values);
    static DenseSnapshot zeros(std::string label, std::size_t n);
    static DenseSnapshot identity(std::string label, std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

struct DenseSolveInfo {
    double rcond = 0.0;
    /// Set when rcond < 1e-10.
    bool ill_conditioned = false;
    std::string warning;
};

/// LU with partial pivoting. Throws SingularError (with the smallest pivot and
/// its position) when the matrix is numerically singular.
std::vector<double> dense_solve(const DenseSnapshot& a, std::span<const double> rhs, DenseSolveInfo* info = nullptr);

/// Full nonsymmetric spectrum (LAPACK dgeev). Throws SolverError naming the label
/// if the QR iteration does not converge.
std::vector<cplx> dense_eigenvalues(const DenseSnapshot& a);

/// Singular values > rel_threshold * sigma_max.
std::size_t numerical_rank(const DenseSnapshot& a, double rel_threshold);

DenseSnapshot multiply(const DenseSnapshot& a, const DenseSnapshot& b);
std::vector<double> multiply(const DenseSnapshot& a, std::span<const double> x);
/// Columns of a^{-1} b, solved column by column with one factorization.
DenseSnapshot solve_many(const DenseSnapshot& a, const DenseSnapshot& b);

/// Kronecker product; the result must fit the guard.
DenseSnapshot kron(const DenseSnapshot& a, const DenseSnapshot& b);

/// g_0..g_K as (-1)^k binom(alpha, k) = prod_{i=1}^{k} (i - 1 - alpha) / i in long double.
std::vector<double> binomial_weights(double alpha, std::size_t K);

/// Dense G_alpha: entry (i,j) = g_{i-j+1} for j <= i+1, else 0.
DenseSnapshot grunwald_matrix(double alpha, std::size_t n);

/// (1/dx^alpha)(diag(d_plus) G + diag(d_minus) G^T).
DenseSnapshot spatial_operator(double alpha, double dx, std::span<const double> d_plus,
                               std::span<const double> d_minus);

/// Same operator with the coefficients sampled from a problem on N interior nodes.
DenseSnapshot spatial_operator(const DiffusionProblem& problem, std::size_t n);

/// A (x) I - h B (x) J with A, B given densely.
DenseSnapshot block_matrix(const DenseSnapshot& a, const DenseSnapshot& b, const DenseSnapshot& j, double h);

/// The system matrix of a block system rebuilt through this module.
DenseSnapshot block_matrix(const BlockSystem& sys);

/// Entry (i,j) = first_col[(i-j) mod n].
DenseSnapshot circulant(std::span<const double> first_col);

/// Strang circulant of a BVM stencil with nu initial conditions on m time nodes.
DenseSnapshot stencil_circulant(std::span<const double> coeffs, std::size_t nu, std::size_t m);

/// c + (Re(lambda_{m-1}) / m) 1 1^T where lambda_{m-1} = sum_r c_r exp(-2 pi i r (m-1) / m):
/// moves the zero eigenvalue of a consistent circulant to Re(lambda_{m-1}).
DenseSnapshot shifted_circulant(const DenseSnapshot& c);

/// Strang circulant of J with averaged coefficients.
DenseSnapshot operator_circulant(double alpha, double dx, double dbar_plus, double dbar_minus, std::size_t n);

/// Dense S, S2 or S2mod for a block system.
DenseSnapshot strang_block_matrix(const BlockSystem& sys);
DenseSnapshot bccb_matrix(const BlockSystem& sys, bool modified);

/// Greedy nearest-neighbour matching of two spectra; returns the largest matched
/// distance (infinity if the sizes differ).
double multiset_distance(std::span<const cplx> a, std::span<const cplx> b);

/// max_i |x_i - y_i| / max_i |y_i|; and the 2-norm version.
double relative_max_error(std::span<const double> x, std::span<const double> y);
double relative_l2_error(std::span<const double> x, std::span<const double> y);

}  // namespace fdebvm::oracle
