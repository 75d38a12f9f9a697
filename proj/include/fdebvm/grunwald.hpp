#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fdebvm/fft.hpp"

namespace fdebvm {

/// Two-sided space-fractional diffusion problem
///
///   u_t = d_+(x) D_+^alpha u + d_-(x) D_-^alpha u + f(x,t),  x in (x_left, x_right), t in (t0, T]
///
/// with homogeneous Dirichlet boundaries and u(x, t0) = u0(x). Diffusion
/// coefficients are functions of x only; the semi-discrete operator is fixed in time.
struct DiffusionProblem {
    double alpha = 1.5;
    double x_left = 0.0;
    double x_right = 1.0;
    double t0 = 0.0;
    double T = 1.0;
    std::function<double(double)> d_plus;
    std::function<double(double)> d_minus;
    std::function<double(double, double)> source;  // f(x, t); empty means f == 0
    std::function<double(double)> u0;

    /// Throws DomainError when alpha, the interval or the time window is invalid,
    /// or UsageError when a required function is missing.
    void validate() const;
};

/// g_0..g_K of the shifted Gruenwald formula for a fixed alpha in (1,2).
struct GrunwaldCoefficients {
    double alpha = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
};

/// g_k = (-1)^k binom(alpha, k), k = 0..K, by the recurrence
/// g_{k+1} = (1 - (alpha+1)/(k+1)) g_k. Throws DomainError unless 1 < alpha < 2.
GrunwaldCoefficients grunwald_coefficients(double alpha, std::size_t K);

/// Gershgorin disc {z : |z - center| <= radius} of one row of J_N.
struct GershgorinDisc {
    double center = 0.0;
    double radius = 0.0;
};

/// Semi-discrete spatial operator
///
///   J_N = (1/dx^alpha) (D_+ G_alpha + D_- G_alpha^T)
///
/// on the interior nodes x_i = x_left + (i+1) dx, i = 0..N-1, dx = (x_right-x_left)/(N+1).
/// Only O(N) data is stored: the diagonals d_{+,i}, d_{-,i}, the coefficients
/// g_0..g_N, and the spectrum of a length-2N circulant embedding of G_alpha
/// used for O(N log N) products. Immutable; all members are reentrant.
class SpatialOperator {
public:
    /// d_+ and d_- are sampled at the interior nodes; the problem itself is not retained.
    SpatialOperator(const DiffusionProblem& problem, std::size_t n);
    /// Build directly from sampled diagonals (length n each).
    SpatialOperator(double alpha, double dx, std::vector<double> d_plus, std::vector<double> d_minus);

    std::size_t size() const { return n_; }
    double alpha() const { return coeffs_.alpha; }
    double dx() const { return dx_; }
    /// 1 / dx^alpha
    double scale() const { return scale_; }
    const GrunwaldCoefficients& coefficients() const { return coeffs_; }
    std::span<const double> d_plus() const { return d_plus_; }
    std::span<const double> d_minus() const { return d_minus_; }
    double d_plus_mean() const;
    double d_minus_mean() const;
    bool has_constant_coefficients() const;

    /// out = J_N v. Throws UsageError on length mismatch.
    void apply(std::span<const double> v, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> v) const;
    /// Complex input: J_N is real, so real and imaginary parts share one transform pair.
    void apply(std::span<const std::complex<double>> v, std::span<std::complex<double>> out) const;

    /// Entry p_ij (0-based) by the five-case formula. Throws UsageError when out of range.
    double entry(std::size_t i, std::size_t j) const;

    /// Row-major dense copy built from entry(); intended for small oracle checks
    /// and dense inner solves.
    std::vector<double> to_dense() const;

private:
    struct Samples {
        double alpha;
        double dx;
        std::vector<double> d_plus;
        std::vector<double> d_minus;
    };
    static Samples sample_problem(const DiffusionProblem& problem, std::size_t n);
    explicit SpatialOperator(Samples samples);
    void init_transform();

    std::size_t n_;
    double dx_;
    double scale_;
    GrunwaldCoefficients coeffs_;
    std::vector<double> d_plus_;
    std::vector<double> d_minus_;
    std::shared_ptr<const fft::Plan1d> plan_;
    // forward DFT of the length-2N embedding whose leading N x N block is G_alpha
    std::vector<std::complex<double>> embed_symbol_;
};

SpatialOperator build_spatial_operator(const DiffusionProblem& problem, std::size_t n);

std::vector<double> apply_spatial_operator(const SpatialOperator& op, std::span<const double> v);

double operator_entry(const SpatialOperator& op, std::size_t i, std::size_t j);

/// One disc per row; centers (r_+ + r_-) g_1 and radii sum_{j != i} |p_ij|.
std::vector<GershgorinDisc> gershgorin_discs(const SpatialOperator& op);

/// (1/dx^alpha)(d_+ + d_-) sum_{k=-1}^{K} |g_{k+1}| for a constant-coefficient
/// operator; tends to 2 alpha (d_+ + d_-)/dx^alpha. Throws UnsupportedError for
/// variable coefficients.
double wiener_partial_sum(const SpatialOperator& op, std::size_t K);

/// Limit of wiener_partial_sum as K -> infinity.
double wiener_limit(const SpatialOperator& op);

}  // namespace fdebvm
