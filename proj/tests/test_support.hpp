#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fdebvm/grunwald.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, lo, hi);
    return v;
}

inline std::vector<std::complex<double>> random_complex_vector(Rng& rng, std::size_t n) {
    std::vector<std::complex<double>> v(n);
    for (auto& x : v) x = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    return v;
}

inline double norm2(std::span<const double> v) {
    long double acc = 0.0L;
    for (double x : v) acc += static_cast<long double>(x) * x;
    return static_cast<double>(std::sqrt(acc));
}

inline double rel_l2(std::span<const double> x, std::span<const double> ref) {
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double d = static_cast<long double>(x[i]) - ref[i];
        num += d * d;
        den += static_cast<long double>(ref[i]) * ref[i];
    }
    return den == 0.0L ? static_cast<double>(std::sqrt(num)) : static_cast<double>(std::sqrt(num / den));
}

/// Dense row-major product in long double.
inline std::vector<double> dense_matvec(std::span<const double> a, std::size_t n, std::span<const double> x) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < n; ++j) acc += static_cast<long double>(a[i * n + j]) * x[j];
        y[i] = static_cast<double>(acc);
    }
    return y;
}

/// Admissible random coefficients: d_+, d_- >= 0 with d_+ + d_- > 0 at every node,
/// occasionally one of them zero.
inline fdebvm::SpatialOperator random_operator(Rng& rng, std::size_t n, double alpha) {
    std::vector<double> dp(n), dm(n);
    const int mode = static_cast<int>(rng() % 4);
    for (std::size_t i = 0; i < n; ++i) {
        dp[i] = mode == 1 ? 0.0 : uniform(rng, 0.0, 2.0);
        dm[i] = mode == 2 ? 0.0 : uniform(rng, 0.0, 2.0);
        if (dp[i] + dm[i] == 0.0) dp[i] = 0.5;
    }
    const double dx = uniform(rng, 0.01, 1.0);
    return fdebvm::SpatialOperator(alpha, dx, std::move(dp), std::move(dm));
}

inline fdebvm::DiffusionProblem constant_problem(double alpha, double dp, double dm, double xl, double xr) {
    fdebvm::DiffusionProblem p;
    p.alpha = alpha;
    p.x_left = xl;
    p.x_right = xr;
    p.d_plus = [dp](double) { return dp; };
    p.d_minus = [dm](double) { return dm; };
    p.u0 = [](double x) { return std::sin(x); };
    return p;
}

}  // namespace testing
