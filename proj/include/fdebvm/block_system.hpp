#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fdebvm/bvm.hpp"
#include "fdebvm/grunwald.hpp"

namespace fdebvm {

/// All-at-once BVM discretization
///
///   M u = (A (x) I_N - h B (x) J_N) u = e_1 (x) u_0 + h (B (x) I_N) f
///
/// with time-major unknowns u = (u_0^T, ..., u_s^T)^T. In the reduced form the
/// known block u_0 is eliminated: the unknowns are u_1..u_s, A and B lose their
/// first row and column, and the column that multiplied u_0 moves to the
/// right-hand side. Both forms have the same solution; the reduced one is what
/// the preconditioned benchmarks solve.
struct BlockSystem {
    BvmScheme scheme;
    std::size_t s = 0;
    double h = 0.0;
    double t0 = 0.0;
    SpatialOperator op;
    BandedMatrix A;
    BandedMatrix B;
    std::vector<double> rhs;
    std::vector<double> u0;
    /// f(x_i, t_n) for n = 0..s, row-major (s+1) x N; empty when f == 0
    std::vector<double> f_samples;
    bool initial_eliminated = false;

    std::size_t n() const { return op.size(); }
    /// Number of time blocks (s+1 full, s reduced).
    std::size_t blocks() const { return A.size(); }
    std::size_t dim() const { return blocks() * n(); }
};

/// Throws UsageError when s < mu + 1 or N < 2; problem errors propagate.
BlockSystem assemble_block_system(const BvmScheme& scheme, const DiffusionProblem& problem, std::size_t n,
                                  std::size_t s);

/// Reduced form of a full system (see BlockSystem). Throws UsageError if already reduced.
BlockSystem eliminate_initial_value(const BlockSystem& full);

/// out = M z using the banded A, B and fast J_N products.
void apply_block_operator(const BlockSystem& sys, std::span<const double> z, std::span<double> out);
std::vector<double> apply_block_operator(const BlockSystem& sys, std::span<const double> z);

/// Largest dimension any dense materialization may have.
inline constexpr std::size_t kDenseGuard = 4096;

/// Row-major dense M; throws UsageError above kDenseGuard.
std::vector<double> dense_materialize(const BlockSystem& sys);

/// Full-length time-major solution (prepends u_0 for a reduced system).
std::vector<double> expand_solution(const BlockSystem& sys, std::span<const double> x);

}  // namespace fdebvm
