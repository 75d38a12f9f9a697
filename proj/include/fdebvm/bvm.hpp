#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fdebvm {

/// One linear multistep formula sum_i alpha_i u_{i} = h sum_i beta_i g_{i} on
/// mu+1 consecutive nodes (local indices 0..mu).
struct StencilRow {
    std::vector<double> alpha;
    std::vector<double> beta;
};

/// A mu-step boundary value method: the main formula (used with nu initial and
/// mu-nu final conditions) plus the auxiliary formulas that close the system.
///
/// initial_aux[j-1] is the formula for step j = 1..nu-1 on nodes 0..mu.
/// final_aux[l] is the formula for the step at local index nu+1+l on the last
/// mu+1 nodes, i.e. for n = s-mu+nu+1+l.
struct BvmScheme {
    std::size_t mu = 0;
    std::size_t nu = 0;
    std::vector<double> main_alpha;
    std::vector<double> main_beta;
    std::vector<StencilRow> initial_aux;
    std::vector<StencilRow> final_aux;
    std::size_t order = 0;
};

/// GAM main method: alpha_nu = 1, alpha_{nu-1} = -1, beta from the order
/// conditions of order mu+1 (solved exactly in rationals). Requires 1 <= nu <= mu <= 8.
std::pair<std::vector<double>, std::vector<double>> derive_main_method(std::size_t mu, std::size_t nu);

/// Complete GAM scheme: main method plus one-step-difference auxiliary formulas,
/// all of order mu+1.
BvmScheme derive_gam_scheme(std::size_t mu, std::size_t nu);

/// Fill in initial/final auxiliary formulas for a scheme whose main method is set.
BvmScheme derive_auxiliary_methods(BvmScheme scheme);

/// Moment residual max_q |sum a_i x_i^q - q sum b_i x_i^{q-1}| for q = 0..order
/// (q = 0 checks sum a_i) on nodes 0..mu.
double order_condition_residual(const StencilRow& row, std::size_t order);

/// Square matrix stored row by row as a contiguous band [start, start + values.size()).
class BandedMatrix {
public:
    struct Row {
        std::size_t start = 0;
        std::vector<double> values;
    };

    explicit BandedMatrix(std::size_t n) : rows_(n) {}

    std::size_t size() const { return rows_.size(); }
    const Row& row(std::size_t i) const { return rows_[i]; }
    void set_row(std::size_t i, std::size_t start, std::vector<double> values);
    double operator()(std::size_t i, std::size_t j) const;
    std::size_t bandwidth() const;
    /// Row-major dense copy.
    std::vector<double> to_dense() const;
    /// Drops the first row and first column.
    BandedMatrix trailing_block() const;

private:
    std::vector<Row> rows_;
};

/// (s+1) x (s+1) matrices A and B: row 0 is the initial condition (e_1 in A,
/// zero in B), rows 1..nu-1 the initial auxiliary formulas, rows nu..s-mu+nu the
/// sliding main formula and the last mu-nu rows the final auxiliary formulas.
/// Throws UsageError if s < mu + 1.
std::pair<BandedMatrix, BandedMatrix> assemble_A_B(const BvmScheme& scheme, std::size_t s);

/// rho(z) = sum_i alpha_i z^i and sigma(z) = sum_i beta_i z^i (ascending powers).
struct CharacteristicPolynomials {
    std::vector<double> rho;
    std::vector<double> sigma;

    std::complex<double> rho_at(std::complex<double> z) const;
    std::complex<double> sigma_at(std::complex<double> z) const;
    double rho_derivative_at_one() const;
};

CharacteristicPolynomials characteristic_polynomials(const BvmScheme& scheme);

/// Width of the annulus around |z| = 1 treated as "on the circle".
inline constexpr double kRootCircleTol = 1e-10;

/// True iff rho - q sigma has exactly nu roots with |z| < 1 - eps and mu - nu
/// roots with |z| > 1 + eps. Roots lost to a vanishing leading coefficient count
/// as outside (at infinity).
bool stability_region_membership(const BvmScheme& scheme, std::complex<double> q);

struct StabilityGridReport {
    std::size_t points = 0;
    std::size_t failures = 0;
    std::complex<double> first_failure{};
    bool passed() const { return failures == 0; }
};

/// Samples the left half-plane: Re(q) log-spaced in [-1e3, -1e-3], Im(q) linear
/// in [-1e3, 1e3], grid x grid points.
StabilityGridReport stability_grid_test(const BvmScheme& scheme, std::size_t grid = 40);

/// Derives the candidate GAMs for mu (nu around mu/2) and returns the one whose
/// grid test passes (smallest nu if several). Throws SolverError if none does.
BvmScheme select_stable_gam(std::size_t mu);

/// The fifth-order GAM (mu = 4) selected by the stability grid.
const BvmScheme& default_scheme();

/// Integrates y' = lambda y, y(0) = y0 over [0, T] with s steps by solving the
/// full (s+1) x (s+1) BVM system (A - h lambda B) y = e_1 y0 directly.
std::vector<double> integrate_test_equation(const BvmScheme& scheme, double lambda, double y0, double T,
                                            std::size_t s);

}  // namespace fdebvm
