#include "fdebvm/bvm.hpp"

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "fdebvm/errors.hpp"

namespace fdebvm {
namespace {

using Rational = boost::rational<long long>;

Rational ipow(long long base, std::size_t e) {
    Rational r{1};
    for (std::size_t k = 0; k < e; ++k) r *= base;
    return r;
}

// beta on nodes 0..mu such that sum_i alpha_i i^q = q sum_i beta_i i^{q-1}, q = 1..mu+1.
std::vector<double> solve_beta(const std::vector<long long>& alpha) {
    const std::size_t n = alpha.size();
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t q = row + 1;
        for (std::size_t i = 0; i < n; ++i) m[row][i] = Rational(static_cast<long long>(q)) * ipow(i, q - 1);
        Rational rhs{0};
        for (std::size_t i = 0; i < n; ++i) rhs += alpha[i] * ipow(i, q);
        m[row][n] = rhs;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col].numerator() == 0) ++pivot;
        if (pivot == n) throw SolverError("order-condition system is singular");
        std::swap(m[col], m[pivot]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || m[row][col].numerator() == 0) continue;
            const Rational factor = m[row][col] / m[col][col];
            for (std::size_t k = col; k <= n; ++k) m[row][k] -= factor * m[col][k];
        }
    }
    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Rational b = m[i][n] / m[i][i];
        beta[i] = static_cast<double>(b.numerator()) / static_cast<double>(b.denominator());
    }
    return beta;
}

// One-step difference u_k - u_{k-1} on nodes 0..mu, beta of order mu+1.
StencilRow difference_row(std::size_t mu, std::size_t k) {
    std::vector<long long> a(mu + 1, 0);
    a[k] = 1;
    a[k - 1] = -1;
    StencilRow row;
    row.alpha.assign(a.begin(), a.end());
    row.beta = solve_beta(a);
    return row;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> derive_main_method(std::size_t mu, std::size_t nu) {
    if (nu < 1 || nu > mu) throw UsageError("derive_main_method: need 1 <= nu <= mu");
    // exact rationals stay within 64 bits up to here
    if (mu > 8) throw UsageError("derive_main_method: mu > 8 not supported");
    auto row = difference_row(mu, nu);
    return {std::move(row.alpha), std::move(row.beta)};
}

BvmScheme derive_auxiliary_methods(BvmScheme scheme) {
    if (scheme.main_alpha.size() != scheme.mu + 1) {
        throw UsageError("derive_auxiliary_methods: main method not derived");
    }
    scheme.initial_aux.clear();
    scheme.final_aux.clear();
    for (std::size_t j = 1; j < scheme.nu; ++j) scheme.initial_aux.push_back(difference_row(scheme.mu, j));
    for (std::size_t k = scheme.nu + 1; k <= scheme.mu; ++k) scheme.final_aux.push_back(difference_row(scheme.mu, k));
    scheme.order = scheme.mu + 1;
    return scheme;
}

BvmScheme derive_gam_scheme(std::size_t mu, std::size_t nu) {
    BvmScheme scheme;
    scheme.mu = mu;
    scheme.nu = nu;
    std::tie(scheme.main_alpha, scheme.main_beta) = derive_main_method(mu, nu);
    return derive_auxiliary_methods(std::move(scheme));
}

double order_condition_residual(const StencilRow& row, std::size_t order) {
    double worst = 0.0;
    double sum_a = 0.0;
    for (double a : row.alpha) sum_a += a;
    worst = std::abs(sum_a);
    for (std::size_t q = 1; q <= order; ++q) {
        double lhs = 0.0;
        double rhs = 0.0;
        for (std::size_t i = 0; i < row.alpha.size(); ++i) {
            const double x = static_cast<double>(i);
            lhs += row.alpha[i] * std::pow(x, static_cast<double>(q));
            rhs += static_cast<double>(q) * row.beta[i] * (q == 1 ? 1.0 : std::pow(x, static_cast<double>(q - 1)));
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

void BandedMatrix::set_row(std::size_t i, std::size_t start, std::vector<double> values) {
    if (i >= rows_.size() || start + values.size() > rows_.size()) {
        throw UsageError("BandedMatrix::set_row: band exceeds matrix");
    }
    rows_[i] = Row{start, std::move(values)};
}

double BandedMatrix::operator()(std::size_t i, std::size_t j) const {
    const auto& r = rows_.at(i);
    if (j < r.start || j >= r.start + r.values.size()) return 0.0;
    return r.values[j - r.start];
}

std::size_t BandedMatrix::bandwidth() const {
    std::size_t w = 0;
    for (const auto& r : rows_) w = std::max(w, r.values.size());
    return w;
}

std::vector<double> BandedMatrix::to_dense() const {
    const std::size_t n = size();
    std::vector<double> dense(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows_[i];
        for (std::size_t k = 0; k < r.values.size(); ++k) dense[i * n + r.start + k] = r.values[k];
    }
    return dense;
}

BandedMatrix BandedMatrix::trailing_block() const {
    if (size() < 2) throw UsageError("BandedMatrix::trailing_block: matrix too small");
    BandedMatrix out(size() - 1);
    for (std::size_t i = 1; i < size(); ++i) {
        const auto& r = rows_[i];
        if (r.values.empty()) continue;
        if (r.start == 0) {
            out.rows_[i - 1] = Row{0, std::vector<double>(r.values.begin() + 1, r.values.end())};
        } else {
            out.rows_[i - 1] = Row{r.start - 1, r.values};
        }
    }
    return out;
}

std::pair<BandedMatrix, BandedMatrix> assemble_A_B(const BvmScheme& scheme, std::size_t s) {
    const std::size_t mu = scheme.mu;
    const std::size_t nu = scheme.nu;
    if (s < mu + 1) throw UsageError("assemble_A_B: need s >= mu + 1, got s = " + std::to_string(s));
    if (scheme.initial_aux.size() + 1 != nu || scheme.final_aux.size() != mu - nu) {
        throw UsageError("assemble_A_B: scheme has inconsistent auxiliary formulas");
    }
    BandedMatrix a(s + 1), b(s + 1);
    a.set_row(0, 0, {1.0});
    for (std::size_t j = 1; j < nu; ++j) {
        a.set_row(j, 0, scheme.initial_aux[j - 1].alpha);
        b.set_row(j, 0, scheme.initial_aux[j - 1].beta);
    }
    for (std::size_t n = nu; n <= s - mu + nu; ++n) {
        a.set_row(n, n - nu, scheme.main_alpha);
        b.set_row(n, n - nu, scheme.main_beta);
    }
    for (std::size_t l = 0; l < scheme.final_aux.size(); ++l) {
        const std::size_t n = s - mu + nu + 1 + l;
        a.set_row(n, s - mu, scheme.final_aux[l].alpha);
        b.set_row(n, s - mu, scheme.final_aux[l].beta);
    }
    return {std::move(a), std::move(b)};
}

namespace {

std::complex<double> horner(const std::vector<double>& c, std::complex<double> z) {
    std::complex<double> acc{0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

}  // namespace

std::complex<double> CharacteristicPolynomials::rho_at(std::complex<double> z) const { return horner(rho, z); }

std::complex<double> CharacteristicPolynomials::sigma_at(std::complex<double> z) const { return horner(sigma, z); }

double CharacteristicPolynomials::rho_derivative_at_one() const {
    double d = 0.0;
    for (std::size_t i = 1; i < rho.size(); ++i) d += static_cast<double>(i) * rho[i];
    return d;
}

CharacteristicPolynomials characteristic_polynomials(const BvmScheme& scheme) {
    return {scheme.main_alpha, scheme.main_beta};
}

bool stability_region_membership(const BvmScheme& scheme, std::complex<double> q) {
    const std::size_t mu = scheme.mu;
    std::vector<std::complex<double>> c(mu + 1);
    double scale = 0.0;
    for (std::size_t i = 0; i <= mu; ++i) {
        c[i] = scheme.main_alpha[i] - q * scheme.main_beta[i];
        scale = std::max(scale, std::abs(c[i]));
    }
    if (scale == 0.0) return false;
    std::size_t degree = mu;
    while (degree > 0 && std::abs(c[degree]) <= 1e-14 * scale) --degree;

    std::size_t inside = 0;
    std::size_t outside = mu - degree;  // roots at infinity
    if (degree > 0) {
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
        for (std::size_t i = 0; i < degree; ++i) companion(0, i) = -c[degree - 1 - i] / c[degree];
        for (std::size_t i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
        if (solver.info() != Eigen::Success) throw SolverError("stability_region_membership: root finding failed");
        for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
            const double r = std::abs(solver.eigenvalues()[k]);
            if (r < 1.0 - kRootCircleTol) {
                ++inside;
            } else if (r > 1.0 + kRootCircleTol) {
                ++outside;
            }
        }
    }
    return inside == scheme.nu && outside == mu - scheme.nu;
}

StabilityGridReport stability_grid_test(const BvmScheme& scheme, std::size_t grid) {
    StabilityGridReport report;
    const double log_lo = std::log10(1e-3);
    const double log_hi = std::log10(1e3);
    for (std::size_t a = 0; a < grid; ++a) {
        const double t = grid > 1 ? static_cast<double>(a) / static_cast<double>(grid - 1) : 0.0;
        const double re = -std::pow(10.0, log_lo + t * (log_hi - log_lo));
        for (std::size_t b = 0; b < grid; ++b) {
            const double u = grid > 1 ? static_cast<double>(b) / static_cast<double>(grid - 1) : 0.5;
            const double im = -1e3 + 2e3 * u;
            ++report.points;
            if (!stability_region_membership(scheme, {re, im})) {
                if (report.failures == 0) report.first_failure = {re, im};
                ++report.failures;
            }
        }
    }
    return report;
}

BvmScheme select_stable_gam(std::size_t mu) {
    if (mu < 1) throw UsageError("select_stable_gam: mu must be >= 1");
    const std::size_t first = std::max<std::size_t>(1, mu / 2);
    for (std::size_t nu = first; nu <= std::min(mu, mu / 2 + 1); ++nu) {
        auto scheme = derive_gam_scheme(mu, nu);
        if (stability_grid_test(scheme).passed()) return scheme;
    }
    throw SolverError("select_stable_gam: no candidate nu passes the stability grid for mu = " + std::to_string(mu));
}

const BvmScheme& default_scheme() {
    static const BvmScheme scheme = select_stable_gam(4);
    return scheme;
}

std::vector<double> integrate_test_equation(const BvmScheme& scheme, double lambda, double y0, double T,
                                            std::size_t s) {
    const auto [a, b] = assemble_A_B(scheme, s);
    const double h = T / static_cast<double>(s);
    const Eigen::Index n = static_cast<Eigen::Index>(s + 1);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
                      h * lambda * b(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = y0;
    const Eigen::VectorXd y = m.partialPivLu().solve(rhs);
    return {y.data(), y.data() + y.size()};
}

}  // namespace fdebvm
