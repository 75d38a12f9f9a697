#include "fdebvm/grunwald.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fdebvm/errors.hpp"

namespace fdebvm {

using cplx = std::complex<double>;

void DiffusionProblem::validate() const {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw DomainError("DiffusionProblem: alpha must lie in (1,2), got " + std::to_string(alpha));
    }
    if (!(x_left < x_right)) throw DomainError("DiffusionProblem: x_left must be < x_right");
    if (!(t0 < T)) throw DomainError("DiffusionProblem: t0 must be < T");
    if (!d_plus || !d_minus) throw UsageError("DiffusionProblem: d_plus and d_minus are required");
    if (!u0) throw UsageError("DiffusionProblem: u0 is required");
}

GrunwaldCoefficients grunwald_coefficients(double alpha, std::size_t K) {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw DomainError("grunwald_coefficients: alpha must lie in (1,2), got " + std::to_string(alpha));
    }
    GrunwaldCoefficients g{alpha, std::vector<double>(K + 1)};
    g.values[0] = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
        g.values[k + 1] = (1.0 - (alpha + 1.0) / static_cast<double>(k + 1)) * g.values[k];
    }
    return g;
}

namespace {

std::vector<double> sample_interior(const std::function<double(double)>& fn, double x_left, double dx,
                                    std::size_t n, const char* name) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = fn(x_left + static_cast<double>(i + 1) * dx);
        if (!std::isfinite(out[i])) throw DomainError(std::string(name) + " is not finite at a grid node");
    }
    return out;
}

}  // namespace

SpatialOperator::Samples SpatialOperator::sample_problem(const DiffusionProblem& problem, std::size_t n) {
    problem.validate();
    if (n < 2) throw UsageError("SpatialOperator: N must be >= 2");
    const double dx = (problem.x_right - problem.x_left) / static_cast<double>(n + 1);
    return {problem.alpha, dx, sample_interior(problem.d_plus, problem.x_left, dx, n, "d_plus"),
            sample_interior(problem.d_minus, problem.x_left, dx, n, "d_minus")};
}

SpatialOperator::SpatialOperator(const DiffusionProblem& problem, std::size_t n)
    : SpatialOperator(sample_problem(problem, n)) {}

SpatialOperator::SpatialOperator(Samples samples)
    : SpatialOperator(samples.alpha, samples.dx, std::move(samples.d_plus), std::move(samples.d_minus)) {}

SpatialOperator::SpatialOperator(double alpha, double dx, std::vector<double> d_plus, std::vector<double> d_minus)
    : n_(d_plus.size()),
      dx_(dx),
      scale_(std::pow(dx, -alpha)),
      coeffs_(grunwald_coefficients(alpha, d_plus.size())),
      d_plus_(std::move(d_plus)),
      d_minus_(std::move(d_minus)) {
    if (n_ < 2) throw UsageError("SpatialOperator: N must be >= 2");
    if (d_minus_.size() != n_) throw UsageError("SpatialOperator: d_plus and d_minus lengths differ");
    if (!(dx_ > 0.0)) throw DomainError("SpatialOperator: dx must be positive");
    bool any_positive = false;
    for (std::size_t i = 0; i < n_; ++i) {
        if (d_plus_[i] < 0.0 || d_minus_[i] < 0.0) {
            throw DomainError("SpatialOperator: negative diffusion coefficient at node " + std::to_string(i));
        }
        any_positive = any_positive || d_plus_[i] + d_minus_[i] > 0.0;
    }
    if (!any_positive) throw DomainError("SpatialOperator: d_plus + d_minus vanishes on the whole grid");
    init_transform();
}

void SpatialOperator::init_transform() {
    const std::size_t len = 2 * n_;
    plan_ = fft::cached_plan(len);
    // first column g_1..g_N, first row g_1, g_0, 0, ...; wrapped row goes to the tail
    embed_symbol_.assign(len, cplx{});
    for (std::size_t k = 0; k < n_; ++k) embed_symbol_[k] = coeffs_[k + 1];
    embed_symbol_[len - 1] = coeffs_[0];
    plan_->execute(fft::Direction::forward, embed_symbol_);
}

double SpatialOperator::d_plus_mean() const {
    return std::accumulate(d_plus_.begin(), d_plus_.end(), 0.0) / static_cast<double>(n_);
}

double SpatialOperator::d_minus_mean() const {
    return std::accumulate(d_minus_.begin(), d_minus_.end(), 0.0) / static_cast<double>(n_);
}

bool SpatialOperator::has_constant_coefficients() const {
    auto constant = [](const std::vector<double>& d) {
        return std::all_of(d.begin(), d.end(), [&](double x) { return x == d.front(); });
    };
    return constant(d_plus_) && constant(d_minus_);
}

void SpatialOperator::apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != n_ || out.size() != n_) {
        throw UsageError("apply_spatial_operator: expected vectors of length " + std::to_string(n_));
    }
    const std::size_t len = 2 * n_;
    std::vector<cplx> work(len);
    std::copy(v.begin(), v.end(), work.begin());
    plan_->execute(fft::Direction::forward, work);
    // v is real, so G v and G^T v come back as the real and imaginary parts of a single inverse transform
    const cplx i_unit{0.0, 1.0};
    for (std::size_t k = 0; k < len; ++k) {
        work[k] *= embed_symbol_[k] + i_unit * std::conj(embed_symbol_[k]);
    }
    plan_->execute(fft::Direction::backward, work);
    const double norm = scale_ / static_cast<double>(len);
    for (std::size_t i = 0; i < n_; ++i) {
        out[i] = norm * (d_plus_[i] * work[i].real() + d_minus_[i] * work[i].imag());
    }
}

std::vector<double> SpatialOperator::apply(std::span<const double> v) const {
    std::vector<double> out(n_);
    apply(v, out);
    return out;
}

void SpatialOperator::apply(std::span<const cplx> v, std::span<cplx> out) const {
    if (v.size() != n_ || out.size() != n_) {
        throw UsageError("apply_spatial_operator: expected vectors of length " + std::to_string(n_));
    }
    const std::size_t len = 2 * n_;
    std::vector<cplx> lower(len), upper(len);
    std::copy(v.begin(), v.end(), lower.begin());
    plan_->execute(fft::Direction::forward, lower);
    for (std::size_t k = 0; k < len; ++k) {
        upper[k] = lower[k] * std::conj(embed_symbol_[k]);
        lower[k] *= embed_symbol_[k];
    }
    plan_->execute(fft::Direction::backward, lower);
    plan_->execute(fft::Direction::backward, upper);
    const double norm = scale_ / static_cast<double>(len);
    for (std::size_t i = 0; i < n_; ++i) {
        out[i] = norm * (d_plus_[i] * lower[i] + d_minus_[i] * upper[i]);
    }
}

double SpatialOperator::entry(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw UsageError("operator_entry: index out of range");
    const double rp = scale_ * d_plus_[i];
    const double rm = scale_ * d_minus_[i];
    const auto& g = coeffs_.values;
    if (j == i) return (rp + rm) * g[1];
    if (j + 1 == i) return rp * g[2] + rm * g[0];
    if (j == i + 1) return rp * g[0] + rm * g[2];
    if (j < i) return rp * g[i - j + 1];
    return rm * g[j - i + 1];
}

std::vector<double> SpatialOperator::to_dense() const {
    std::vector<double> dense(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) dense[i * n_ + j] = entry(i, j);
    }
    return dense;
}

SpatialOperator build_spatial_operator(const DiffusionProblem& problem, std::size_t n) {
    return SpatialOperator(problem, n);
}

std::vector<double> apply_spatial_operator(const SpatialOperator& op, std::span<const double> v) {
    return op.apply(v);
}

double operator_entry(const SpatialOperator& op, std::size_t i, std::size_t j) { return op.entry(i, j); }

std::vector<GershgorinDisc> gershgorin_discs(const SpatialOperator& op) {
    const std::size_t n = op.size();
    std::vector<GershgorinDisc> discs(n);
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) radius += std::abs(op.entry(i, j));
        }
        discs[i] = {op.entry(i, i), radius};
    }
    return discs;
}

double wiener_partial_sum(const SpatialOperator& op, std::size_t K) {
    if (!op.has_constant_coefficients()) {
        throw UnsupportedError("wiener_partial_sum: requires constant diffusion coefficients");
    }
    const auto g = grunwald_coefficients(op.alpha(), K + 1);
    double sum = 0.0;
    double carry = 0.0;  // Neumaier compensation
    for (double gk : g.values) {
        const double term = std::abs(gk);
        const double t = sum + term;
        carry += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return op.scale() * (op.d_plus()[0] + op.d_minus()[0]) * (sum + carry);
}

double wiener_limit(const SpatialOperator& op) {
    if (!op.has_constant_coefficients()) {
        throw UnsupportedError("wiener_limit: requires constant diffusion coefficients");
    }
    return 2.0 * op.alpha() * op.scale() * (op.d_plus()[0] + op.d_minus()[0]);
}

}  // namespace fdebvm
