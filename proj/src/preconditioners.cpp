#include "fdebvm/preconditioners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fdebvm/errors.hpp"
#include "fdebvm/gmres.hpp"

namespace fdebvm {
namespace {

// nonzero (offset, value) pairs of a circulant's first column
std::vector<std::pair<std::size_t, double>> circulant_taps(const CirculantMatrix& c) {
    std::vector<std::pair<std::size_t, double>> taps;
    for (std::size_t d = 0; d < c.size(); ++d) {
        if (c.first_col[d] != 0.0) taps.emplace_back(d, c.first_col[d]);
    }
    return taps;
}

// out_t += sum_d c_d v_{(t-d) mod m}, blocks of length n
void circulant_block_combine(const CirculantMatrix& c, std::size_t n, std::span<const double> v,
                             std::span<double> out) {
    const std::size_t m = c.size();
    for (const auto& [d, coef] : circulant_taps(c)) {
        for (std::size_t t = 0; t < m; ++t) {
            const double* src = v.data() + ((t + m - d) % m) * n;
            double* dst = out.data() + t * n;
            for (std::size_t i = 0; i < n; ++i) dst[i] += coef * src[i];
        }
    }
}

void check_dims(std::size_t expected, std::span<const double> v, std::span<double> out, const char* who) {
    if (v.size() != expected || out.size() != expected) {
        throw UsageError(std::string(who) + ": expected vectors of length " + std::to_string(expected));
    }
}

}  // namespace

std::vector<double> Preconditioner::apply_inverse(std::span<const double> v) const {
    std::vector<double> out(dim());
    apply_inverse(v, out);
    return out;
}

std::vector<double> Preconditioner::apply(std::span<const double> v) const {
    std::vector<double> out(dim());
    apply(v, out);
    return out;
}

CirculantMatrix strang_circulant_of_stencil(std::span<const double> coeffs, std::size_t nu, std::size_t m) {
    if (coeffs.empty() || nu >= coeffs.size()) throw UsageError("strang_circulant_of_stencil: bad nu");
    const std::size_t mu = coeffs.size() - 1;
    if (m <= mu) {
        throw UsageError("strang_circulant_of_stencil: need m > mu (got m=" + std::to_string(m) +
                         ", mu=" + std::to_string(mu) + ")");
    }
    // entry (0, c) of the first row is coeffs[nu + c] for c <= mu - nu and
    // coeffs[nu - (m - c)] in the wrapped tail; the first column is its reflection
    std::vector<double> col(m, 0.0);
    for (std::size_t i = 0; i <= mu; ++i) {
        const std::size_t d = (nu + m - i) % m;
        col[d] = coeffs[i];
    }
    return CirculantMatrix{std::move(col)};
}

std::vector<cplx> strang_operator_symbol(const SpatialOperator& op) {
    const std::size_t n = op.size();
    auto [sg, sgt] = strang_circulant_of_grunwald(op.coefficients(), n);
    const double dp = op.d_plus_mean();
    const double dm = op.d_minus_mean();
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = op.scale() * (dp * sg.first_col[i] + dm * sgt.first_col[i]);
    return circulant_symbol(CirculantMatrix{std::move(col)});
}

// ---------------------------------------------------------------- S

struct StrangBlockPreconditioner::Factors {
    // lu[j] for j = 0..m/2; the remaining frequencies are complex conjugates
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu;
};

StrangBlockPreconditioner::StrangBlockPreconditioner(const BlockSystem& sys, StrangOptions options)
    : m_(sys.blocks()),
      h_(sys.h),
      op_(sys.op),
      options_(options),
      sA_(strang_circulant_of_stencil(sys.scheme.main_alpha, sys.scheme.nu, m_)),
      sB_(strang_circulant_of_stencil(sys.scheme.main_beta, sys.scheme.nu, m_)),
      phi_(circulant_symbol(sA_)),
      psi_(circulant_symbol(sB_)),
      min_rcond_(std::numeric_limits<double>::quiet_NaN()),
      time_plan_(std::make_shared<fft::Plan1d>(m_, sys.n(), sys.n(), 1)) {
    const std::size_t n = op_.size();
    if (dense_inner()) {
        const auto jd = op_.to_dense();
        Eigen::MatrixXd j_mat(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) j_mat(r, c) = jd[r * n + c];
        }
        auto factors = std::make_shared<Factors>();
        factors->lu.reserve(m_ / 2 + 1);
        min_rcond_ = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= m_ / 2; ++j) {
            Eigen::MatrixXcd shifted = (-h_ * psi_[j]) * j_mat.cast<cplx>();
            shifted.diagonal().array() += phi_[j];
            factors->lu.emplace_back(shifted);
            const double rc = factors->lu.back().rcond();
            if (!(rc > kSingularCirculantTol)) {
                throw SingularError("StrangBlockPreconditioner: shifted system j=" + std::to_string(j) +
                                    " is singular (rcond " + std::to_string(rc) + ")");
            }
            min_rcond_ = std::min(min_rcond_, rc);
        }
        factors_ = std::move(factors);
    } else {
        sJ_ = strang_operator_symbol(op_);
    }
}

bool StrangBlockPreconditioner::dense_inner() const { return op_.size() <= options_.dense_threshold; }

void StrangBlockPreconditioner::solve_shifted(std::size_t j, std::span<cplx> y) const {
    const std::size_t n = op_.size();
    if (dense_inner()) {
        const bool mirrored = j > m_ / 2;
        const auto& lu = factors_->lu[mirrored ? m_ - j : j];
        Eigen::Map<Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(n));
        if (mirrored) {
            yv = lu.solve(yv.conjugate()).conjugate();
        } else {
            yv = lu.solve(yv).eval();
        }
        return;
    }

    const cplx phi = phi_[j];
    const cplx hpsi = h_ * psi_[j];
    std::vector<cplx> prec_symbol(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx lam = phi - hpsi * sJ_[k];
        if (std::abs(lam) == 0.0) {
            throw SingularError("StrangBlockPreconditioner: circulant inner preconditioner singular at j=" +
                                std::to_string(j) + ", k=" + std::to_string(k));
        }
        prec_symbol[k] = 1.0 / (lam * static_cast<double>(n));
    }
    const auto plan = fft::cached_plan(n);
    LinearMap<cplx> shifted = [&](std::span<const cplx> x, std::span<cplx> out) {
        op_.apply(x, out);
        for (std::size_t i = 0; i < n; ++i) out[i] = phi * x[i] - hpsi * out[i];
    };
    LinearMap<cplx> circ = [&](std::span<const cplx> x, std::span<cplx> out) {
        std::copy(x.begin(), x.end(), out.begin());
        plan->execute(fft::Direction::forward, out);
        for (std::size_t k = 0; k < n; ++k) out[k] *= prec_symbol[k];
        plan->execute(fft::Direction::backward, out);
    };
    GmresConfig config;
    config.rel_tol = options_.inner_tol;
    config.restart = options_.inner_restart;
    config.max_total_iters = options_.inner_max_iters;
    const std::vector<cplx> rhs(y.begin(), y.end());
    auto result = gmres_solve<cplx>(shifted, circ, rhs, {}, config);
    if (!result.report.converged) {
        throw SolverError("StrangBlockPreconditioner: inner solve j=" + std::to_string(j) + " stalled at relative residual " +
                          std::to_string(result.report.final_relative_residual) + " after " +
                          std::to_string(result.report.iterations) + " iterations");
    }
    std::copy(result.x.begin(), result.x.end(), y.begin());
}

void StrangBlockPreconditioner::apply_inverse(std::span<const double> v, std::span<double> out) const {
    check_dims(dim(), v, out, "StrangBlockPreconditioner::apply_inverse");
    const std::size_t n = op_.size();
    std::vector<cplx> buf(v.begin(), v.end());
    time_plan_->execute(fft::Direction::forward, buf);
    for (std::size_t j = 0; j < m_; ++j) solve_shifted(j, std::span<cplx>(buf.data() + j * n, n));
    time_plan_->execute(fft::Direction::backward, buf);
    const double inv_m = 1.0 / static_cast<double>(m_);
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * inv_m;
}

void StrangBlockPreconditioner::apply(std::span<const double> v, std::span<double> out) const {
    check_dims(dim(), v, out, "StrangBlockPreconditioner::apply");
    const std::size_t n = op_.size();
    std::fill(out.begin(), out.end(), 0.0);
    circulant_block_combine(sA_, n, v, out);
    std::vector<double> bv(dim(), 0.0);
    circulant_block_combine(sB_, n, v, bv);
    std::vector<double> jw(n);
    for (std::size_t t = 0; t < m_; ++t) {
        op_.apply(std::span<const double>(bv.data() + t * n, n), jw);
        double* dst = out.data() + t * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] -= h_ * jw[i];
    }
}

// ---------------------------------------------------------------- BCCB

BccbPreconditioner::BccbPreconditioner(const BlockSystem& sys, bool modified)
    : BccbPreconditioner(sys.blocks(), sys.n(), sys.h, modified,
                         circulant_symbol(strang_circulant_of_stencil(sys.scheme.main_alpha, sys.scheme.nu, sys.blocks())),
                         circulant_symbol(strang_circulant_of_stencil(sys.scheme.main_beta, sys.scheme.nu, sys.blocks())),
                         strang_operator_symbol(sys.op), sys.op.d_plus_mean(), sys.op.d_minus_mean()) {}

BccbPreconditioner::BccbPreconditioner(std::size_t m, std::size_t n, double h, bool modified, std::vector<cplx> phi,
                                       std::vector<cplx> psi, std::vector<cplx> sigma, double dbar_plus,
                                       double dbar_minus)
    : m_(m),
      n_(n),
      h_(h),
      modified_(modified),
      dbar_plus_(dbar_plus),
      dbar_minus_(dbar_minus),
      phi_(std::move(phi)),
      psi_(std::move(psi)),
      sigma_(std::move(sigma)),
      lambda_(m * n),
      plan_(std::make_shared<fft::RealPlan2d>(m, n)) {
    if (modified_) phi_[0] = phi_[m_ - 1].real();
    for (std::size_t j = 0; j < m_; ++j) {
        for (std::size_t k = 0; k < n_; ++k) lambda_[j * n_ + k] = phi_[j] - h_ * psi_[j] * sigma_[k];
    }
    for (std::size_t idx = 0; idx < lambda_.size(); ++idx) {
        if (std::abs(lambda_[idx]) < std::abs(lambda_[weakest_])) weakest_ = idx;
        max_mod_ = std::max(max_mod_, std::abs(lambda_[idx]));
    }
    min_mod_ = std::abs(lambda_[weakest_]);
    const std::size_t half_cols = plan_->spectrum_cols();
    const double inv_size = 1.0 / static_cast<double>(m_ * n_);
    half_.resize(m_ * half_cols);
    inv_half_.resize(m_ * half_cols);
    for (std::size_t j = 0; j < m_; ++j) {
        for (std::size_t k = 0; k < half_cols; ++k) {
            const cplx lam = lambda_[j * n_ + k];
            half_[j * half_cols + k] = lam * inv_size;
            inv_half_[j * half_cols + k] = lam == 0.0 ? cplx{} : inv_size / lam;
        }
    }
}

BccbPreconditioner BccbPreconditioner::from_spectra(std::vector<cplx> phi, std::vector<cplx> psi,
                                                    std::vector<cplx> sigma, double h, bool modified) {
    if (phi.empty() || sigma.empty() || psi.size() != phi.size()) {
        throw UsageError("BccbPreconditioner::from_spectra: phi, psi must have equal nonzero length and sigma be nonempty");
    }
    const std::size_t m = phi.size();
    const std::size_t n = sigma.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return BccbPreconditioner(m, n, h, modified, std::move(phi), std::move(psi), std::move(sigma), nan, nan);
}

void BccbPreconditioner::apply_inverse(std::span<const double> v, std::span<double> out) const {
    check_dims(dim(), v, out, "BccbPreconditioner::apply_inverse");
    if (singular()) {
        throw SingularError("BccbPreconditioner: eigenvalue lambda_{" + std::to_string(weakest_ / n_) + "," +
                            std::to_string(weakest_ % n_) + "} vanishes");
    }
    std::vector<cplx> spec(inv_half_.size());
    plan_->forward(v, spec);
    for (std::size_t idx = 0; idx < spec.size(); ++idx) spec[idx] *= inv_half_[idx];
    plan_->backward(spec, out);
}

void BccbPreconditioner::apply(std::span<const double> v, std::span<double> out) const {
    check_dims(dim(), v, out, "BccbPreconditioner::apply");
    std::vector<cplx> spec(half_.size());
    plan_->forward(v, spec);
    for (std::size_t idx = 0; idx < spec.size(); ++idx) spec[idx] *= half_[idx];
    plan_->backward(spec, out);
}

// ---------------------------------------------------------------- free functions

StrangBlockPreconditioner build_strang_block(const BlockSystem& sys, StrangOptions options) {
    return StrangBlockPreconditioner(sys, options);
}

BccbPreconditioner build_bccb(const BlockSystem& sys, bool modified) { return BccbPreconditioner(sys, modified); }

std::vector<cplx> bccb_eigenvalues(const BccbPreconditioner& p) {
    return {p.eigenvalues().begin(), p.eigenvalues().end()};
}

std::vector<double> apply_strang_block_inverse(const StrangBlockPreconditioner& p, std::span<const double> v) {
    return p.apply_inverse(v);
}

std::vector<double> apply_bccb_inverse(const BccbPreconditioner& p, std::span<const double> v) {
    return p.apply_inverse(v);
}

std::unique_ptr<Preconditioner> make_preconditioner(const std::string& kind, const BlockSystem& sys) {
    if (kind == "none" || kind == "I") return nullptr;
    if (kind == "strang" || kind == "S") return std::make_unique<StrangBlockPreconditioner>(sys);
    if (kind == "bccb" || kind == "S2") return std::make_unique<BccbPreconditioner>(sys, false);
    if (kind == "bccb-mod" || kind == "S2mod") return std::make_unique<BccbPreconditioner>(sys, true);
    throw UsageError("unknown preconditioner '" + kind + "' (expected none, strang, bccb or bccb-mod)");
}

InvertibilityReport invertibility_report(const StrangBlockPreconditioner& p, const BlockSystem& sys) {
    InvertibilityReport rep;
    rep.label = p.label();
    rep.gershgorin_left_half_plane = true;
    for (const auto& disc : gershgorin_discs(sys.op)) {
        if (!(disc.center + disc.radius < 0.0)) {
            rep.gershgorin_left_half_plane = false;
            break;
        }
    }
    rep.scheme_a_stable = stability_grid_test(sys.scheme).passed();
    rep.min_inner_rcond = p.min_inner_rcond();
    rep.invertible = rep.gershgorin_left_half_plane && rep.scheme_a_stable;
    rep.detail = rep.invertible ? "h*lambda(J_N) in the open left half-plane and the method is A-stable"
                                : "sufficient condition not met";
    return rep;
}

InvertibilityReport invertibility_report(const BccbPreconditioner& p) {
    InvertibilityReport rep;
    rep.label = p.label();
    rep.min_modulus = p.min_modulus();
    rep.max_modulus = p.max_modulus();
    rep.invertible = !p.singular() && rep.min_modulus > 0.0;
    rep.detail = "min |lambda_jk| / max = " + std::to_string(rep.max_modulus > 0 ? rep.min_modulus / rep.max_modulus : 0.0);
    return rep;
}

void write_spectrum_csv(std::ostream& os, const std::string& label, std::size_t rows, std::size_t cols,
                        std::span<const cplx> values, bool header) {
    if (values.size() != rows * cols) throw UsageError("write_spectrum_csv: size mismatch");
    if (header) os << "label,j,k,re,im\n";
    os.precision(17);
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t k = 0; k < cols; ++k) {
            const auto& v = values[j * cols + k];
            os << label << ',' << j << ',' << k << ',' << v.real() << ',' << v.imag() << '\n';
        }
    }
}

}  // namespace fdebvm
