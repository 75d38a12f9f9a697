#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fdebvm/block_system.hpp"
#include "fdebvm/fft.hpp"
#include "fdebvm/structured.hpp"

namespace fdebvm {

/// Left preconditioner P for the block system: P^{-1} products for GMRES and
/// forward P products for round-trip checks. Implementations are immutable
/// after construction and reentrant.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual std::string label() const = 0;
    virtual std::size_t dim() const = 0;
    virtual void apply_inverse(std::span<const double> v, std::span<double> out) const = 0;
    virtual void apply(std::span<const double> v, std::span<double> out) const = 0;

    std::vector<double> apply_inverse(std::span<const double> v) const;
    std::vector<double> apply(std::span<const double> v) const;
};

/// Strang-type circulant of a mu-step stencil on m nodes: first row
/// [c_nu, ..., c_mu, 0, ..., 0, c_0, ..., c_{nu-1}]. Throws UsageError if m <= mu.
CirculantMatrix strang_circulant_of_stencil(std::span<const double> coeffs, std::size_t nu, std::size_t m);

/// Forward-DFT symbol of s(J_N) = (1/dx^alpha)(dbar_+ s(G_alpha) + dbar_- s(G_alpha)^T),
/// with dbar the means of the sampled diffusion coefficients.
std::vector<cplx> strang_operator_symbol(const SpatialOperator& op);

struct StrangOptions {
    /// Shifted systems up to this N are factored densely; larger ones use inner GMRES.
    std::size_t dense_threshold = 256;
    double inner_tol = 1e-10;
    std::size_t inner_restart = 50;
    std::size_t inner_max_iters = 2000;
};

/// S = s(A) (x) I_N - h s(B) (x) J_N. Time blocks are decoupled by an FFT; each
/// frequency j leaves the shifted system (phi_j I - h psi_j J_N) x_j = y_j.
class StrangBlockPreconditioner final : public Preconditioner {
public:
    StrangBlockPreconditioner(const BlockSystem& sys, StrangOptions options = {});

    std::string label() const override { return "S"; }
    std::size_t dim() const override { return m_ * op_.size(); }
    void apply_inverse(std::span<const double> v, std::span<double> out) const override;
    void apply(std::span<const double> v, std::span<double> out) const override;
    using Preconditioner::apply;
    using Preconditioner::apply_inverse;

    std::size_t blocks() const { return m_; }
    double h() const { return h_; }
    const CirculantMatrix& sA() const { return sA_; }
    const CirculantMatrix& sB() const { return sB_; }
    /// Forward symbols of s(A) and s(B): phi_0 = sum alpha_i = 0 for a consistent method.
    std::span<const cplx> sA_eigs() const { return phi_; }
    std::span<const cplx> sB_eigs() const { return psi_; }
    bool dense_inner() const;
    /// Smallest reciprocal condition estimate over the dense shifted factorizations
    /// (NaN on the iterative path).
    double min_inner_rcond() const { return min_rcond_; }

private:
    struct Factors;
    void solve_shifted(std::size_t j, std::span<cplx> y) const;

    std::size_t m_;
    double h_;
    SpatialOperator op_;
    StrangOptions options_;
    CirculantMatrix sA_;
    CirculantMatrix sB_;
    std::vector<cplx> phi_;
    std::vector<cplx> psi_;
    std::vector<cplx> sJ_;
    double min_rcond_;
    std::shared_ptr<const Factors> factors_;
    std::shared_ptr<const fft::Plan1d> time_plan_;
};

/// S2 = s(A) (x) I_N - h s(B) (x) s(J_N), diagonalized by the 2D DFT with
/// eigenvalues lambda_jk = phi_j - h psi_j sigma_k. The modified variant
/// replaces phi_0 by Re(phi_{m-1}).
class BccbPreconditioner final : public Preconditioner {
public:
    BccbPreconditioner(const BlockSystem& sys, bool modified);

    /// Direct construction from symbols (forward-DFT order). Throws UsageError
    /// on empty input.
    static BccbPreconditioner from_spectra(std::vector<cplx> phi, std::vector<cplx> psi, std::vector<cplx> sigma,
                                           double h, bool modified);

    std::string label() const override { return modified_ ? "S2mod" : "S2"; }
    std::size_t dim() const override { return m_ * n_; }
    /// Throws SingularError naming (j,k) if some |lambda_jk| < kSingularCirculantTol * max.
    void apply_inverse(std::span<const double> v, std::span<double> out) const override;
    void apply(std::span<const double> v, std::span<double> out) const override;
    using Preconditioner::apply;
    using Preconditioner::apply_inverse;

    std::size_t blocks() const { return m_; }
    std::size_t n() const { return n_; }
    double h() const { return h_; }
    bool modified() const { return modified_; }
    double dbar_plus() const { return dbar_plus_; }
    double dbar_minus() const { return dbar_minus_; }
    /// phi with the modification applied, if any.
    std::span<const cplx> sA_eigs() const { return phi_; }
    std::span<const cplx> sB_eigs() const { return psi_; }
    std::span<const cplx> sJ_eigs() const { return sigma_; }
    /// Row-major m x N array of lambda_jk.
    std::span<const cplx> eigenvalues() const { return lambda_; }

    double min_modulus() const { return min_mod_; }
    double max_modulus() const { return max_mod_; }
    bool singular() const { return min_mod_ == 0.0 || !(min_mod_ >= kSingularCirculantTol * max_mod_); }

private:
    BccbPreconditioner(std::size_t m, std::size_t n, double h, bool modified, std::vector<cplx> phi,
                       std::vector<cplx> psi, std::vector<cplx> sigma, double dbar_plus, double dbar_minus);

    std::size_t m_;
    std::size_t n_;
    double h_;
    bool modified_;
    double dbar_plus_;
    double dbar_minus_;
    std::vector<cplx> phi_;
    std::vector<cplx> psi_;
    std::vector<cplx> sigma_;
    std::vector<cplx> lambda_;
    // half spectrum (rows x (N/2+1)) of lambda and of 1/(m N lambda) for the r2c/c2r path
    std::vector<cplx> half_;
    std::vector<cplx> inv_half_;
    std::size_t weakest_ = 0;
    double min_mod_ = 0.0;
    double max_mod_ = 0.0;
    std::shared_ptr<const fft::RealPlan2d> plan_;
};

StrangBlockPreconditioner build_strang_block(const BlockSystem& sys, StrangOptions options = {});
BccbPreconditioner build_bccb(const BlockSystem& sys, bool modified);

/// lambda_jk as an m x N row-major array.
std::vector<cplx> bccb_eigenvalues(const BccbPreconditioner& p);

std::vector<double> apply_strang_block_inverse(const StrangBlockPreconditioner& p, std::span<const double> v);
std::vector<double> apply_bccb_inverse(const BccbPreconditioner& p, std::span<const double> v);

/// "none", "strang", "bccb", "bccb-mod" (or the labels I, S, S2, S2mod).
/// Returns nullptr for "none"; throws UsageError for anything else.
std::unique_ptr<Preconditioner> make_preconditioner(const std::string& kind, const BlockSystem& sys);

struct InvertibilityReport {
    std::string label;
    bool invertible = false;
    /// BCCB: min / max |lambda_jk|.
    double min_modulus = 0.0;
    double max_modulus = 0.0;
    /// S: every Gershgorin disc of h J_N lies in Re z < 0.
    bool gershgorin_left_half_plane = false;
    /// S: the main method passes the left half-plane stability grid.
    bool scheme_a_stable = false;
    double min_inner_rcond = 0.0;
    std::string detail;
};

InvertibilityReport invertibility_report(const StrangBlockPreconditioner& p, const BlockSystem& sys);
InvertibilityReport invertibility_report(const BccbPreconditioner& p);

/// Rows "label,j,k,re,im"; header written when `header` is true.
void write_spectrum_csv(std::ostream& os, const std::string& label, std::size_t rows, std::size_t cols,
                        std::span<const cplx> values, bool header = true);

}  // namespace fdebvm
