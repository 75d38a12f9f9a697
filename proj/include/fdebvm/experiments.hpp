#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "fdebvm/block_system.hpp"
#include "fdebvm/bvm.hpp"
#include "fdebvm/gmres.hpp"

namespace fdebvm {

/// Gaussian pulse benchmark: x in [0,2], t in [0,1], f = 0,
/// u0(x) = exp(-(x - 1.2)^2 / (2 * 0.08^2)), d_+ = 0.6, d_- = 0.5.
DiffusionProblem gaussian_pulse_problem(double alpha);

enum class SystemForm { reduced, full };

SystemForm parse_system_form(const std::string& name);
std::string to_string(SystemForm form);

/// Canonical preconditioner label (I, S, S2, S2mod) for a CLI name or label.
std::string preconditioner_label(const std::string& kind);

struct RunConfig {
    double alpha = 1.2;
    std::size_t n = 24;
    std::size_t s = 16;
    std::string precond = "strang";
    std::size_t restart = 20;
    double tol = 1e-8;
    std::size_t max_total_iters = 20000;
    SystemForm form = SystemForm::reduced;

    /// Throws DomainError / UsageError for alpha outside (1,2), N < 3, s < mu+1,
    /// an unknown preconditioner or invalid GMRES settings.
    void validate() const;
};

struct BenchmarkRow {
    std::size_t n = 0;
    std::size_t s = 0;
    std::string label;
    std::size_t iterations = 0;
    /// Preconditioner construction plus GMRES.
    double wall_time_seconds = 0.0;
    bool converged = false;
    std::string error;
};

struct RunResult {
    BenchmarkRow row;
    SolveReport report;
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
    /// Time-major u_0..u_s.
    std::vector<double> solution;
};

BlockSystem build_system(const RunConfig& config);

/// Assemble, build the preconditioner and solve with GMRES from a zero guess.
RunResult run_single(const RunConfig& config);

/// The Gaussian pulse benchmark with GMRES(20), tol 1e-8. Failures are recorded
/// in the row instead of thrown.
BenchmarkRow run_example1(double alpha, std::size_t n, std::size_t s, const std::string& precond,
                          SystemForm form = SystemForm::reduced);

struct TableSpec {
    double alpha;
    std::vector<std::size_t> n_values;
    std::vector<std::size_t> s_values;
    std::vector<std::string> preconditioners;
};

/// which = 1 (alpha 1.2) or 2 (alpha 1.5): N in {24,48,96}, s in {16,32,64,128}, I/S/S2/S2mod.
TableSpec table_spec(int which);

std::vector<BenchmarkRow> run_table(const TableSpec& spec, SystemForm form = SystemForm::reduced,
                                    const std::function<void(const BenchmarkRow&)>& progress = {});
std::vector<BenchmarkRow> run_table(int which);

/// Header N,s,ITS_I,CPU_I,ITS_S,CPU_S,ITS_S2,CPU_S2,ITS_S2mod,CPU_S2mod; one line
/// per (N,s). A cell that did not converge has its ITS prefixed by '>'.
void write_table_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows);

/// JSON report of one run (configuration, counts, residuals, timings).
std::string run_report_json(const RunConfig& config, const RunResult& result, bool include_history = true);

struct SpectraDump {
    std::vector<std::string> paths;
    std::size_t eigenvalues_per_file = 0;
};

/// Dense spectra of M, S^{-1}M, (S2)^{-1}M and (S2mod)^{-1}M written as
/// M.csv, S_inv_M.csv, S2_inv_M.csv, S2mod_inv_M.csv (label,j,k,re,im with k = 0).
/// Throws UsageError if the dimension exceeds the dense guard.
SpectraDump dump_spectra(std::size_t n, std::size_t s, double alpha, const std::string& dir,
                         SystemForm form = SystemForm::full);

/// Fraction of values within `radius` of 1 + 0i.
double fraction_near_one(const std::vector<std::complex<double>>& values, double radius);

struct StabilityCandidate {
    std::size_t nu = 0;
    std::vector<double> alpha;
    std::vector<double> beta;
    StabilityGridReport grid;
};

struct StabilityCheck {
    std::size_t mu = 0;
    std::vector<StabilityCandidate> candidates;
    std::size_t chosen_nu = 0;
    bool origin_member = false;
};

/// mu in {2, 4}. Throws UsageError otherwise, SolverError if no candidate passes.
StabilityCheck check_stability(std::size_t mu);

void print_stability(std::ostream& os, const StabilityCheck& check);

}  // namespace fdebvm
