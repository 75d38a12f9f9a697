// Command-line driver: single solves, benchmark tables, spectra dumps and the
// stability check of the time-stepping scheme.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "fdebvm/errors.hpp"
#include "fdebvm/experiments.hpp"

namespace {

constexpr int kExitNotConverged = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw fdebvm::UsageError("cannot open " + path + " for writing");
    return file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-fractional diffusion solver: BVM in time, preconditioned GMRES"};
    app.require_subcommand(1);

    fdebvm::RunConfig run;
    std::string system_name = "reduced";
    std::string out_path;
    auto* solve = app.add_subcommand("solve", "Solve the Gaussian pulse problem once and write a JSON report");
    solve->add_option("--alpha", run.alpha, "Fractional order in (1,2)")->default_val(1.2);
    solve->add_option("--nx", run.n, "Interior spatial nodes N")->default_val(24);
    solve->add_option("--ns", run.s, "Time steps s")->default_val(16);
    solve->add_option("--precond", run.precond, "Preconditioner")
        ->check(CLI::IsMember({"none", "strang", "bccb", "bccb-mod"}))
        ->default_val("strang");
    solve->add_option("--restart", run.restart, "GMRES restart length")->default_val(20);
    solve->add_option("--tol", run.tol, "Relative residual tolerance")->default_val(1e-8);
    solve->add_option("--max-iters", run.max_total_iters, "Iteration cap")->default_val(20000);
    solve->add_option("--system", system_name, "Unknowns: reduced (u_1..u_s) or full (u_0..u_s)")
        ->check(CLI::IsMember({"reduced", "full"}))
        ->default_val("reduced");
    solve->add_option("--out", out_path, "JSON report path (stdout if omitted)");

    int table = 1;
    std::string bench_out;
    std::string bench_system = "reduced";
    auto* bench = app.add_subcommand("bench", "Iteration/time table over N x s x preconditioner");
    bench->add_option("--table", table, "1 (alpha = 1.2) or 2 (alpha = 1.5)")
        ->check(CLI::IsMember({1, 2}))
        ->default_val(1);
    bench->add_option("--out", bench_out, "CSV path (stdout if omitted)");
    bench->add_option("--system", bench_system, "reduced or full")
        ->check(CLI::IsMember({"reduced", "full"}))
        ->default_val("reduced");

    std::size_t spec_n = 48;
    std::size_t spec_s = 64;
    double spec_alpha = 1.2;
    std::string spec_dir = "spectra";
    std::string spec_system = "full";
    auto* spectra = app.add_subcommand("spectra", "Dense spectra of M and the preconditioned matrices");
    spectra->add_option("--nx", spec_n, "Interior spatial nodes N")->default_val(48);
    spectra->add_option("--ns", spec_s, "Time steps s")->default_val(64);
    spectra->add_option("--alpha", spec_alpha, "Fractional order in (1,2)")->default_val(1.2);
    spectra->add_option("--out", spec_dir, "Output directory")->default_val("spectra");
    spectra->add_option("--system", spec_system, "reduced or full")
        ->check(CLI::IsMember({"reduced", "full"}))
        ->default_val("full");

    std::size_t mu = 4;
    auto* stability = app.add_subcommand("check-stability", "Derive GAM candidates and test stability on the left half-plane");
    stability->add_option("--mu", mu, "Number of steps (2 or 4)")->check(CLI::IsMember({2, 4}))->default_val(4);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            run.form = fdebvm::parse_system_form(system_name);
            const auto result = fdebvm::run_single(run);
            std::ofstream file;
            open_or_stdout(out_path, file) << fdebvm::run_report_json(run, result) << '\n';
            std::cerr << result.row.label << ": " << result.report.iterations << " iterations, "
                      << (result.report.converged ? "converged" : "NOT converged") << '\n';
            return result.report.converged ? 0 : kExitNotConverged;
        }
        if (*bench) {
            const auto form = fdebvm::parse_system_form(bench_system);
            bool all_converged = true;
            const auto rows = fdebvm::run_table(fdebvm::table_spec(table), form, [&](const fdebvm::BenchmarkRow& r) {
                std::cerr << "N=" << r.n << " s=" << r.s << ' ' << r.label << ": " << r.iterations
                          << (r.converged ? "" : " (not converged)") << (r.error.empty() ? "" : " " + r.error) << '\n';
                all_converged = all_converged && r.converged;
            });
            std::ofstream file;
            fdebvm::write_table_csv(open_or_stdout(bench_out, file), rows);
            return all_converged ? 0 : kExitNotConverged;
        }
        if (*spectra) {
            const auto dump =
                fdebvm::dump_spectra(spec_n, spec_s, spec_alpha, spec_dir, fdebvm::parse_system_form(spec_system));
            for (const auto& p : dump.paths) std::cout << p << " (" << dump.eigenvalues_per_file << " eigenvalues)\n";
            return 0;
        }
        if (*stability) {
            fdebvm::print_stability(std::cout, fdebvm::check_stability(mu));
            return 0;
        }
    } catch (const fdebvm::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fdebvm::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
