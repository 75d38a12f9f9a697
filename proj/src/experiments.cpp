#include "fdebvm/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fdebvm/errors.hpp"
#include "fdebvm/oracle.hpp"
#include "fdebvm/preconditioners.hpp"

namespace fdebvm {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DiffusionProblem gaussian_pulse_problem(double alpha) {
    DiffusionProblem p;
    p.alpha = alpha;
    p.x_left = 0.0;
    p.x_right = 2.0;
    p.t0 = 0.0;
    p.T = 1.0;
    p.d_plus = [](double) { return 0.6; };
    p.d_minus = [](double) { return 0.5; };
    p.u0 = [](double x) {
        const double xc = 1.2;
        const double xi = 0.08;
        return std::exp(-(x - xc) * (x - xc) / (2.0 * xi * xi));
    };
    p.validate();
    return p;
}

SystemForm parse_system_form(const std::string& name) {
    if (name == "reduced") return SystemForm::reduced;
    if (name == "full") return SystemForm::full;
    throw UsageError("unknown system form '" + name + "' (expected reduced or full)");
}

std::string to_string(SystemForm form) { return form == SystemForm::reduced ? "reduced" : "full"; }

std::string preconditioner_label(const std::string& kind) {
    static const std::map<std::string, std::string> labels = {
        {"none", "I"}, {"I", "I"},       {"strang", "S"},     {"S", "S"},
        {"bccb", "S2"}, {"S2", "S2"}, {"bccb-mod", "S2mod"}, {"S2mod", "S2mod"},
    };
    const auto it = labels.find(kind);
    if (it == labels.end()) {
        throw UsageError("unknown preconditioner '" + kind + "' (expected none, strang, bccb or bccb-mod)");
    }
    return it->second;
}

void RunConfig::validate() const {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("alpha must lie in (1,2)");
    if (n < 3) throw UsageError("N must be >= 3");
    if (s < default_scheme().mu + 1) {
        throw UsageError("s must be >= " + std::to_string(default_scheme().mu + 1));
    }
    preconditioner_label(precond);
    GmresConfig g;
    g.restart = restart;
    g.rel_tol = tol;
    g.max_total_iters = max_total_iters;
    g.validate();
}

BlockSystem build_system(const RunConfig& config) {
    config.validate();
    auto full = assemble_block_system(default_scheme(), gaussian_pulse_problem(config.alpha), config.n, config.s);
    if (config.form == SystemForm::full) return full;
    return eliminate_initial_value(full);
}

RunResult run_single(const RunConfig& config) {
    const auto sys = build_system(config);
    RunResult result;
    result.row.n = config.n;
    result.row.s = config.s;
    result.row.label = preconditioner_label(config.precond);

    const auto t_build = std::chrono::steady_clock::now();
    const auto prec = make_preconditioner(config.precond, sys);
    result.build_seconds = seconds_since(t_build);

    const LinearMap<double> op = [&sys](std::span<const double> x, std::span<double> y) {
        apply_block_operator(sys, x, y);
    };
    LinearMap<double> pinv;
    if (prec) {
        pinv = [&prec](std::span<const double> x, std::span<double> y) { prec->apply_inverse(x, y); };
    }
    GmresConfig gc;
    gc.restart = config.restart;
    gc.rel_tol = config.tol;
    gc.max_total_iters = config.max_total_iters;
    auto solved = gmres_solve<double>(op, pinv, sys.rhs, {}, gc);
    result.solve_seconds = solved.report.wall_time;
    result.report = std::move(solved.report);
    result.solution = expand_solution(sys, solved.x);

    result.row.iterations = result.report.iterations;
    result.row.converged = result.report.converged;
    result.row.wall_time_seconds = result.build_seconds + result.solve_seconds;
    return result;
}

BenchmarkRow run_example1(double alpha, std::size_t n, std::size_t s, const std::string& precond, SystemForm form) {
    RunConfig config;
    config.alpha = alpha;
    config.n = n;
    config.s = s;
    config.precond = precond;
    config.form = form;
    try {
        return run_single(config).row;
    } catch (const std::exception& e) {
        BenchmarkRow row;
        row.n = n;
        row.s = s;
        try {
            row.label = preconditioner_label(precond);
        } catch (const std::exception&) {
            row.label = precond;
        }
        row.converged = false;
        row.error = e.what();
        return row;
    }
}

TableSpec table_spec(int which) {
    if (which != 1 && which != 2) throw UsageError("table must be 1 or 2");
    return TableSpec{which == 1 ? 1.2 : 1.5, {24, 48, 96}, {16, 32, 64, 128}, {"I", "S", "S2", "S2mod"}};
}

std::vector<BenchmarkRow> run_table(const TableSpec& spec, SystemForm form,
                                    const std::function<void(const BenchmarkRow&)>& progress) {
    std::vector<BenchmarkRow> rows;
    for (const auto n : spec.n_values) {
        for (const auto s : spec.s_values) {
            for (const auto& p : spec.preconditioners) {
                rows.push_back(run_example1(spec.alpha, n, s, p, form));
                if (progress) progress(rows.back());
            }
        }
    }
    return rows;
}

std::vector<BenchmarkRow> run_table(int which) { return run_table(table_spec(which)); }

void write_table_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows) {
    static const std::vector<std::string> order = {"I", "S", "S2", "S2mod"};
    os << "N,s";
    for (const auto& l : order) os << ",ITS_" << l << ",CPU_" << l;
    os << '\n';
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    for (const auto& r : rows) {
        const std::pair key{r.n, r.s};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [n, s] : keys) {
        os << n << ',' << s;
        for (const auto& l : order) {
            const auto it = std::find_if(rows.begin(), rows.end(),
                                         [&](const BenchmarkRow& r) { return r.n == n && r.s == s && r.label == l; });
            if (it == rows.end()) {
                os << ",,";
                continue;
            }
            std::ostringstream cpu;
            cpu.setf(std::ios::fixed);
            cpu.precision(4);
            cpu << it->wall_time_seconds;
            os << ',' << (it->converged ? "" : ">") << it->iterations << ',' << cpu.str();
        }
        os << '\n';
    }
}

std::string run_report_json(const RunConfig& config, const RunResult& result, bool include_history) {
    nlohmann::ordered_json j;
    j["alpha"] = config.alpha;
    j["N"] = config.n;
    j["s"] = config.s;
    j["preconditioner"] = result.row.label;
    j["system"] = to_string(config.form);
    j["restart"] = config.restart;
    j["tol"] = config.tol;
    j["iterations"] = result.report.iterations;
    j["restarts"] = result.report.restarts;
    j["converged"] = result.report.converged;
    j["relative_residual"] = result.report.final_relative_residual;
    j["true_relative_residual"] = result.report.final_true_relative_residual;
    j["build_seconds"] = result.build_seconds;
    j["solve_seconds"] = result.solve_seconds;
    j["wall_time_seconds"] = result.row.wall_time_seconds;
    j["timing_note"] = "wall_time_seconds includes preconditioner construction and the GMRES solve";
    if (include_history) {
        j["residual_history"] = result.report.residual_history;
        auto truth = nlohmann::json::array();
        for (double v : result.report.true_residual_history) {
            truth.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        }
        j["true_residual_history"] = truth;
    }
    return j.dump(2);
}

double fraction_near_one(const std::vector<std::complex<double>>& values, double radius) {
    if (values.empty()) return 0.0;
    std::size_t near = 0;
    for (const auto& v : values) {
        if (std::abs(v - std::complex<double>(1.0, 0.0)) <= radius) ++near;
    }
    return static_cast<double>(near) / static_cast<double>(values.size());
}

SpectraDump dump_spectra(std::size_t n, std::size_t s, double alpha, const std::string& dir, SystemForm form) {
    RunConfig config;
    config.alpha = alpha;
    config.n = n;
    config.s = s;
    config.form = form;
    const auto sys = build_system(config);
    if (sys.dim() > kDenseGuard) {
        throw UsageError("spectra: dimension " + std::to_string(sys.dim()) + " exceeds the dense guard " +
                         std::to_string(kDenseGuard) + "; choose smaller --nx/--ns");
    }
    std::filesystem::create_directories(dir);
    const auto m = oracle::block_matrix(sys);

    struct Item {
        std::string label;
        std::string file;
        std::function<oracle::DenseSnapshot()> precond;
    };
    const std::vector<Item> items = {
        {"M", "M.csv", nullptr},
        {"S_inv_M", "S_inv_M.csv", [&] { return oracle::strang_block_matrix(sys); }},
        {"S2_inv_M", "S2_inv_M.csv", [&] { return oracle::bccb_matrix(sys, false); }},
        {"S2mod_inv_M", "S2mod_inv_M.csv", [&] { return oracle::bccb_matrix(sys, true); }},
    };
    SpectraDump dump;
    dump.eigenvalues_per_file = sys.dim();
    for (const auto& item : items) {
        const auto target = item.precond ? oracle::solve_many(item.precond(), m) : m;
        const auto eig = oracle::dense_eigenvalues(target);
        const auto path = (std::filesystem::path(dir) / item.file).string();
        std::ofstream out(path);
        if (!out) throw UsageError("cannot write " + path);
        write_spectrum_csv(out, item.label, eig.size(), 1, eig);
        dump.paths.push_back(path);
    }
    return dump;
}

StabilityCheck check_stability(std::size_t mu) {
    if (mu != 2 && mu != 4) throw UsageError("check-stability supports mu = 2 or 4");
    StabilityCheck check;
    check.mu = mu;
    for (std::size_t nu = std::max<std::size_t>(1, mu / 2); nu <= mu / 2 + 1; ++nu) {
        const auto scheme = derive_gam_scheme(mu, nu);
        StabilityCandidate c;
        c.nu = nu;
        c.alpha = scheme.main_alpha;
        c.beta = scheme.main_beta;
        c.grid = stability_grid_test(scheme);
        if (check.chosen_nu == 0 && c.grid.passed()) {
            check.chosen_nu = nu;
            check.origin_member = stability_region_membership(scheme, {0.0, 0.0});
        }
        check.candidates.push_back(std::move(c));
    }
    if (check.chosen_nu == 0) {
        throw SolverError("check-stability: no candidate nu passes for mu = " + std::to_string(mu));
    }
    return check;
}

void print_stability(std::ostream& os, const StabilityCheck& check) {
    os << "mu = " << check.mu << '\n';
    os.precision(12);
    for (const auto& c : check.candidates) {
        os << "nu = " << c.nu << ": " << (c.grid.passed() ? "PASS" : "FAIL") << " (" << c.grid.failures << " of "
           << c.grid.points << " grid points outside the region";
        if (!c.grid.passed()) {
            const auto z = c.grid.first_failure;
            os << ", first at " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::fabs(z.imag()) << "i";
        }
        os << ")\n  alpha =";
        for (double a : c.alpha) os << ' ' << a;
        os << "\n  beta  =";
        for (double b : c.beta) os << ' ' << b;
        os << '\n';
    }
    os << "chosen nu = " << check.chosen_nu << '\n';
    os << "q = 0 in region: " << (check.origin_member ? "true" : "false") << '\n';
}

}  // namespace fdebvm
