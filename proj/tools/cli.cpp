#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "daebvp/batch.hpp"
#include "daebvp/bvp.hpp"
#include "daebvp/error.hpp"
#include "daebvp/problem_io.hpp"
#include "daebvp/verify.hpp"

namespace daebvp::cli
{

namespace
{

using ordered_json = nlohmann::ordered_json;

struct CommonFlags
{
    std::size_t grid = 32;
    double tol = 1e-8;
    double deriv_tol = 1e-6;
    std::optional<double> lambda;
    std::optional<double> rank_tol;
    double structure_tol = 1e-10;
    std::optional<double> max_cond;
    double consistency_tol = 1e-8;

    SolverOptions solver_options() const
    {
        SolverOptions opts;
        opts.lambda = lambda;
        opts.decomposition.rank.relative = rank_tol;
        opts.structure = structure_tol;
        opts.max_condition = max_cond;
        opts.consistency = consistency_tol;
        return opts;
    }

    ResidualTolerances residual_tolerances() const { return {tol, tol, deriv_tol}; }
};

void add_solver_flags(CLI::App &cmd, CommonFlags &flags)
{
    cmd.add_option("--lambda", flags.lambda, "Use this lambda* instead of the probe search");
    cmd.add_option("--rank-tol", flags.rank_tol,
                   "Relative rank tolerance (default n*eps for lambda*E-A, 1e3*n*eps for powers of M)");
    cmd.add_option("--structure-tol", flags.structure_tol,
                   "Bottom boundary rows count as zero below this times ||B||+||C||")
        ->capture_default_str();
    cmd.add_option("--max-cond", flags.max_cond, "Largest accepted condition of D (default 1/(1e3*n*eps))");
    cmd.add_option("--consistency-tol", flags.consistency_tol, "Relative IVP consistency tolerance")
        ->capture_default_str();
}

void add_check_flags(CLI::App &cmd, CommonFlags &flags)
{
    cmd.add_option("--grid", flags.grid, "Number of Chebyshev intervals N (N+1 points)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--tol", flags.tol, "Equation/boundary residual tolerance (env DAEBVP_TOL)")
        ->capture_default_str();
    cmd.add_option("--deriv-tol", flags.deriv_tol, "Finite-difference derivative check tolerance")
        ->capture_default_str();
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

ordered_json vector_json(const Vector &v)
{
    ordered_json out = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

int exit_code_for(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::InvalidInput:
    case ErrorCode::DimensionMismatch: return exit_input;
    case ErrorCode::NotRegular: return exit_not_regular;
    case ErrorCode::ZeroEMatrix: return exit_zero_E;
    default: return exit_unsolvable;
    }
}

const char *reason_for(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::NotRegular: return "regularity";
    case ErrorCode::ZeroEMatrix: return "E = 0";
    case ErrorCode::IncompatibleBoundaryStructure: return "boundary structure";
    case ErrorCode::SingularShootingMatrix: return "singular D";
    case ErrorCode::InconsistentInitialValue: return "inconsistent initial value";
    case ErrorCode::InvalidInput:
    case ErrorCode::DimensionMismatch: return "malformed input";
    default: return "numerical failure";
    }
}

ordered_json failure_json(const std::string &file, const Error &e)
{
    ordered_json j;
    j["file"] = file;
    j["status"] = "failed";
    j["reason"] = reason_for(e.code());
    j["error"] = to_string(e.code());
    j["message"] = e.what();
    if (!std::isnan(e.value()))
        j["value"] = e.value();
    j["exit_code"] = exit_code_for(e.code());
    return j;
}

std::string csv_text(const ProblemFile &file, const SolutionBundle &sol, std::size_t intervals)
{
    const BvpProblem prob = file.to_problem();
    const std::vector<double> grid = chebyshev_grid(file.T, intervals + 1);
    const std::vector<Vector> xs = sample(sol, grid);
    const std::vector<double> res = equation_residuals(prob, Trajectory::of(sol), grid);

    std::string out = "t";
    for (Index i = 0; i < prob.n(); ++i)
        out += ",x_" + std::to_string(i + 1);
    out += ",res_eq\n";
    for (std::size_t r = 0; r < grid.size(); ++r)
    {
        out += format_double(grid[r]);
        for (Index i = 0; i < xs[r].size(); ++i)
            out += "," + format_double(xs[r](i));
        out += "," + format_double(res[r]) + "\n";
    }
    return out;
}

SolutionBundle solve_file(const ProblemFile &file, const SolverOptions &opts)
{
    if (file.mode == ProblemMode::ivp)
        return solve_ivp(Pencil(file.E, file.A), file.d, file.T, file.f, opts);
    return solve_bvp(file.to_problem(), opts);
}

ordered_json solution_json(const std::string &path, const ProblemFile &file, const SolutionBundle &sol,
                           const ResidualReport &report, const CommonFlags &flags)
{
    const QwfDecomposition &d = sol.decomposition();
    const SolutionDiagnostics &diag = sol.diagnostics();
    ordered_json j;
    j["file"] = path;
    j["status"] = "solved";
    j["mode"] = file.mode == ProblemMode::bvp ? "bvp" : "ivp";
    j["n"] = d.n1 + d.n2;
    j["n1"] = d.n1;
    j["n2"] = d.n2;
    j["nu"] = d.nu;
    j["lambda_star"] = d.lambda_star;
    j["mu1"] = vector_json(sol.mu1());
    j["mu2"] = vector_json(sol.mu2());
    if (file.mode == ProblemMode::bvp)
    {
        j["cond_D"] = diag.cond_D;
        j["bottom_residual"] = diag.bottom_residual;
    }
    else
        j["consistency_residual"] = diag.consistency_residual;
    j["residuals"] = {{"equation_max", report.equation_residual_max},
                      {"boundary", report.boundary_residual},
                      {"derivative_max", report.derivative_check_max},
                      {"passed", report.passed}};
    ordered_json tol;
    tol["rank_threshold"] = diag.rank_threshold;
    if (file.mode == ProblemMode::bvp)
    {
        tol["structure"] = diag.structure_tolerance;
        tol["max_condition"] = diag.max_condition;
    }
    else
        tol["consistency"] = diag.consistency_tolerance;
    tol["equation"] = flags.tol * report.equation_scale;
    tol["boundary"] = flags.tol * report.boundary_scale;
    tol["derivative"] = flags.deriv_tol;
    j["tolerances"] = tol;
    j["reconstruction"] = {{"E", diag.reconstruction_E}, {"A", diag.reconstruction_A}};
    j["cond_P"] = diag.cond_P;
    j["cond_Q"] = diag.cond_Q;
    j["extrapolated_evaluations"] = sol.extrapolated_evaluations();
    return j;
}

struct FileResult
{
    int code = exit_ok;
    ordered_json summary;
    std::string csv;
    std::string message;
};

FileResult run_solve_file(const std::string &path, const CommonFlags &flags, std::optional<ProblemMode> required)
{
    FileResult r;
    try
    {
        const ProblemFile file = load_problem(path);
        if (required && file.mode != *required)
            throw Error(ErrorCode::InvalidInput,
                        path + ": field 'mode': this command needs \"" +
                            std::string(*required == ProblemMode::bvp ? "bvp" : "ivp") + "\"");
        const SolutionBundle sol = solve_file(file, flags.solver_options());
        const ResidualReport report = residual_check(file.to_problem(), Trajectory::of(sol), flags.grid + 1,
                                                     flags.residual_tolerances());
        r.csv = csv_text(file, sol, flags.grid);
        r.summary = solution_json(path, file, sol, report, flags);
    }
    catch (const Error &e)
    {
        r.code = exit_code_for(e.code());
        r.summary = failure_json(path, e);
        r.message = std::string("error: ") + reason_for(e.code()) + ": " + e.what();
    }
    return r;
}

bool write_text(const std::filesystem::path &path, const std::string &text, std::ostream &err)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        err << "error: cannot write " << path.string() << "\n";
        return false;
    }
    out << text;
    return static_cast<bool>(out);
}

int cmd_solve(const std::vector<std::string> &paths, const CommonFlags &flags, const std::string &output, int jobs,
              std::optional<ProblemMode> required, std::ostream &out, std::ostream &err)
{
    if (paths.size() == 1)
    {
        const FileResult r = run_solve_file(paths.front(), flags, required);
        if (r.code != exit_ok)
        {
            err << r.message << "\n";
            out << r.summary.dump(2) << "\n";
            return r.code;
        }
        if (output.empty())
        {
            out << r.csv;
            err << r.summary.dump(2) << "\n";
        }
        else
        {
            if (!write_text(output, r.csv, err))
                return exit_input;
            out << r.summary.dump(2) << "\n";
        }
        return exit_ok;
    }

    // batch: one independent solve per file
    std::vector<FileResult> results(paths.size());
    const auto count = static_cast<std::ptrdiff_t>(paths.size());
    const int threads = jobs > 0 ? jobs : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        results[static_cast<std::size_t>(i)] = run_solve_file(paths[static_cast<std::size_t>(i)], flags, required);

    if (!output.empty())
        std::filesystem::create_directories(output);
    int code = exit_ok;
    ordered_json all = ordered_json::array();
    for (std::size_t i = 0; i < results.size(); ++i)
    {
        const FileResult &r = results[i];
        code = std::max(code, r.code);
        if (r.code != exit_ok)
            err << r.message << "\n";
        else if (!output.empty())
        {
            const std::filesystem::path csv =
                std::filesystem::path(output) / (std::filesystem::path(paths[i]).stem().string() + ".csv");
            if (!write_text(csv, r.csv, err))
                code = std::max(code, exit_input);
        }
        all.push_back(r.summary);
    }
    out << all.dump(2) << "\n";
    return code;
}

int cmd_analyze(const std::string &path, const CommonFlags &flags, std::ostream &out, std::ostream &err)
{
    ProblemFile file;
    try
    {
        file = load_problem(path);
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << "\n";
        return exit_input;
    }

    const Pencil pencil(file.E, file.A);
    const SolverOptions opts = flags.solver_options();
    ordered_json j;
    j["file"] = path;
    RegularityCertificate cert;
    try
    {
        cert = opts.lambda ? certify_lambda(pencil, *opts.lambda, opts.decomposition.rank)
                           : check_regularity(pencil, opts.decomposition.rank);
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << "\n";
        j["regular"] = nullptr;
        j["error"] = to_string(e.code());
        j["message"] = e.what();
        out << j.dump(2) << "\n";
        return exit_code_for(e.code());
    }
    j["regular"] = cert.regular;
    ordered_json probes = ordered_json::array();
    for (const ProbePoint &p : cert.probe_points)
        probes.push_back({{"lambda", p.lambda},
                          {"smallest_singular_value", p.smallest_singular_value},
                          {"determinant", p.determinant}});
    if (!cert.regular)
    {
        j["probe_points"] = probes;
        if (cert.det_poly_coeffs)
            j["det_poly_coeffs"] = *cert.det_poly_coeffs;
        out << j.dump(2) << "\n";
        return exit_not_regular;
    }

    j["lambda_star"] = *cert.chosen_lambda;
    try
    {
        const QwfDecomposition d = quasi_weierstrass(pencil, cert, opts.decomposition);
        j["n"] = pencil.n();
        j["n1"] = d.n1;
        j["n2"] = d.n2;
        j["nu"] = d.nu;
        j["reconstruction"] = {{"E", d.residual_E}, {"A", d.residual_A}};
        j["cond_P"] = d.cond_P;
        j["cond_Q"] = d.cond_Q;
        j["rank_threshold"] = d.rank_threshold;
        j["E_is_zero"] = pencil.E().isZero(0.0);
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << "\n";
        j["error"] = to_string(e.code());
        j["message"] = e.what();
        out << j.dump(2) << "\n";
        return exit_code_for(e.code());
    }
    j["probe_points"] = probes;
    if (cert.det_poly_coeffs)
        j["det_poly_coeffs"] = *cert.det_poly_coeffs;
    out << j.dump(2) << "\n";
    return exit_ok;
}

// Rows of a solution CSV: t followed by x_1..x_n (res_eq is ignored).
std::vector<std::vector<double>> read_csv(const std::string &path, Index n)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::InvalidInput, "cannot open CSV " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0)
        throw Error(ErrorCode::InvalidInput, path + ": line 1: expected header t,x_1,...,x_n,res_eq");
    std::vector<std::vector<double>> rows;
    for (std::size_t number = 2; std::getline(in, line); ++number)
    {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size())
        {
            const std::size_t end = std::min(line.find(',', start), line.size());
            double v = 0.0;
            const auto res = std::from_chars(line.data() + start, line.data() + end, v);
            if (res.ec != std::errc() || res.ptr != line.data() + end)
                throw Error(ErrorCode::InvalidInput, path + ": line " + std::to_string(number) + ": bad number");
            row.push_back(v);
            start = end + 1;
        }
        if (static_cast<Index>(row.size()) < n + 1)
            throw Error(ErrorCode::InvalidInput, path + ": line " + std::to_string(number) + ": too few columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_verify(const std::string &path, const std::string &csv, const CommonFlags &flags, double corruption,
               std::ostream &out, std::ostream &err)
{
    ProblemFile file;
    std::vector<std::vector<double>> rows;
    try
    {
        file = load_problem(path);
        if (!csv.empty())
            rows = read_csv(csv, file.E.rows());
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << "\n";
        return exit_input;
    }

    std::optional<SolutionBundle> sol;
    try
    {
        sol = solve_file(file, flags.solver_options());
    }
    catch (const Error &e)
    {
        err << "error: " << reason_for(e.code()) << ": " << e.what() << "\n";
        out << failure_json(path, e).dump(2) << "\n";
        return exit_code_for(e.code());
    }

    Trajectory traj = Trajectory::of(*sol);
    if (corruption != 0.0)
    {
        auto x = traj.x;
        traj.x = [x, corruption](double t) {
            Vector v = x(t);
            v(0) += corruption;
            return v;
        };
    }

    const BvpProblem prob = file.to_problem();
    const ResidualReport report = residual_check(prob, traj, flags.grid + 1, flags.residual_tolerances());
    bool passed = report.passed;

    ordered_json j;
    j["file"] = path;
    j["passed"] = false;
    j["equation_residual_max"] = report.equation_residual_max;
    j["equation_tolerance"] = report.tolerances.equation * report.equation_scale;
    j["boundary_residual"] = report.boundary_residual;
    j["boundary_tolerance"] = report.tolerances.boundary * report.boundary_scale;
    j["derivative_check_max"] = report.derivative_check_max;
    j["derivative_tolerance"] = report.tolerances.derivative;
    if (!csv.empty())
    {
        double deviation = 0.0;
        for (const std::vector<double> &row : rows)
        {
            const Vector x = traj.x(row[0]);
            double diff = 0.0;
            for (Index i = 0; i < x.size(); ++i)
                diff = std::max(diff, std::abs(row[static_cast<std::size_t>(i) + 1] - x(i)));
            deviation = std::max(deviation, diff / (1.0 + x.lpNorm<Eigen::Infinity>()));
        }
        j["csv"] = csv;
        j["csv_rows"] = rows.size();
        j["csv_max_deviation"] = deviation;
        j["csv_tolerance"] = flags.tol;
        passed = passed && deviation <= flags.tol;
    }
    j["passed"] = passed;
    j["grid_size"] = report.grid.size();
    j["grid"] = report.grid;
    out << j.dump(2) << "\n";
    return passed ? exit_ok : exit_verification;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CommonFlags flags;
    if (const char *env = std::getenv("DAEBVP_TOL"))
    {
        const std::string text(env);
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v > 0.0))
        {
            err << "error: DAEBVP_TOL must be a positive number, got '" << text << "'\n";
            return exit_input;
        }
        flags.tol = v;
    }

    CLI::App app{"Boundary and initial value problems for linear DAEs E x' = A x + f(t) with constant "
                 "coefficients.\nExit codes: 0 ok, 1 input, 2 not regular, 3 unsolvable/inconsistent, 4 E = 0, "
                 "5 verification failed."};
    app.name("daebvp");
    app.require_subcommand(1);

    std::vector<std::string> paths;
    std::string path;
    std::string output;
    std::string csv;
    int jobs = 1;
    double corruption = 0.0;

    CLI::App *analyze = app.add_subcommand("analyze", "Regularity, lambda*, n1, n2, index of the pencil (JSON)");
    analyze->add_option("file", path, "Problem JSON")->required();
    add_solver_flags(*analyze, flags);

    CLI::App *solve = app.add_subcommand("solve", "Solve boundary value problems; CSV samples + JSON summary");
    solve->add_option("files", paths, "Problem JSON file(s)")->required();
    solve->add_option("-o,--output", output, "CSV path (directory when several files are given)");
    solve->add_option("-j,--jobs", jobs, "Files solved in parallel in batch mode")->capture_default_str();
    add_check_flags(*solve, flags);
    add_solver_flags(*solve, flags);

    CLI::App *ivp = app.add_subcommand("ivp", "Solve initial value problems x(0) = d; CSV samples + JSON summary");
    ivp->add_option("files", paths, "Problem JSON file(s)")->required();
    ivp->add_option("-o,--output", output, "CSV path (directory when several files are given)");
    ivp->add_option("-j,--jobs", jobs, "Files solved in parallel in batch mode")->capture_default_str();
    add_check_flags(*ivp, flags);
    add_solver_flags(*ivp, flags);

    CLI::App *verify = app.add_subcommand("verify", "Re-solve and check residuals (JSON report)");
    verify->add_option("file", path, "Problem JSON")->required();
    verify->add_option("--csv", csv, "Also compare a solution CSV against the re-solved x(t)");
    verify->add_option("--inject-corruption", corruption, "Test hook: add this offset to x_1")->group("");
    add_check_flags(*verify, flags);
    add_solver_flags(*verify, flags);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input;
    }

    if (*analyze)
        return cmd_analyze(path, flags, out, err);
    if (*solve)
        return cmd_solve(paths, flags, output, jobs, ProblemMode::bvp, out, err);
    if (*ivp)
        return cmd_solve(paths, flags, output, jobs, ProblemMode::ivp, out, err);
    return cmd_verify(path, csv, flags, corruption, out, err);
}

} // namespace daebvp::cli
