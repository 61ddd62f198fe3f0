#include "daebvp/batch.hpp"

#include <omp.h>

namespace daebvp
{

std::vector<Vector> sample_serial(const SolutionBundle &sol, const std::vector<double> &grid)
{
    std::vector<Vector> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = sol.x(grid[i]);
    return out;
}

std::vector<Vector> sample(const SolutionBundle &sol, const std::vector<double> &grid)
{
    std::vector<Vector> out(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = sol.x(grid[static_cast<std::size_t>(i)]);
    return out;
}

namespace
{

BatchOutcome solve_one(const BvpProblem &prob, const SolverOptions &opts)
{
    BatchOutcome outcome;
    try
    {
        outcome.solution = solve_bvp(prob, opts);
    }
    catch (const Error &e)
    {
        outcome.error = e.code();
        outcome.message = e.what();
    }
    return outcome;
}

} // namespace

std::vector<BatchOutcome> solve_batch_serial(const std::vector<BvpProblem> &problems, const SolverOptions &opts)
{
    std::vector<BatchOutcome> out;
    out.reserve(problems.size());
    for (const BvpProblem &prob : problems)
        out.push_back(solve_one(prob, opts));
    return out;
}

std::vector<BatchOutcome> solve_batch(const std::vector<BvpProblem> &problems, const SolverOptions &opts, int jobs)
{
    std::vector<BatchOutcome> out(problems.size());
    const auto count = static_cast<std::ptrdiff_t>(problems.size());
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = solve_one(problems[static_cast<std::size_t>(i)], opts);
    return out;
}

} // namespace daebvp
