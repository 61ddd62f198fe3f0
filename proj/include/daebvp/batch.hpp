/*
 * Data-parallel drivers. Each has a serial reference that produces the same
 * results; the OpenMP versions only distribute independent work items.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bvp.hpp"
#include "error.hpp"

namespace daebvp
{

// x(t) for every t in the grid.
std::vector<Vector> sample(const SolutionBundle &sol, const std::vector<double> &grid);
std::vector<Vector> sample_serial(const SolutionBundle &sol, const std::vector<double> &grid);

struct BatchOutcome
{
    std::optional<SolutionBundle> solution;
    std::optional<ErrorCode> error;
    std::string message;

    bool ok() const { return solution.has_value(); }
};

// Solves independent problems; failures are captured per problem. `jobs`
// <= 0 leaves the thread count to OpenMP.
std::vector<BatchOutcome> solve_batch(const std::vector<BvpProblem> &problems, const SolverOptions &opts = {},
                                      int jobs = 0);
std::vector<BatchOutcome> solve_batch_serial(const std::vector<BvpProblem> &problems,
                                             const SolverOptions &opts = {});

} // namespace daebvp
