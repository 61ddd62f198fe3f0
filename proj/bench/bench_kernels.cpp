// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "daebvp/batch.hpp"
#include "daebvp/verify.hpp"
#include "support/corpus.hpp"

using namespace daebvp;

namespace
{

std::vector<BvpProblem> problems(int count)
{
    testing::CorpusGenerator gen(7);
    std::vector<BvpProblem> out;
    while (static_cast<int>(out.size()) < count)
    {
        const testing::KnownPencil k = gen.pencil(8, 3, 3);
        out.push_back(gen.structured_problem(k).problem);
    }
    return out;
}

const BvpProblem &one_problem()
{
    static const BvpProblem p = problems(1).front();
    return p;
}

const SolutionBundle &one_solution()
{
    static const SolutionBundle sol = solve_bvp(one_problem());
    return sol;
}

void residual_parallel(benchmark::State &state)
{
    const Trajectory traj = Trajectory::of(one_solution());
    for (auto _ : state)
        benchmark::DoNotOptimize(residual_check(one_problem(), traj, static_cast<std::size_t>(state.range(0))));
}

void residual_serial(benchmark::State &state)
{
    const Trajectory traj = Trajectory::of(one_solution());
    for (auto _ : state)
        benchmark::DoNotOptimize(residual_check_serial(one_problem(), traj, static_cast<std::size_t>(state.range(0))));
}

void sample_parallel(benchmark::State &state)
{
    const std::vector<double> grid = chebyshev_grid(one_problem().T, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(sample(one_solution(), grid));
}

void sample_reference(benchmark::State &state)
{
    const std::vector<double> grid = chebyshev_grid(one_problem().T, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_serial(one_solution(), grid));
}

void batch_parallel(benchmark::State &state)
{
    const std::vector<BvpProblem> ps = problems(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_batch(ps));
}

void batch_serial(benchmark::State &state)
{
    const std::vector<BvpProblem> ps = problems(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_batch_serial(ps));
}

} // namespace

BENCHMARK(residual_parallel)->Arg(33)->Arg(257)->Arg(2049);
BENCHMARK(residual_serial)->Arg(33)->Arg(257)->Arg(2049);
BENCHMARK(sample_parallel)->Arg(257)->Arg(4097);
BENCHMARK(sample_reference)->Arg(257)->Arg(4097);
BENCHMARK(batch_parallel)->Arg(16)->Arg(64);
BENCHMARK(batch_serial)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
