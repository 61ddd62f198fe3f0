#include "daebvp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "daebvp/error.hpp"
#include "daebvp/pencil.hpp"

namespace daebvp
{

Trajectory Trajectory::of(const SolutionBundle &sol)
{
    return {[sol](double t) { return sol.x(t); }, [sol](double t) { return sol.xdot(t); }};
}

std::vector<double> chebyshev_grid(double T, std::size_t count)
{
    if (count < 2)
        throw Error(ErrorCode::InvalidInput, "chebyshev_grid: need at least two points");
    std::vector<double> grid(count);
    const double last = static_cast<double>(count - 1);
    for (std::size_t j = 0; j < count; ++j)
        grid[j] = 0.5 * T * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) / last));
    grid.front() = 0.0;
    grid.back() = T;
    return grid;
}

namespace
{

struct PointResidual
{
    double equation = 0.0;
    double forcing = 0.0;
    double derivative = 0.0;
};

PointResidual point_residual(const BvpProblem &prob, const Trajectory &traj, double t)
{
    const Matrix &E = prob.pencil.E();
    const Matrix &A = prob.pencil.A();
    const Vector x = traj.x(t);
    const Vector xdot = traj.xdot(t);
    const Vector f = prob.f(t);

    const double h = finite_difference_step(t);
    const Vector fd = (traj.x(t + h) - traj.x(t - h)) / (2.0 * h);

    PointResidual r;
    r.equation = (E * xdot - A * x - f).lpNorm<Eigen::Infinity>();
    r.forcing = f.lpNorm<Eigen::Infinity>();
    r.derivative = (fd - xdot).lpNorm<Eigen::Infinity>() / (1.0 + xdot.lpNorm<Eigen::Infinity>());
    return r;
}

ResidualReport finish(const BvpProblem &prob, const Trajectory &traj, std::vector<double> grid,
                      const std::vector<PointResidual> &points, const ResidualTolerances &tols)
{
    ResidualReport report;
    report.tolerances = tols;
    double forcing_max = 0.0;
    for (const PointResidual &p : points)
    {
        // NaN must not slip through max()
        report.equation_residual_max =
            std::isnan(p.equation) ? p.equation : std::max(report.equation_residual_max, p.equation);
        report.derivative_check_max =
            std::isnan(p.derivative) ? p.derivative : std::max(report.derivative_check_max, p.derivative);
        forcing_max = std::max(forcing_max, p.forcing);
    }
    report.boundary_residual =
        (prob.B * traj.x(0.0) + prob.C * traj.x(prob.T) - prob.d).lpNorm<Eigen::Infinity>();
    report.equation_scale = 1.0 + forcing_max;
    report.boundary_scale = 1.0 + prob.d.lpNorm<Eigen::Infinity>();
    report.grid = std::move(grid);
    report.passed = report.equation_residual_max <= tols.equation * report.equation_scale &&
                    report.boundary_residual <= tols.boundary * report.boundary_scale &&
                    report.derivative_check_max <= tols.derivative;
    return report;
}

} // namespace

std::vector<double> equation_residuals(const BvpProblem &prob, const Trajectory &traj, const std::vector<double> &grid)
{
    std::vector<double> out(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i)
    {
        const double t = grid[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] =
            (prob.pencil.E() * traj.xdot(t) - prob.pencil.A() * traj.x(t) - prob.f(t)).lpNorm<Eigen::Infinity>();
    }
    return out;
}

ResidualReport residual_check_serial(const BvpProblem &prob, const Trajectory &traj, std::size_t grid_size,
                                     const ResidualTolerances &tols)
{
    std::vector<double> grid = chebyshev_grid(prob.T, grid_size);
    std::vector<PointResidual> points(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        points[i] = point_residual(prob, traj, grid[i]);
    return finish(prob, traj, std::move(grid), points, tols);
}

ResidualReport residual_check(const BvpProblem &prob, const Trajectory &traj, std::size_t grid_size,
                              const ResidualTolerances &tols)
{
    std::vector<double> grid = chebyshev_grid(prob.T, grid_size);
    std::vector<PointResidual> points(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        points[static_cast<std::size_t>(i)] = point_residual(prob, traj, grid[static_cast<std::size_t>(i)]);
    return finish(prob, traj, std::move(grid), points, tols);
}

OdeShootingSolution::OdeShootingSolution(Matrix system, Vector x0, Matrix E_inv, ExpPolySignal f, double rate)
    : system_(std::move(system)), x0_(std::move(x0)), E_inv_(std::move(E_inv)), f_(std::move(f)), rate_(rate)
{
}

Vector OdeShootingSolution::particular(double t) const
{
    const Index n = system_.rows();
    Vector acc = Vector::Zero(n);
    if (t == 0.0 || f_.terms().empty())
        return acc;

    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto &nodes = rule::abscissa();
    const auto &weights = rule::weights();
    const double span = std::abs(t);
    const int panels = 1 + static_cast<int>(std::ceil(2.0 * span * rate_));
    const double width = t / panels;

    auto integrand = [&](double s) -> Vector {
        const Matrix phi = (static_cast<Matrix>((t - s) * system_)).exp();
        return phi * (E_inv_ * f_(s));
    };
    for (int p = 0; p < panels; ++p)
    {
        const double mid = (p + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t k = 0; k < nodes.size(); ++k)
        {
            if (nodes[k] == 0.0)
            {
                acc += weights[k] * half * integrand(mid);
                continue;
            }
            acc += weights[k] * half * (integrand(mid - half * nodes[k]) + integrand(mid + half * nodes[k]));
        }
    }
    return acc;
}

Vector OdeShootingSolution::x(double t) const
{
    const Matrix phi = (static_cast<Matrix>(t * system_)).exp();
    return phi * x0_ + particular(t);
}

std::optional<OdeShootingSolution> ode_shooting_oracle(const BvpProblem &prob, double max_cond_E)
{
    prob.validate();
    const Matrix &E = prob.pencil.E();
    if (!(condition_number(E) <= max_cond_E))
        return std::nullopt;

    const Eigen::PartialPivLU<Matrix> lu(E);
    Matrix system = lu.solve(prob.pencil.A());
    Matrix E_inv = lu.inverse();

    double rate = system.cwiseAbs().colwise().sum().maxCoeff();
    for (const ExpPolyTerm &term : prob.f.terms())
        rate = std::max(rate, std::abs(term.alpha) + std::abs(term.omega) + static_cast<double>(term.degree()));

    OdeShootingSolution partial(system, Vector::Zero(prob.n()), E_inv, prob.f, rate);
    const Matrix phi_T = (static_cast<Matrix>(prob.T * system)).exp();
    const Matrix shooting = prob.B + prob.C * phi_T;
    if (!(condition_number(shooting) <= 1e12))
        throw Error(ErrorCode::OracleSingular, "ode_shooting_oracle: B + C Phi(T) is singular",
                    condition_number(shooting));
    Vector x0 = shooting.fullPivLu().solve(prob.d - prob.C * partial.particular(prob.T));
    return OdeShootingSolution(std::move(system), std::move(x0), std::move(E_inv), prob.f, rate);
}

} // namespace daebvp
