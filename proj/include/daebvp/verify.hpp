/*
 * Independent checks of candidate solutions. Everything here consumes only
 * the problem data (E, A, B, C, d, T, f) and the x / xdot evaluators; the
 * decomposition (P, Q, J, N) is never used.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bvp.hpp"

namespace daebvp
{

struct Trajectory
{
    std::function<Vector(double)> x;
    std::function<Vector(double)> xdot;

    static Trajectory of(const SolutionBundle &sol);
};

// Chebyshev-Lobatto points T/2 (1 - cos(pi j / (count - 1))), j = 0..count-1.
std::vector<double> chebyshev_grid(double T, std::size_t count);

struct ResidualTolerances
{
    double equation = 1e-8;   // scaled by 1 + max_grid ||f||_inf
    double boundary = 1e-8;   // scaled by 1 + ||d||
    double derivative = 1e-6; // on ||xdot_fd - xdot|| / (1 + ||xdot||)
};

struct ResidualReport
{
    double equation_residual_max = 0.0; // max_grid ||E xdot - A x - f||_inf
    double boundary_residual = 0.0;     // ||B x(0) + C x(T) - d||_inf
    double derivative_check_max = 0.0;
    double equation_scale = 1.0;
    double boundary_scale = 1.0;
    std::vector<double> grid;
    bool passed = false;
    ResidualTolerances tolerances;
};

// Central-difference step used by the derivative cross-check.
inline double finite_difference_step(double t)
{
    return 1e-5 * std::max(1.0, std::abs(t));
}

// ||E xdot(t) - A x(t) - f(t)||_inf at every grid point (OpenMP over points).
std::vector<double> equation_residuals(const BvpProblem &prob, const Trajectory &traj, const std::vector<double> &grid);

// Grid points evaluated in parallel (OpenMP).
ResidualReport residual_check(const BvpProblem &prob, const Trajectory &traj, std::size_t grid_size = 33,
                              const ResidualTolerances &tols = {});

// Serial reference of residual_check; results are identical.
ResidualReport residual_check_serial(const BvpProblem &prob, const Trajectory &traj, std::size_t grid_size = 33,
                                     const ResidualTolerances &tols = {});

/*
 * Classical single shooting for invertible E with fundamental matrix
 * e^{t E^{-1} A}: x(t) = Phi(t) x0 + p(t), with the particular term p(t)
 * from composite Gauss-Legendre quadrature and
 * (B + C Phi(T)) x0 = d - C p(T).
 */
class OdeShootingSolution
{
public:
    OdeShootingSolution(Matrix system, Vector x0, Matrix E_inv, ExpPolySignal f, double rate);

    Vector x(double t) const;
    Vector particular(double t) const;
    const Vector &x0() const { return x0_; }

private:
    Matrix system_; // E^{-1} A
    Vector x0_;
    Matrix E_inv_;
    ExpPolySignal f_;
    double rate_;
};

// nullopt when cond(E) exceeds max_cond_E (not applicable). Throws
// OracleSingular if B + C Phi(T) is singular.
std::optional<OdeShootingSolution> ode_shooting_oracle(const BvpProblem &prob, double max_cond_E = 1e8);

// Exact coefficients c_0..c_n of det(sE - A) for integer pencils, n <= 6, by
// fraction-free (Bareiss) elimination over Z[s]. Throws SizeLimitExceeded,
// InvalidInput for non-integer entries, Overflow if int64 is exceeded.
std::vector<std::int64_t> symbolic_determinant(const Pencil &pencil);

} // namespace daebvp
