/*
 * Two-point boundary value problems E x' = A x + f(t), B x(0) + C x(T) = d,
 * solved by the parameterization method: with mu = x(0) and u = x - mu the
 * problem decouples under the quasi-Weierstrass transform into
 *
 *   u1' = J (u1 + mu1) + f1,   u1(0) = 0,
 *   N u2' = u2 + mu2 + f2,     u2(0) = 0,
 *
 * the nilpotent block is solved by a finite derivative chain, and mu1 comes
 * from an n1 x n1 linear (shooting) system.
 */

#pragma once

#include <atomic>
#include <memory>
#include <optional>

#include "forcing.hpp"
#include "pencil.hpp"

namespace daebvp
{

struct BvpProblem
{
    Pencil pencil;
    Matrix B;
    Matrix C;
    Vector d;
    double T;
    ExpPolySignal f;

    // Throws InvalidInput / DimensionMismatch.
    void validate() const;
    Index n() const { return pencil.n(); }
};

struct SolverOptions
{
    DecompositionOptions decomposition;
    // Forces lambda* instead of the probe search.
    std::optional<double> lambda;
    // Bottom boundary rows count as zero below `structure * (||B|| + ||C||)`.
    double structure = 1e-10;
    // D is declared singular above this condition number; default
    // 1 / (1e3 * n * eps).
    std::optional<double> max_condition;
    // IVP consistency: ||(Q^{-1} d)_2 - mu2|| <= consistency * (1 + ||d|| + ||mu2||).
    double consistency = 1e-8;

    double condition_limit(Index n) const;
};

struct TransformedBoundary
{
    Matrix B1, B2, C1, C2;
    Vector d1;
    double bottom_residual = 0.0;
    double tolerance = 0.0;
};

// B~ = B Q, C~ = C Q split by (n1, n2). Throws IncompatibleBoundaryStructure
// if the bottom n2 rows of [B~ C~ d] do not vanish.
TransformedBoundary transform_boundary(const BvpProblem &prob, const QwfDecomposition &decomp,
                                       double structure_tol = 1e-10);

// sum_{i=0}^{nu-1} N^i f2^{(i)}(t) as a signal.
ExpPolySignal nilpotent_chain(const Matrix &N, int nu, const ExpPolySignal &f2);

class NilpotentPart
{
public:
    NilpotentPart() = default;
    NilpotentPart(Vector mu2, ExpPolySignal chain);

    const Vector &mu2() const noexcept { return mu2_; }
    // -(chain(t) - chain(0))
    Vector u2(double t) const;
    Vector u2dot(double t) const;

private:
    Vector mu2_;
    ExpPolySignal chain_;
    ExpPolySignal chain_dot_;
    Vector chain_at_zero_;
};

// mu2 = -sum N^i f2^{(i)}(0), u2(t) = -sum N^i [f2^{(i)}(t) - f2^{(i)}(0)].
NilpotentPart solve_nilpotent_part(const QwfDecomposition &decomp, const ExpPolySignal &f2);

struct ShootingSystem
{
    Matrix D;
    Vector rhs;
    double cond_estimate = 1.0;
};

ShootingSystem build_shooting_system(const TransformedBoundary &tb, const QwfDecomposition &decomp,
                                     const ExpPolySignal &f1, const ExpPolySignal &f2, double T);

// Throws SingularShootingMatrix (value = condition estimate) when
// cond(D) > max_condition.
Vector solve_shooting(const ShootingSystem &sys, double max_condition);

class DifferentialPart
{
public:
    DifferentialPart() = default;
    DifferentialPart(Matrix J, Vector mu1, ExpPolySignal f1);

    // (e^{tJ} - I) mu1 + int_0^t e^{(t-s)J} f1(s) ds
    Vector u1(double t) const;
    // J (u1 + mu1) + f1(t)
    Vector u1dot(double t) const;

private:
    Matrix J_;
    Vector mu1_;
    ExpPolySignal f1_;
};

DifferentialPart solve_differential_part(const QwfDecomposition &decomp, const Vector &mu1,
                                         const ExpPolySignal &f1);

struct SolutionDiagnostics
{
    double cond_D = 1.0;
    double bottom_residual = 0.0;
    double structure_tolerance = 0.0;
    double max_condition = 0.0;
    double rank_threshold = 0.0;
    double consistency_residual = 0.0;
    double consistency_tolerance = 0.0;
    double reconstruction_E = 0.0;
    double reconstruction_A = 0.0;
    double cond_P = 1.0;
    double cond_Q = 1.0;
    double T = 0.0;
};

/*
 * The closed-form solution x(t) = Q (mu~ + u~(t)). Copies share immutable
 * state and may be evaluated concurrently. Evaluations outside [0, T] are
 * allowed and counted.
 */
class SolutionBundle
{
public:
    SolutionBundle(QwfDecomposition decomp, Vector mu1, DifferentialPart differential, NilpotentPart nilpotent,
                   SolutionDiagnostics diagnostics);

    const Vector &mu1() const { return state_->mu1; }
    const Vector &mu2() const { return state_->nilpotent.mu2(); }
    // (mu1, mu2)
    Vector mu_tilde() const;
    // (u1(t), u2(t))
    Vector u_tilde(double t) const;
    Vector u_tilde_dot(double t) const;

    Vector x(double t) const;
    Vector xdot(double t) const;

    const QwfDecomposition &decomposition() const { return state_->decomp; }
    const SolutionDiagnostics &diagnostics() const { return state_->diagnostics; }
    std::size_t extrapolated_evaluations() const { return state_->extrapolated->load(); }

private:
    void note_time(double t) const;

    struct State
    {
        QwfDecomposition decomp;
        Vector mu1;
        DifferentialPart differential;
        NilpotentPart nilpotent;
        SolutionDiagnostics diagnostics;
        std::unique_ptr<std::atomic<std::size_t>> extrapolated;
    };
    std::shared_ptr<const State> state_;
};

// Front checks shared by both solvers: ZeroEMatrix, then NotRegular.
QwfDecomposition decompose(const Pencil &pencil, const SolverOptions &opts);

/*
 * Full pipeline. Throws ZeroEMatrix, NotRegular, IncompatibleBoundaryStructure
 * or SingularShootingMatrix.
 */
SolutionBundle solve_bvp(const BvpProblem &prob, const SolverOptions &opts = {});

/*
 * x(0) = d. mu1 = (Q^{-1} d)_1; the nilpotent block of Q^{-1} d must equal
 * -sum N^i f2^{(i)}(0), else InconsistentInitialValue.
 */
SolutionBundle solve_ivp(const Pencil &pencil, const Vector &d, double T, const ExpPolySignal &f,
                         const SolverOptions &opts = {});

struct Parameterization
{
    Vector mu;     // x(0); satisfies E mu = E x(0)
    Vector u;      // x(t) - mu
    Vector mu_tilde;
    Vector u_tilde;
};

// x -> (mu, u) and their transformed coordinates under Q^{-1}.
Parameterization parameterize(const SolutionBundle &sol, double t);

// (mu~, u~) -> Q (mu~ + u~)
Vector assemble(const QwfDecomposition &decomp, const Vector &mu_tilde, const Vector &u_tilde);

} // namespace daebvp
