#include "daebvp/bvp.hpp"

#include <cmath>
#include <sstream>

#include "daebvp/error.hpp"
#include "daebvp/expm.hpp"

namespace daebvp
{

void BvpProblem::validate() const
{
    const Index n = pencil.n();
    if (!(T > 0.0) || !std::isfinite(T))
        throw Error(ErrorCode::InvalidInput, "problem: T must be a positive finite number");
    if (B.rows() != n || B.cols() != n || C.rows() != n || C.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "problem: B and C must be n x n");
    if (d.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "problem: d must have length n");
    if (f.dim() != n)
        throw Error(ErrorCode::DimensionMismatch, "problem: forcing dimension must be n");
    if (!B.allFinite() || !C.allFinite() || !d.allFinite())
        throw Error(ErrorCode::InvalidInput, "problem: non-finite boundary data");
}

double SolverOptions::condition_limit(Index n) const
{
    if (max_condition)
        return *max_condition;
    return 1.0 / (1e3 * static_cast<double>(std::max<Index>(n, 1)) * machine_epsilon);
}

TransformedBoundary transform_boundary(const BvpProblem &prob, const QwfDecomposition &decomp, double structure_tol)
{
    const Index n1 = decomp.n1;
    const Index n2 = decomp.n2;
    if (decomp.Q.rows() != prob.n())
        throw Error(ErrorCode::DimensionMismatch, "transform_boundary: decomposition does not match problem");

    const Matrix Bt = prob.B * decomp.Q;
    const Matrix Ct = prob.C * decomp.Q;

    TransformedBoundary tb;
    tb.B1 = Bt.topLeftCorner(n1, n1);
    tb.B2 = Bt.topRightCorner(n1, n2);
    tb.C1 = Ct.topLeftCorner(n1, n1);
    tb.C2 = Ct.topRightCorner(n1, n2);
    tb.d1 = prob.d.head(n1);

    const double bottom_sq = Bt.bottomRows(n2).squaredNorm() + Ct.bottomRows(n2).squaredNorm() +
                             prob.d.tail(n2).squaredNorm();
    tb.bottom_residual = std::sqrt(bottom_sq);
    tb.tolerance = structure_tol * (prob.B.norm() + prob.C.norm());
    if (tb.bottom_residual > tb.tolerance)
    {
        std::ostringstream msg;
        msg << "the last " << n2 << " rows of [BQ CQ d] must vanish (residual "
            << tb.bottom_residual << ", tolerance " << tb.tolerance << "); exactly n1 = " << n1
            << " boundary conditions may be imposed";
        throw Error(ErrorCode::IncompatibleBoundaryStructure, msg.str(), tb.bottom_residual);
    }
    return tb;
}

ExpPolySignal nilpotent_chain(const Matrix &N, int nu, const ExpPolySignal &f2)
{
    if (N.rows() != f2.dim())
        throw Error(ErrorCode::DimensionMismatch, "nilpotent_chain: N and f2 dimensions differ");
    const Index n2 = N.rows();
    ExpPolySignal chain(n2);
    if (n2 == 0)
        return chain;
    Matrix power = Matrix::Identity(n2, n2);
    ExpPolySignal derivative = f2;
    for (int i = 0; i < nu; ++i)
    {
        chain = chain + left_multiply(power, derivative);
        power = power * N;
        derivative = differentiate(derivative);
    }
    return simplify(chain);
}

NilpotentPart::NilpotentPart(Vector mu2, ExpPolySignal chain)
    : mu2_(std::move(mu2)), chain_(std::move(chain)), chain_dot_(differentiate(chain_)), chain_at_zero_(chain_(0.0))
{
}

Vector NilpotentPart::u2(double t) const
{
    return -(chain_(t) - chain_at_zero_);
}

Vector NilpotentPart::u2dot(double t) const
{
    return -chain_dot_(t);
}

NilpotentPart solve_nilpotent_part(const QwfDecomposition &decomp, const ExpPolySignal &f2)
{
    ExpPolySignal chain = nilpotent_chain(decomp.N, decomp.nu, f2);
    Vector mu2 = -chain(0.0);
    return NilpotentPart(std::move(mu2), std::move(chain));
}

ShootingSystem build_shooting_system(const TransformedBoundary &tb, const QwfDecomposition &decomp,
                                     const ExpPolySignal &f1, const ExpPolySignal &f2, double T)
{
    const Index n1 = decomp.n1;
    ShootingSystem sys;
    if (n1 == 0)
    {
        sys.D = Matrix(0, 0);
        sys.rhs = Vector(0);
        return sys;
    }

    const ExpConvolution conv = exp_and_convolve(decomp.J, f1, T);
    const Matrix action = conv.exp_tJ - Matrix::Identity(n1, n1);
    sys.D = tb.B1 + tb.C1 + tb.C1 * action;

    const ExpPolySignal chain = nilpotent_chain(decomp.N, decomp.nu, f2);
    sys.rhs = tb.d1 - tb.C1 * conv.integral;
    if (decomp.n2 > 0)
        sys.rhs += tb.B2 * chain(0.0) + tb.C2 * chain(T);

    // Relative to the summands so that cancellation down to rounding noise
    // reads as singular.
    const Eigen::VectorXd s = Eigen::JacobiSVD<Matrix>(sys.D).singularValues();
    const double scale = std::max(s(0), tb.B1.norm() + (tb.C1 * conv.exp_tJ).norm());
    const double smin = s(s.size() - 1);
    sys.cond_estimate = smin > 0.0 ? scale / smin : std::numeric_limits<double>::infinity();
    return sys;
}

Vector solve_shooting(const ShootingSystem &sys, double max_condition)
{
    const Index n1 = sys.D.rows();
    if (n1 == 0)
        return Vector(0);
    if (!(sys.cond_estimate <= max_condition))
    {
        std::ostringstream msg;
        msg << "shooting matrix D is singular (condition estimate " << sys.cond_estimate << " > " << max_condition
            << "): no unique solution";
        throw Error(ErrorCode::SingularShootingMatrix, msg.str(), sys.cond_estimate);
    }
    const Vector mu1 = sys.D.fullPivLu().solve(sys.rhs);
    const double residual = (sys.D * mu1 - sys.rhs).norm();
    if (!(residual <= 1e-8 * (sys.D.norm() * mu1.norm() + sys.rhs.norm())))
        throw Error(ErrorCode::SingularShootingMatrix, "shooting system solve left a large residual", residual);
    return mu1;
}

DifferentialPart::DifferentialPart(Matrix J, Vector mu1, ExpPolySignal f1)
    : J_(std::move(J)), mu1_(std::move(mu1)), f1_(std::move(f1))
{
}

Vector DifferentialPart::u1(double t) const
{
    if (J_.rows() == 0)
        return Vector(0);
    const ExpConvolution conv = exp_and_convolve(J_, f1_, t);
    return (conv.exp_tJ - Matrix::Identity(J_.rows(), J_.cols())) * mu1_ + conv.integral;
}

Vector DifferentialPart::u1dot(double t) const
{
    if (J_.rows() == 0)
        return Vector(0);
    return J_ * (u1(t) + mu1_) + f1_(t);
}

DifferentialPart solve_differential_part(const QwfDecomposition &decomp, const Vector &mu1, const ExpPolySignal &f1)
{
    if (mu1.size() != decomp.n1 || f1.dim() != decomp.n1)
        throw Error(ErrorCode::DimensionMismatch, "solve_differential_part: dimensions differ from n1");
    return DifferentialPart(decomp.J, mu1, f1);
}

SolutionBundle::SolutionBundle(QwfDecomposition decomp, Vector mu1, DifferentialPart differential,
                               NilpotentPart nilpotent, SolutionDiagnostics diagnostics)
{
    auto state = std::make_shared<State>();
    state->decomp = std::move(decomp);
    state->mu1 = std::move(mu1);
    state->differential = std::move(differential);
    state->nilpotent = std::move(nilpotent);
    state->diagnostics = diagnostics;
    state->extrapolated = std::make_unique<std::atomic<std::size_t>>(0);
    state_ = std::move(state);
}

void SolutionBundle::note_time(double t) const
{
    if (t < 0.0 || t > state_->diagnostics.T)
        state_->extrapolated->fetch_add(1, std::memory_order_relaxed);
}

Vector SolutionBundle::mu_tilde() const
{
    Vector mu(state_->decomp.n1 + state_->decomp.n2);
    mu << state_->mu1, state_->nilpotent.mu2();
    return mu;
}

Vector SolutionBundle::u_tilde(double t) const
{
    Vector u(state_->decomp.n1 + state_->decomp.n2);
    u << state_->differential.u1(t), state_->nilpotent.u2(t);
    return u;
}

Vector SolutionBundle::u_tilde_dot(double t) const
{
    Vector u(state_->decomp.n1 + state_->decomp.n2);
    u << state_->differential.u1dot(t), state_->nilpotent.u2dot(t);
    return u;
}

Vector SolutionBundle::x(double t) const
{
    note_time(t);
    return assemble(state_->decomp, mu_tilde(), u_tilde(t));
}

Vector SolutionBundle::xdot(double t) const
{
    note_time(t);
    return state_->decomp.Q * u_tilde_dot(t);
}

QwfDecomposition decompose(const Pencil &pencil, const SolverOptions &opts)
{
    if (pencil.E().isZero(0.0))
        throw Error(ErrorCode::ZeroEMatrix,
                    "E = 0: the equation is purely algebraic and the parameterization E mu = E x(0) is not "
                    "applicable");
    const RankTolerance &rank = opts.decomposition.rank;
    const RegularityCertificate cert =
        opts.lambda ? certify_lambda(pencil, *opts.lambda, rank) : check_regularity(pencil, rank);
    if (!cert.regular)
        throw Error(ErrorCode::NotRegular, "the pencil (E, A) is not regular: det(sE - A) vanishes identically");
    return quasi_weierstrass(pencil, cert, opts.decomposition);
}

namespace
{

struct SplitForcing
{
    ExpPolySignal f1;
    ExpPolySignal f2;
};

SplitForcing split_forcing(const QwfDecomposition &decomp, const ExpPolySignal &f)
{
    return {left_multiply(decomp.P.topRows(decomp.n1), f), left_multiply(decomp.P.bottomRows(decomp.n2), f)};
}

SolutionDiagnostics base_diagnostics(const QwfDecomposition &decomp, double T)
{
    SolutionDiagnostics diag;
    diag.rank_threshold = decomp.rank_threshold;
    diag.reconstruction_E = decomp.residual_E;
    diag.reconstruction_A = decomp.residual_A;
    diag.cond_P = decomp.cond_P;
    diag.cond_Q = decomp.cond_Q;
    diag.T = T;
    return diag;
}

} // namespace

SolutionBundle solve_bvp(const BvpProblem &prob, const SolverOptions &opts)
{
    prob.validate();
    QwfDecomposition decomp = decompose(prob.pencil, opts);
    const TransformedBoundary tb = transform_boundary(prob, decomp, opts.structure);
    SplitForcing forcing = split_forcing(decomp, prob.f);

    NilpotentPart nilpotent = solve_nilpotent_part(decomp, forcing.f2);
    const ShootingSystem sys = build_shooting_system(tb, decomp, forcing.f1, forcing.f2, prob.T);

    SolutionDiagnostics diag = base_diagnostics(decomp, prob.T);
    diag.cond_D = sys.cond_estimate;
    diag.bottom_residual = tb.bottom_residual;
    diag.structure_tolerance = tb.tolerance;
    diag.max_condition = opts.condition_limit(prob.n());

    Vector mu1 = solve_shooting(sys, diag.max_condition);
    DifferentialPart differential = solve_differential_part(decomp, mu1, forcing.f1);
    return SolutionBundle(std::move(decomp), std::move(mu1), std::move(differential), std::move(nilpotent), diag);
}

SolutionBundle solve_ivp(const Pencil &pencil, const Vector &d, double T, const ExpPolySignal &f,
                         const SolverOptions &opts)
{
    const Index n = pencil.n();
    if (!(T > 0.0) || !std::isfinite(T))
        throw Error(ErrorCode::InvalidInput, "ivp: T must be a positive finite number");
    if (d.size() != n || f.dim() != n)
        throw Error(ErrorCode::DimensionMismatch, "ivp: d and f must have dimension n");
    if (!d.allFinite())
        throw Error(ErrorCode::InvalidInput, "ivp: non-finite initial value");

    QwfDecomposition decomp = decompose(pencil, opts);
    SplitForcing forcing = split_forcing(decomp, f);
    NilpotentPart nilpotent = solve_nilpotent_part(decomp, forcing.f2);

    const Vector mu = decomp.Q_inv * d;
    Vector mu1 = mu.head(decomp.n1);

    SolutionDiagnostics diag = base_diagnostics(decomp, T);
    diag.consistency_residual = (mu.tail(decomp.n2) - nilpotent.mu2()).norm();
    diag.consistency_tolerance = opts.consistency * (1.0 + d.norm() + nilpotent.mu2().norm());
    if (!(diag.consistency_residual <= diag.consistency_tolerance))
    {
        std::ostringstream msg;
        msg << "the algebraic block of Q^{-1} d misses -sum N^i f2^(i)(0) by "
            << diag.consistency_residual << " (tolerance " << diag.consistency_tolerance << ")";
        throw Error(ErrorCode::InconsistentInitialValue, msg.str(), diag.consistency_residual);
    }

    DifferentialPart differential = solve_differential_part(decomp, mu1, forcing.f1);
    return SolutionBundle(std::move(decomp), std::move(mu1), std::move(differential), std::move(nilpotent), diag);
}

Parameterization parameterize(const SolutionBundle &sol, double t)
{
    Parameterization p;
    p.mu = sol.x(0.0);
    p.u = sol.x(t) - p.mu;
    p.mu_tilde = sol.decomposition().Q_inv * p.mu;
    p.u_tilde = sol.decomposition().Q_inv * p.u;
    return p;
}

Vector assemble(const QwfDecomposition &decomp, const Vector &mu_tilde, const Vector &u_tilde)
{
    return decomp.Q * (mu_tilde + u_tilde);
}

} // namespace daebvp
