/*
 * Random problems with a known quasi-Weierstrass structure:
 *
 *   E = P0^{-1} blockdiag(I, N0) Q0^{-1},   A = P0^{-1} blockdiag(J0, I) Q0^{-1},
 *
 * N0 a direct sum of nilpotent Jordan blocks whose largest block has size nu,
 * P0 and Q0 random with prescribed condition numbers.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "daebvp/bvp.hpp"
#include "daebvp/expm.hpp"

namespace daebvp::testing
{

struct KnownPencil
{
    Matrix E, A;
    Matrix P0, P0_inv, Q0, Q0_inv;
    Matrix J0, N0;
    Index n1 = 0, n2 = 0;
    int nu = 1;
};

struct CorpusProblem
{
    KnownPencil pencil;
    BvpProblem problem;
    // forcing in transformed coordinates: P0 f = (f1, f2)
    ExpPolySignal f_tilde;
};

class CorpusGenerator
{
public:
    explicit CorpusGenerator(std::uint64_t seed, double max_cond = 1e2) : rng_(seed), max_cond_(max_cond) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    Matrix gaussian(Index rows, Index cols)
    {
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index k = 0; k < cols; ++k)
                m(i, k) = normal();
        return m;
    }

    Vector gaussian(Index n) { return gaussian(n, 1).col(0); }

    Matrix orthogonal(Index n)
    {
        Eigen::HouseholderQR<Matrix> qr(gaussian(n, n));
        return qr.householderQ() * Matrix::Identity(n, n);
    }

    // U diag(s) V^T with log-spaced s in [1, cond]; returns (M, M^{-1}).
    std::pair<Matrix, Matrix> conditioned(Index n, double cond)
    {
        const Matrix U = orthogonal(n);
        const Matrix V = orthogonal(n);
        Vector s(n);
        for (Index i = 0; i < n; ++i)
            s(i) = n == 1 ? 1.0 : std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1));
        const Matrix M = U * s.asDiagonal() * V.transpose();
        const Matrix M_inv = V * s.cwiseInverse().asDiagonal() * U.transpose();
        return {M, M_inv};
    }

    static Matrix nilpotent(Index n2, const std::vector<Index> &blocks)
    {
        Matrix N = Matrix::Zero(n2, n2);
        Index start = 0;
        for (Index b : blocks)
        {
            for (Index i = 0; i + 1 < b; ++i)
                N(start + i, start + i + 1) = 1.0;
            start += b;
        }
        return N;
    }

    KnownPencil pencil(Index n, Index n2, int nu)
    {
        KnownPencil k;
        k.n1 = n - n2;
        k.n2 = n2;
        k.nu = n2 == 0 ? 1 : nu;
        std::vector<Index> blocks;
        if (n2 > 0)
        {
            blocks.push_back(nu);
            Index left = n2 - nu;
            while (left > 0)
            {
                const Index b = std::min<Index>(left, integer(1, nu));
                blocks.push_back(b);
                left -= b;
            }
        }
        k.N0 = nilpotent(n2, blocks);
        k.J0 = gaussian(k.n1, k.n1) / std::sqrt(static_cast<double>(std::max<Index>(k.n1, 1)));
        std::tie(k.P0, k.P0_inv) = conditioned(n, std::pow(10.0, uniform(0.0, std::log10(max_cond_))));
        std::tie(k.Q0, k.Q0_inv) = conditioned(n, std::pow(10.0, uniform(0.0, std::log10(max_cond_))));
        k.E = k.P0_inv * block_diagonal(Matrix::Identity(k.n1, k.n1), k.N0) * k.Q0_inv;
        k.A = k.P0_inv * block_diagonal(k.J0, Matrix::Identity(n2, n2)) * k.Q0_inv;
        return k;
    }

    // n in [1, 8], nu <= 3, E != 0.
    KnownPencil random_pencil()
    {
        for (;;)
        {
            const Index n = integer(1, 8);
            const Index n2 = integer(0, static_cast<int>(n));
            const int nu = n2 == 0 ? 1 : integer(1, std::min<int>(3, static_cast<int>(n2)));
            if (n2 == n && nu == 1)
                continue; // E = 0
            return pencil(n, n2, nu);
        }
    }

    ExpPolySignal random_signal(Index dim)
    {
        ExpPolySignal f(dim);
        const int terms = integer(1, 2);
        for (int t = 0; t < terms; ++t)
        {
            ExpPolyTerm term;
            term.alpha = uniform(-1.0, 1.0);
            const int kind = integer(0, 2);
            term.kind = kind == 0 ? PhaseKind::none : (kind == 1 ? PhaseKind::cos : PhaseKind::sin);
            term.omega = term.kind == PhaseKind::none ? 0.0 : uniform(0.5, 3.0);
            const int degree = integer(0, 2);
            for (int k = 0; k <= degree; ++k)
                term.coeffs.push_back(gaussian(dim));
            f.add_term(std::move(term));
        }
        return f;
    }

    // Structured boundary: only the first n1 rows of B, C, d are nonzero.
    CorpusProblem structured_problem(const KnownPencil &k)
    {
        const Index n = k.n1 + k.n2;
        Matrix B = Matrix::Zero(n, n), C = Matrix::Zero(n, n);
        Vector d = Vector::Zero(n);
        B.topRows(k.n1) = gaussian(k.n1, n);
        C.topRows(k.n1) = gaussian(k.n1, n);
        d.head(k.n1) = gaussian(k.n1);
        const double T = uniform(0.5, 2.0);
        ExpPolySignal f_tilde = random_signal(n);
        ExpPolySignal f = left_multiply(k.P0_inv, f_tilde);
        return {k, BvpProblem{Pencil(k.E, k.A), B, C, d, T, f}, f_tilde};
    }

    CorpusProblem random_structured()
    {
        return structured_problem(random_pencil());
    }

    /*
     * Boundary with C~1 = -B~1 e^{-T J0} in the generator's coordinates, so
     * that D = B~1 + C~1 e^{T J} vanishes.
     */
    CorpusProblem singular_shooting()
    {
        KnownPencil k;
        do
            k = random_pencil();
        while (k.n1 == 0);
        CorpusProblem p = structured_problem(k);
        const Index n = k.n1 + k.n2;
        const Matrix Bt_top = p.problem.B.topRows(k.n1) * k.Q0;
        Matrix Ct_top = gaussian(k.n1, n);
        Ct_top.leftCols(k.n1) = -Bt_top.leftCols(k.n1) * matrix_exponential(-p.problem.T * k.J0);
        p.problem.C.topRows(k.n1) = Ct_top * k.Q0_inv;
        return p;
    }

    // Invertible E (n2 = 0) with general B, C.
    CorpusProblem ode_problem()
    {
        const Index n = integer(1, 8);
        const KnownPencil k = pencil(n, 0, 1);
        CorpusProblem p = structured_problem(k);
        p.problem.B = gaussian(n, n);
        p.problem.C = gaussian(n, n);
        return p;
    }

    std::mt19937_64 &engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    double max_cond_;
};

} // namespace daebvp::testing
