/*
 * Regularity analysis of the matrix pencil (E, A) and its quasi-Weierstrass
 * decomposition
 *
 *   P E Q = blockdiag(I_n1, N),   P A Q = blockdiag(J, I_n2),
 *
 * with N nilpotent of index nu. J and N are not brought to Jordan form; any
 * representative of the two blocks is returned.
 */

#pragma once

#include <optional>
#include <vector>

#include "types.hpp"

namespace daebvp
{

class Pencil
{
public:
    // Throws InvalidInput / DimensionMismatch on non-square, mismatched,
    // empty or non-finite input.
    Pencil(Matrix E, Matrix A);

    const Matrix &E() const noexcept { return E_; }
    const Matrix &A() const noexcept { return A_; }
    Index n() const noexcept { return E_.rows(); }

    // lambda * E - A
    Matrix shifted(double lambda) const { return lambda * E_ - A_; }

private:
    Matrix E_;
    Matrix A_;
};

/*
 * Threshold below which a singular value counts as zero:
 * `relative * reference`, where the reference is sigma_max of the matrix
 * itself for lambda*E - A and ||M||_2^k for the powers M^k in the index
 * chain. Default relative factor is n * eps for the former and
 * 1e3 * n * eps for the latter (powers accumulate rounding). An absolute
 * value, when set, wins.
 */
struct RankTolerance
{
    std::optional<double> relative;
    std::optional<double> absolute;

    double threshold(double reference, Index n, double default_factor = 1.0) const;
};

inline constexpr double power_chain_factor = 1e3;

// Numerical rank of m under the tolerance, relative to its own sigma_max.
Index numerical_rank(const Matrix &m, const RankTolerance &tol);

struct ProbePoint
{
    double lambda;
    double smallest_singular_value;
    double largest_singular_value;
    double determinant;
};

struct RegularityCertificate
{
    bool regular = false;
    std::vector<ProbePoint> probe_points;
    // Coefficients c_0..c_n of det(sE - A) = sum c_k s^k, interpolated from
    // the probe determinants.
    std::optional<std::vector<double>> det_poly_coeffs;
    std::optional<double> chosen_lambda;
};

// The deterministic probe sequence 0, 1, -1, 2, -2, ... of length count.
std::vector<double> probe_sequence(Index count);

/*
 * Evaluates det(sE - A) at n+1 distinct probes. The pencil is regular iff
 * some probe leaves lambda*E - A numerically nonsingular; the chosen lambda
 * is the probe with the largest smallest singular value.
 */
RegularityCertificate check_regularity(const Pencil &pencil, const RankTolerance &tol = {});

// Certificate pinned to a caller-supplied lambda. Throws SingularTransform
// when lambda*E - A is numerically singular there.
RegularityCertificate certify_lambda(const Pencil &pencil, double lambda, const RankTolerance &tol = {});

struct QwfDecomposition
{
    Matrix P;
    Matrix Q;
    Matrix Q_inv;
    Matrix J;
    Matrix N;
    Index n1 = 0;
    Index n2 = 0;
    int nu = 1;
    double lambda_star = 0.0;

    // diagnostics
    double cond_P = 1.0;
    double cond_Q = 1.0;
    double residual_E = 0.0; // ||P E Q - blockdiag(I, N)||_F
    double residual_A = 0.0; // ||P A Q - blockdiag(J, I)||_F
    double rank_threshold = 0.0;
};

struct DecompositionOptions
{
    RankTolerance rank;
    // Reconstruction residuals must stay below `reconstruction * (1 + ||.||_F)`.
    double reconstruction = 1e-8;
    // Bound on ||N^nu|| (absolute) used by the nilpotency re-check.
    double nilpotency = 1e-10;
};

/*
 * Builds the decomposition from M = (lambda* E - A)^{-1} E: Q spans
 * [range(M^nu) | ker(M^nu)], which splits M into an invertible block M1 and
 * a nilpotent block M2, and then
 *
 *   P = blockdiag(M1^{-1}, (lambda* M2 - I)^{-1}) Q^{-1} (lambda* E - A)^{-1}
 *   J = lambda* I - M1^{-1},   N = (lambda* M2 - I)^{-1} M2.
 *
 * Throws NotRegular if the certificate says so, SingularTransform if
 * lambda* E - A is numerically singular, DecompositionFailed if the
 * reconstruction check fails.
 */
QwfDecomposition quasi_weierstrass(const Pencil &pencil, const RegularityCertificate &cert,
                                   const DecompositionOptions &opts = {});

// Returns nu after re-verifying N^nu = 0 and N^(nu-1) != 0. The absolute
// tolerance applies to the Frobenius norm of the power.
int pencil_index(const QwfDecomposition &decomp, double tol = 1e-10);

// Smallest k >= 1 with ||N^k||_F <= tol; 1 for an empty N.
int nilpotency_index(const Matrix &N, double tol = 1e-10);

// 2-norm condition number via singular values; infinity when singular.
double condition_number(const Matrix &m);

} // namespace daebvp
