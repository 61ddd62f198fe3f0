#include "daebvp/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "daebvp/error.hpp"

namespace daebvp
{

namespace
{

Eigen::VectorXd singular_values(const Matrix &m)
{
    if (m.size() == 0)
        return Eigen::VectorXd();
    return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

} // namespace

Pencil::Pencil(Matrix E, Matrix A) : E_(std::move(E)), A_(std::move(A))
{
    if (E_.rows() == 0 || E_.rows() != E_.cols())
        throw Error(ErrorCode::InvalidInput, "pencil: E must be square with n >= 1");
    if (A_.rows() != E_.rows() || A_.cols() != E_.cols())
        throw Error(ErrorCode::DimensionMismatch, "pencil: E and A must have the same dimension");
    if (!E_.allFinite() || !A_.allFinite())
        throw Error(ErrorCode::InvalidInput, "pencil: non-finite entries");
}

double RankTolerance::threshold(double reference, Index n, double default_factor) const
{
    if (absolute)
        return *absolute;
    const double rel = relative.value_or(default_factor * static_cast<double>(n) * machine_epsilon);
    return rel * reference;
}

Index numerical_rank(const Matrix &m, const RankTolerance &tol)
{
    const Eigen::VectorXd s = singular_values(m);
    if (s.size() == 0)
        return 0;
    const double thr = tol.threshold(s(0), std::max(m.rows(), m.cols()));
    return static_cast<Index>((s.array() > thr).count());
}

double condition_number(const Matrix &m)
{
    const Eigen::VectorXd s = singular_values(m);
    if (s.size() == 0)
        return 1.0;
    const double smin = s(s.size() - 1);
    if (smin == 0.0)
        return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

std::vector<double> probe_sequence(Index count)
{
    std::vector<double> probes;
    probes.reserve(static_cast<std::size_t>(count));
    for (Index k = 0; static_cast<Index>(probes.size()) < count; ++k)
    {
        if (k == 0)
        {
            probes.push_back(0.0);
            continue;
        }
        probes.push_back(static_cast<double>(k));
        if (static_cast<Index>(probes.size()) < count)
            probes.push_back(-static_cast<double>(k));
    }
    return probes;
}

namespace
{

ProbePoint evaluate_probe(const Pencil &pencil, double lambda)
{
    const Matrix R = pencil.shifted(lambda);
    const Eigen::VectorXd s = singular_values(R);
    return {lambda, s(s.size() - 1), s(0), R.partialPivLu().determinant()};
}

bool probe_nonsingular(const ProbePoint &p, Index n, const RankTolerance &tol)
{
    return p.largest_singular_value > 0.0 && p.smallest_singular_value > tol.threshold(p.largest_singular_value, n);
}

} // namespace

RegularityCertificate check_regularity(const Pencil &pencil, const RankTolerance &tol)
{
    const Index n = pencil.n();
    RegularityCertificate cert;
    const std::vector<double> probes = probe_sequence(n + 1);

    Matrix vandermonde(n + 1, n + 1);
    Eigen::VectorXd dets(n + 1);
    for (Index i = 0; i <= n; ++i)
    {
        const ProbePoint p = evaluate_probe(pencil, probes[static_cast<std::size_t>(i)]);
        cert.probe_points.push_back(p);
        dets(i) = p.determinant;
        double power = 1.0;
        for (Index k = 0; k <= n; ++k)
        {
            vandermonde(i, k) = power;
            power *= p.lambda;
        }
    }

    // chosen lambda: the nonsingular probe with the largest sigma_min
    double best = -1.0;
    for (const ProbePoint &p : cert.probe_points)
    {
        if (probe_nonsingular(p, n, tol) && p.smallest_singular_value > best)
        {
            best = p.smallest_singular_value;
            cert.chosen_lambda = p.lambda;
        }
    }
    cert.regular = cert.chosen_lambda.has_value();

    const Eigen::VectorXd coeffs = vandermonde.colPivHouseholderQr().solve(dets);
    cert.det_poly_coeffs = std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size());
    return cert;
}

RegularityCertificate certify_lambda(const Pencil &pencil, double lambda, const RankTolerance &tol)
{
    if (!std::isfinite(lambda))
        throw Error(ErrorCode::InvalidInput, "certify_lambda: lambda must be finite");
    const ProbePoint p = evaluate_probe(pencil, lambda);
    if (!probe_nonsingular(p, pencil.n(), tol))
    {
        std::ostringstream msg;
        msg << "lambda*E - A is numerically singular at lambda = " << lambda;
        throw Error(ErrorCode::SingularTransform, msg.str(), p.smallest_singular_value);
    }
    RegularityCertificate cert;
    cert.regular = true;
    cert.probe_points.push_back(p);
    cert.chosen_lambda = lambda;
    return cert;
}

int nilpotency_index(const Matrix &N, double tol)
{
    const Index n = N.rows();
    if (n == 0)
        return 1;
    Matrix power = N;
    for (int k = 1; k <= n; ++k)
    {
        if (power.norm() <= tol)
            return k;
        power = power * N;
    }
    throw Error(ErrorCode::DecompositionFailed, "nilpotency_index: matrix is not nilpotent", power.norm());
}

int pencil_index(const QwfDecomposition &decomp, double tol)
{
    if (decomp.n2 == 0)
        return 1;
    const int verified = nilpotency_index(decomp.N, tol);
    if (verified != decomp.nu)
    {
        std::ostringstream msg;
        msg << "pencil_index: stored index " << decomp.nu << " but N has nilpotency index " << verified;
        throw Error(ErrorCode::DecompositionFailed, msg.str());
    }
    return decomp.nu;
}

QwfDecomposition quasi_weierstrass(const Pencil &pencil, const RegularityCertificate &cert,
                                   const DecompositionOptions &opts)
{
    if (!cert.regular || !cert.chosen_lambda)
        throw Error(ErrorCode::NotRegular, "quasi_weierstrass: pencil is not regular");

    const Index n = pencil.n();
    const double lambda = *cert.chosen_lambda;
    const Matrix R = pencil.shifted(lambda);
    const ProbePoint probe = evaluate_probe(pencil, lambda);
    if (!probe_nonsingular(probe, n, opts.rank))
        throw Error(ErrorCode::SingularTransform, "quasi_weierstrass: lambda*E - A is numerically singular",
                    probe.smallest_singular_value);

    const Eigen::PartialPivLU<Matrix> lu(R);
    const Matrix M = lu.solve(pencil.E());

    // nu = smallest k with rank(M^k) = rank(M^(k+1)), at least 1. Ranks of
    // M^k are measured against ||M||^k: for nilpotent M the power itself is
    // pure rounding noise and has no meaningful scale of its own.
    const double norm_M = singular_values(M)(0);
    auto power_threshold = [&](int k) {
        return opts.rank.threshold(std::pow(norm_M, k), n, power_chain_factor);
    };
    auto rank_of = [&](const Matrix &m, int k) {
        return static_cast<Index>((singular_values(m).array() > power_threshold(k)).count());
    };

    Matrix power = Matrix::Identity(n, n);
    Index rank_k = n;
    int k = 0;
    for (; k <= n; ++k)
    {
        const Matrix next = power * M;
        const Index rank_next = rank_of(next, k + 1);
        if (rank_next == rank_k)
            break;
        power = next;
        rank_k = rank_next;
    }
    const int nu = std::max(k, 1);
    Matrix m_nu = Matrix::Identity(n, n);
    for (int i = 0; i < nu; ++i)
        m_nu = m_nu * M;

    Eigen::JacobiSVD<Matrix> svd(m_nu, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd &s = svd.singularValues();
    const double threshold = power_threshold(nu);
    const Index n1 = static_cast<Index>((s.array() > threshold).count());
    const Index n2 = n - n1;

    QwfDecomposition d;
    d.n1 = n1;
    d.n2 = n2;
    d.nu = n2 == 0 ? 1 : nu;
    d.lambda_star = lambda;
    d.rank_threshold = threshold;

    d.Q.resize(n, n);
    d.Q.leftCols(n1) = svd.matrixU().leftCols(n1);
    d.Q.rightCols(n2) = svd.matrixV().rightCols(n2);
    const Eigen::PartialPivLU<Matrix> q_lu(d.Q);
    d.Q_inv = q_lu.inverse();
    d.cond_Q = condition_number(d.Q);
    if (!d.Q_inv.allFinite() || !std::isfinite(d.cond_Q))
        throw Error(ErrorCode::DecompositionFailed, "quasi_weierstrass: range and kernel bases are dependent");

    const Matrix M_split = d.Q_inv * M * d.Q;
    const Matrix M1 = M_split.topLeftCorner(n1, n1);
    const Matrix M2 = M_split.bottomRightCorner(n2, n2);
    const Matrix M1_inv = M1.partialPivLu().inverse();
    const Matrix S_inv = (lambda * M2 - Matrix::Identity(n2, n2)).partialPivLu().inverse();

    d.P = block_diagonal(M1_inv, S_inv) * d.Q_inv * lu.inverse();
    d.J = lambda * Matrix::Identity(n1, n1) - M1_inv;
    d.N = S_inv * M2;
    d.cond_P = condition_number(d.P);

    const Matrix E_hat = block_diagonal(Matrix::Identity(n1, n1), d.N);
    const Matrix A_hat = block_diagonal(d.J, Matrix::Identity(n2, n2));
    d.residual_E = (d.P * pencil.E() * d.Q - E_hat).norm();
    d.residual_A = (d.P * pencil.A() * d.Q - A_hat).norm();

    const double bound_E = opts.reconstruction * (1.0 + pencil.E().norm());
    const double bound_A = opts.reconstruction * (1.0 + pencil.A().norm());
    if (!(d.residual_E <= bound_E) || !(d.residual_A <= bound_A))
    {
        std::ostringstream msg;
        msg << "quasi_weierstrass: reconstruction residuals " << d.residual_E << " / " << d.residual_A
            << " exceed tolerance";
        throw Error(ErrorCode::DecompositionFailed, msg.str(), std::max(d.residual_E, d.residual_A));
    }

    if (n2 > 0)
    {
        Matrix n_power = Matrix::Identity(n2, n2);
        for (int i = 0; i < d.nu - 1; ++i)
            n_power = n_power * d.N;
        const double before = n_power.norm();
        const double after = (n_power * d.N).norm();
        if (after > opts.nilpotency || (d.nu > 1 && before <= opts.nilpotency))
        {
            std::ostringstream msg;
            msg << "quasi_weierstrass: N fails the nilpotency check for index " << d.nu << " (||N^nu|| = " << after
                << ")";
            throw Error(ErrorCode::DecompositionFailed, msg.str(), after);
        }
    }
    return d;
}

} // namespace daebvp
