#include "daebvp/expm.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "daebvp/error.hpp"

namespace daebvp
{

namespace
{

// r_m(A) = (V - U)^{-1} (V + U)
struct PadeTerms
{
    Matrix U;
    Matrix V;
};

template <std::size_t K>
PadeTerms pade_low(const Matrix &A, const std::array<double, K> &b)
{
    const Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    Matrix odd = b[1] * I;
    Matrix even = b[0] * I;
    Matrix power = I;
    for (std::size_t k = 2; k < K; k += 2)
    {
        power = power * A2;
        even += b[k] * power;
        if (k + 1 < K)
            odd += b[k + 1] * power;
    }
    return {A * odd, even};
}

PadeTerms pade13(const Matrix &A)
{
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    const Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix inner_u = b[13] * A6 + b[11] * A4 + b[9] * A2;
    const Matrix U = A * (A6 * inner_u + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Matrix inner_v = b[12] * A6 + b[10] * A4 + b[8] * A2;
    const Matrix V = A6 * inner_v + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    return {U, V};
}

Matrix solve_pade(const PadeTerms &t)
{
    return (t.V - t.U).partialPivLu().solve(t.V + t.U);
}

} // namespace

Matrix matrix_exponential(const Matrix &M, double norm_bound)
{
    if (M.rows() != M.cols())
        throw Error(ErrorCode::DimensionMismatch, "matrix_exponential: matrix is not square");
    if (!M.allFinite())
        throw Error(ErrorCode::InvalidInput, "matrix_exponential: non-finite entries");
    if (M.size() == 0)
        return M;

    const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 > norm_bound)
    {
        std::ostringstream msg;
        msg << "matrix_exponential: ||M||_1 = " << norm1 << " exceeds bound " << norm_bound;
        throw Error(ErrorCode::Overflow, msg.str(), norm1);
    }

    // theta_m from Higham (2005), Table 2.3
    if (norm1 <= 1.495585217958292e-2)
        return solve_pade(pade_low(M, std::array<double, 4>{120.0, 60.0, 12.0, 1.0}));
    if (norm1 <= 2.539398330063230e-1)
        return solve_pade(pade_low(M, std::array<double, 6>{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0}));
    if (norm1 <= 9.504178996162932e-1)
        return solve_pade(pade_low(
            M, std::array<double, 8>{17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0}));
    if (norm1 <= 2.097847961257068e0)
        return solve_pade(pade_low(M, std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0,
                                                             302702400.0, 30270240.0, 2162160.0, 110880.0,
                                                             3960.0, 90.0, 1.0}));

    constexpr double theta13 = 5.371920351148152e0;
    int squarings = 0;
    if (norm1 > theta13)
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    const Matrix scaled = M * std::ldexp(1.0, -squarings);
    Matrix result = solve_pade(pade13(scaled));
    for (int i = 0; i < squarings; ++i)
        result = result * result;
    return result;
}

} // namespace daebvp
