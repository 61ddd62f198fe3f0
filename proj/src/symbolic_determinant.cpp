#include <cmath>
#include <cstdint>
#include <vector>

#include "daebvp/error.hpp"
#include "daebvp/verify.hpp"

namespace daebvp
{

namespace
{

// Integer polynomial, coefficient k multiplies s^k; empty means zero.
using Poly = std::vector<std::int64_t>;

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw Error(ErrorCode::Overflow, "symbolic_determinant: int64 overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw Error(ErrorCode::Overflow, "symbolic_determinant: int64 overflow");
    return r;
}

void trim(Poly &p)
{
    while (!p.empty() && p.back() == 0)
        p.pop_back();
}

Poly mul(const Poly &a, const Poly &b)
{
    if (a.empty() || b.empty())
        return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = checked_add(r[i + j], checked_mul(a[i], b[j]));
    trim(r);
    return r;
}

Poly sub(const Poly &a, const Poly &b)
{
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        r[i] = checked_add(r[i], -b[i]);
    trim(r);
    return r;
}

Poly negate(Poly p)
{
    for (auto &c : p)
        c = -c;
    return p;
}

// a / b where the quotient is known to be exact in Z[s].
Poly exact_div(Poly a, const Poly &b)
{
    if (b.empty())
        throw Error(ErrorCode::InvalidInput, "symbolic_determinant: division by the zero polynomial");
    if (a.empty())
        return {};
    const std::size_t db = b.size() - 1;
    if (a.size() - 1 < db)
        throw Error(ErrorCode::InvalidInput, "symbolic_determinant: inexact polynomial division");
    Poly q(a.size() - db, 0);
    for (std::size_t k = q.size(); k-- > 0;)
    {
        const std::int64_t lead = a[k + db];
        if (lead % b.back() != 0)
            throw Error(ErrorCode::InvalidInput, "symbolic_determinant: inexact polynomial division");
        q[k] = lead / b.back();
        for (std::size_t j = 0; j <= db; ++j)
            a[k + j] = checked_add(a[k + j], -checked_mul(q[k], b[j]));
    }
    trim(a);
    if (!a.empty())
        throw Error(ErrorCode::InvalidInput, "symbolic_determinant: inexact polynomial division");
    trim(q);
    return q;
}

std::int64_t as_integer(double v)
{
    if (!std::isfinite(v) || std::round(v) != v || std::abs(v) > 1e9)
        throw Error(ErrorCode::InvalidInput, "symbolic_determinant: entries must be (small) integers");
    return static_cast<std::int64_t>(v);
}

} // namespace

std::vector<std::int64_t> symbolic_determinant(const Pencil &pencil)
{
    const Index n = pencil.n();
    if (n > 6)
        throw Error(ErrorCode::SizeLimitExceeded, "symbolic_determinant: n must be <= 6", static_cast<double>(n));

    const auto un = static_cast<std::size_t>(n);
    // entries of sE - A
    std::vector<std::vector<Poly>> m(un, std::vector<Poly>(un));
    for (std::size_t i = 0; i < un; ++i)
        for (std::size_t j = 0; j < un; ++j)
        {
            const auto ii = static_cast<Index>(i);
            const auto jj = static_cast<Index>(j);
            Poly p{-as_integer(pencil.A()(ii, jj)), as_integer(pencil.E()(ii, jj))};
            trim(p);
            m[i][j] = p;
        }

    std::vector<std::int64_t> zero(un + 1, 0);
    bool negative = false;
    Poly previous{1};
    for (std::size_t k = 0; k < un; ++k)
    {
        if (m[k][k].empty())
        {
            std::size_t swap = k + 1;
            while (swap < un && m[swap][k].empty())
                ++swap;
            if (swap == un)
                return zero;
            std::swap(m[k], m[swap]);
            negative = !negative;
        }
        for (std::size_t i = k + 1; i < un; ++i)
        {
            for (std::size_t j = k + 1; j < un; ++j)
                m[i][j] = exact_div(sub(mul(m[k][k], m[i][j]), mul(m[i][k], m[k][j])), previous);
            m[i][k].clear();
        }
        previous = m[k][k];
    }

    Poly det = negative ? negate(m[un - 1][un - 1]) : m[un - 1][un - 1];
    std::vector<std::int64_t> out(un + 1, 0);
    for (std::size_t i = 0; i < det.size() && i <= un; ++i)
        out[i] = det[i];
    return out;
}

} // namespace daebvp
