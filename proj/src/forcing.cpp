#include "daebvp/forcing.hpp"

#include <algorithm>
#include <cmath>

#include "daebvp/error.hpp"
#include "daebvp/expm.hpp"

namespace daebvp
{

namespace
{

void check_term(const ExpPolyTerm &term, Index dim)
{
    if (term.coeffs.empty())
        throw Error(ErrorCode::InvalidInput, "forcing term needs at least one coefficient vector");
    if (!std::isfinite(term.alpha) || !std::isfinite(term.omega))
        throw Error(ErrorCode::InvalidInput, "forcing term has non-finite alpha/omega");
    if (term.kind == PhaseKind::none && term.omega != 0.0)
        throw Error(ErrorCode::InvalidInput, "forcing term without trig factor must have omega = 0");
    for (const Vector &v : term.coeffs)
    {
        if (v.size() != dim)
            throw Error(ErrorCode::DimensionMismatch, "forcing coefficient has the wrong dimension");
        if (!v.allFinite())
            throw Error(ErrorCode::InvalidInput, "forcing coefficient has non-finite entries");
    }
}

bool all_zero(const std::vector<Vector> &coeffs)
{
    for (const Vector &v : coeffs)
        if (!v.isZero(0.0))
            return false;
    return true;
}

// p'(t) + alpha p(t) as coefficient lists; degree preserved.
std::vector<Vector> shifted_derivative(const std::vector<Vector> &p, double alpha)
{
    std::vector<Vector> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
    {
        out[k] = alpha * p[k];
        if (k + 1 < p.size())
            out[k] += static_cast<double>(k + 1) * p[k + 1];
    }
    return out;
}

std::vector<Vector> scaled(const std::vector<Vector> &p, double s)
{
    std::vector<Vector> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        out[k] = s * p[k];
    return out;
}

} // namespace

ExpPolySignal::ExpPolySignal(Index dim) : dim_(dim)
{
    if (dim < 0)
        throw Error(ErrorCode::InvalidInput, "signal dimension must be non-negative");
}

ExpPolySignal::ExpPolySignal(Index dim, std::vector<ExpPolyTerm> terms) : ExpPolySignal(dim)
{
    for (ExpPolyTerm &t : terms)
        add_term(std::move(t));
}

ExpPolySignal ExpPolySignal::constant(const Vector &value)
{
    ExpPolySignal sig(value.size());
    sig.add_term({0.0, 0.0, PhaseKind::none, {value}});
    return sig;
}

ExpPolySignal ExpPolySignal::polynomial(std::vector<Vector> coeffs)
{
    if (coeffs.empty())
        throw Error(ErrorCode::InvalidInput, "polynomial signal needs coefficients");
    ExpPolySignal sig(coeffs.front().size());
    sig.add_term({0.0, 0.0, PhaseKind::none, std::move(coeffs)});
    return sig;
}

void ExpPolySignal::add_term(ExpPolyTerm term)
{
    check_term(term, dim_);
    terms_.push_back(std::move(term));
}

bool ExpPolySignal::is_zero() const
{
    for (const ExpPolyTerm &t : terms_)
        if (!all_zero(t.coeffs))
            return false;
    return true;
}

Vector ExpPolySignal::operator()(double t) const
{
    Vector out = Vector::Zero(dim_);
    for (const ExpPolyTerm &term : terms_)
    {
        // Horner in t
        Vector poly = term.coeffs.back();
        for (Index k = term.degree() - 1; k >= 0; --k)
            poly = poly * t + term.coeffs[static_cast<std::size_t>(k)];
        double factor = std::exp(term.alpha * t);
        if (term.kind == PhaseKind::cos)
            factor *= std::cos(term.omega * t);
        else if (term.kind == PhaseKind::sin)
            factor *= std::sin(term.omega * t);
        out += factor * poly;
    }
    return out;
}

ExpPolySignal operator+(const ExpPolySignal &a, const ExpPolySignal &b)
{
    if (a.dim() != b.dim())
        throw Error(ErrorCode::DimensionMismatch, "signal sum: dimensions differ");
    ExpPolySignal out = a;
    for (const ExpPolyTerm &t : b.terms())
        out.terms_.push_back(t);
    return out;
}

ExpPolySignal operator*(double s, const ExpPolySignal &a)
{
    ExpPolySignal out = a;
    for (ExpPolyTerm &t : out.terms_)
        t.coeffs = scaled(t.coeffs, s);
    return out;
}

Vector evaluate(const ExpPolySignal &sig, double t)
{
    return sig(t);
}

ExpPolySignal simplify(const ExpPolySignal &sig)
{
    std::vector<ExpPolyTerm> merged;
    for (const ExpPolyTerm &term : sig.terms())
    {
        auto same = std::find_if(merged.begin(), merged.end(), [&](const ExpPolyTerm &m) {
            return m.alpha == term.alpha && m.omega == term.omega && m.kind == term.kind;
        });
        if (same == merged.end())
        {
            merged.push_back(term);
            continue;
        }
        if (same->coeffs.size() < term.coeffs.size())
            same->coeffs.resize(term.coeffs.size(), Vector::Zero(sig.dim()));
        for (std::size_t k = 0; k < term.coeffs.size(); ++k)
            same->coeffs[k] += term.coeffs[k];
    }
    ExpPolySignal out(sig.dim());
    for (ExpPolyTerm &term : merged)
    {
        if (all_zero(term.coeffs))
            continue;
        while (term.coeffs.size() > 1 && term.coeffs.back().isZero(0.0))
            term.coeffs.pop_back();
        out.add_term(std::move(term));
    }
    return out;
}

ExpPolySignal differentiate(const ExpPolySignal &sig)
{
    ExpPolySignal out(sig.dim());
    for (const ExpPolyTerm &term : sig.terms())
    {
        // d/dt [e^{at} p] = e^{at} (a p + p'); the trig factor adds a
        // companion term with the other phase.
        std::vector<Vector> main = shifted_derivative(term.coeffs, term.alpha);
        if (!all_zero(main))
            out.add_term({term.alpha, term.omega, term.kind, std::move(main)});
        if (term.kind == PhaseKind::none || term.omega == 0.0)
            continue;
        if (term.kind == PhaseKind::cos)
            out.add_term({term.alpha, term.omega, PhaseKind::sin, scaled(term.coeffs, -term.omega)});
        else
            out.add_term({term.alpha, term.omega, PhaseKind::cos, scaled(term.coeffs, term.omega)});
    }
    return simplify(out);
}

ExpPolySignal differentiate(const ExpPolySignal &sig, int order)
{
    ExpPolySignal out = sig;
    for (int i = 0; i < order; ++i)
        out = differentiate(out);
    return out;
}

ExpPolySignal left_multiply(const Matrix &M, const ExpPolySignal &sig)
{
    if (M.cols() != sig.dim())
        throw Error(ErrorCode::DimensionMismatch, "left_multiply: matrix columns do not match signal dimension");
    ExpPolySignal out(M.rows());
    for (const ExpPolyTerm &term : sig.terms())
    {
        ExpPolyTerm mapped{term.alpha, term.omega, term.kind, {}};
        mapped.coeffs.reserve(term.coeffs.size());
        for (const Vector &v : term.coeffs)
            mapped.coeffs.push_back(M * v);
        out.add_term(std::move(mapped));
    }
    return out;
}

namespace
{

Index realization_size(const ExpPolyTerm &term)
{
    const Index blocks = term.degree() + 1;
    return term.kind == PhaseKind::none ? blocks : 2 * blocks;
}

} // namespace

ExpConvolution exp_and_convolve(const Matrix &J, const ExpPolySignal &sig, double t)
{
    const Index n1 = J.rows();
    if (J.cols() != n1)
        throw Error(ErrorCode::DimensionMismatch, "exp_and_convolve: J must be square");
    if (sig.dim() != n1)
        throw Error(ErrorCode::DimensionMismatch, "exp_and_convolve: signal dimension differs from J");
    if (n1 == 0)
        return {Matrix(0, 0), Vector(0)};

    Index state = 0;
    for (const ExpPolyTerm &term : sig.terms())
        state += realization_size(term);

    const Index size = n1 + state;
    Matrix aug = Matrix::Zero(size, size);
    Vector z0 = Vector::Zero(state);
    aug.topLeftCorner(n1, n1) = J;

    // State per term: z_k = e^{alpha s} s^k / k! (none), or the pair
    // (c_k, s_k) = e^{alpha s} s^k / k! (cos ws, sin ws). Then
    //   z_k' = alpha z_k + z_{k-1},
    //   c_k' = alpha c_k - w s_k + c_{k-1},  s_k' = alpha s_k + w c_k + s_{k-1},
    // and f = sum_k k! v_k z_k  (or c_k / s_k).
    Index offset = n1;
    for (const ExpPolyTerm &term : sig.terms())
    {
        const Index blocks = term.degree() + 1;
        const bool trig = term.kind != PhaseKind::none;
        const Index width = trig ? 2 : 1;
        double factorial = 1.0;
        for (Index k = 0; k < blocks; ++k)
        {
            if (k > 0)
                factorial *= static_cast<double>(k);
            const Index base = offset + width * k;
            aug(base, base) = term.alpha;
            if (trig)
            {
                aug(base + 1, base + 1) = term.alpha;
                aug(base, base + 1) = -term.omega;
                aug(base + 1, base) = term.omega;
            }
            if (k > 0)
            {
                aug(base, base - width) = 1.0;
                if (trig)
                    aug(base + 1, base + 1 - width) = 1.0;
            }
            const Index out_col = term.kind == PhaseKind::sin ? base + 1 : base;
            aug.block(0, out_col, n1, 1) = factorial * term.coeffs[static_cast<std::size_t>(k)];
        }
        z0(offset - n1) = 1.0;
        offset += width * blocks;
    }

    // diag(I, s I) similarity: keeps large forcing coefficients from
    // inflating ||aug|| (the exponential's growth depends only on J and G).
    const double coupling =
        state > 0 ? aug.topRightCorner(n1, state).cwiseAbs().colwise().sum().maxCoeff() : 0.0;
    const double balance = std::max(1.0, coupling);
    aug.topRightCorner(n1, state) /= balance;

    const Matrix e = matrix_exponential(t * aug);
    return {e.topLeftCorner(n1, n1), e.topRightCorner(n1, state) * (balance * z0)};
}

Vector convolve_with_exp(const Matrix &J, const ExpPolySignal &sig, double t)
{
    if (sig.terms().empty())
        return Vector::Zero(J.rows());
    return exp_and_convolve(J, sig, t).integral;
}

Matrix exp_action_integral(const Matrix &J, double t)
{
    if (J.rows() != J.cols())
        throw Error(ErrorCode::DimensionMismatch, "exp_action_integral: J must be square");
    return matrix_exponential(t * J) - Matrix::Identity(J.rows(), J.cols());
}

} // namespace daebvp
