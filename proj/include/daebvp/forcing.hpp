/*
 * Forcing terms of the form
 *
 *   f(t) = sum_terms e^{alpha t} * trig(omega t) * sum_k v_k t^k,
 *
 * trig in {1, cos, sin}. The class is closed under differentiation and under
 * left multiplication by a constant matrix, and convolution against e^{tJ}
 * has a closed form through a block-augmented matrix exponential.
 */

#pragma once

#include <vector>

#include "types.hpp"

namespace daebvp
{

enum class PhaseKind
{
    none,
    cos,
    sin
};

struct ExpPolyTerm
{
    double alpha = 0.0;
    double omega = 0.0;
    PhaseKind kind = PhaseKind::none;
    std::vector<Vector> coeffs; // v_0 .. v_m, coefficient of t^k

    Index degree() const { return static_cast<Index>(coeffs.size()) - 1; }
};

class ExpPolySignal
{
public:
    explicit ExpPolySignal(Index dim = 0);
    // Throws InvalidInput / DimensionMismatch if a term breaks the invariants.
    ExpPolySignal(Index dim, std::vector<ExpPolyTerm> terms);

    static ExpPolySignal constant(const Vector &value);
    static ExpPolySignal polynomial(std::vector<Vector> coeffs);

    void add_term(ExpPolyTerm term);

    Index dim() const noexcept { return dim_; }
    const std::vector<ExpPolyTerm> &terms() const noexcept { return terms_; }
    bool is_zero() const;

    Vector operator()(double t) const;

    friend ExpPolySignal operator+(const ExpPolySignal &a, const ExpPolySignal &b);
    friend ExpPolySignal operator*(double s, const ExpPolySignal &a);

private:
    Index dim_;
    std::vector<ExpPolyTerm> terms_;
};

Vector evaluate(const ExpPolySignal &sig, double t);

// Merges terms sharing (alpha, omega, kind) and drops all-zero terms.
ExpPolySignal simplify(const ExpPolySignal &sig);

// Exact derivative within the class; terms that vanish are dropped.
ExpPolySignal differentiate(const ExpPolySignal &sig);

// The k-th derivative.
ExpPolySignal differentiate(const ExpPolySignal &sig, int order);

// Maps every coefficient v -> M v. Throws DimensionMismatch.
ExpPolySignal left_multiply(const Matrix &M, const ExpPolySignal &sig);

struct ExpConvolution
{
    Matrix exp_tJ;   // e^{tJ}
    Vector integral; // int_0^t e^{(t-s)J} f(s) ds
};

/*
 * e^{tJ} and the convolution integral from one exponential of
 *
 *   [ t J   t V ]
 *   [  0    t G ]
 *
 * where z' = G z, z(0) = z0 realizes f = V z (a shifted-Jordan companion per
 * term, with 2x2 rotation blocks for cos/sin terms). The upper right block
 * of the exponential applied to z0 is the integral.
 */
ExpConvolution exp_and_convolve(const Matrix &J, const ExpPolySignal &sig, double t);

Vector convolve_with_exp(const Matrix &J, const ExpPolySignal &sig, double t);

// J * int_0^t e^{(t-s)J} ds = e^{tJ} - I, valid for singular J.
Matrix exp_action_integral(const Matrix &J, double t);

} // namespace daebvp
