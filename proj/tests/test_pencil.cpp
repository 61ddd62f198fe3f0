#include <algorithm>
#include <complex>
#include <vector>

#include <doctest.h>

#include "daebvp/error.hpp"
#include "daebvp/pencil.hpp"
#include "support/corpus.hpp"

using namespace daebvp;

namespace
{

Matrix mat2(double a, double b, double c, double d)
{
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix jordan(Index n)
{
    Matrix N = Matrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i)
        N(i, i + 1) = 1.0;
    return N;
}

// Greedy nearest matching of two eigenvalue multisets.
double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b)
{
    if (a.size() != b.size())
        return 1e300;
    double worst = 0.0;
    for (const auto &x : a)
    {
        auto best = std::min_element(b.begin(), b.end(),
                                     [&](const auto &p, const auto &q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*best - x));
        b.erase(best);
    }
    return worst;
}

std::vector<std::complex<double>> eigenvalues(const Matrix &m)
{
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(m).eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

void check_invariants(const Pencil &p, const QwfDecomposition &d)
{
    const Matrix E_hat = block_diagonal(Matrix::Identity(d.n1, d.n1), d.N);
    const Matrix A_hat = block_diagonal(d.J, Matrix::Identity(d.n2, d.n2));
    CHECK((d.P * p.E() * d.Q - E_hat).norm() <= 1e-8 * (1.0 + p.E().norm()));
    CHECK((d.P * p.A() * d.Q - A_hat).norm() <= 1e-8 * (1.0 + p.A().norm()));
    CHECK(d.n1 + d.n2 == p.n());
    if (d.n2 > 0)
    {
        Matrix power = Matrix::Identity(d.n2, d.n2);
        for (int i = 0; i < d.nu - 1; ++i)
            power = power * d.N;
        if (d.nu > 1)
            CHECK(power.norm() > 1e-10);
        CHECK((power * d.N).norm() <= 1e-10);
    }
    else
        CHECK(d.nu == 1);
}

} // namespace

TEST_CASE("pencil validation")
{
    CHECK_THROWS_AS(Pencil(Matrix::Zero(2, 3), Matrix::Zero(2, 3)), Error);
    CHECK_THROWS_AS(Pencil(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), Error);
    CHECK_THROWS_AS(Pencil(Matrix(0, 0), Matrix(0, 0)), Error);
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Pencil(bad, Matrix::Identity(2, 2)), Error);
}

TEST_CASE("probe sequence alternates around zero")
{
    CHECK(probe_sequence(5) == std::vector<double>{0.0, 1.0, -1.0, 2.0, -2.0});
    CHECK(probe_sequence(2) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("check_regularity")
{
    SUBCASE("E = I, A = 0 is regular with a nonzero lambda")
    {
        const RegularityCertificate cert = check_regularity(Pencil(Matrix::Identity(2, 2), Matrix::Zero(2, 2)));
        REQUIRE(cert.regular);
        REQUIRE(cert.chosen_lambda);
        CHECK(*cert.chosen_lambda != 0.0);
        CHECK(cert.probe_points.size() == 3);
        // det(sI) = s^2
        const std::vector<double> &c = *cert.det_poly_coeffs;
        CHECK(std::abs(c[0]) <= 1e-14);
        CHECK(std::abs(c[1]) <= 1e-14);
        CHECK(std::abs(c[2] - 1.0) <= 1e-14);
    }
    SUBCASE("E = diag(1, 0), A = 0 is singular")
    {
        const RegularityCertificate cert = check_regularity(Pencil(mat2(1, 0, 0, 0), Matrix::Zero(2, 2)));
        CHECK_FALSE(cert.regular);
        CHECK_FALSE(cert.chosen_lambda);
        for (const ProbePoint &p : cert.probe_points)
            CHECK(std::abs(p.determinant) <= 1e-14);
    }
    SUBCASE("E = [[0,1],[0,0]], A = I has det(sE - A) = 1")
    {
        const RegularityCertificate cert = check_regularity(Pencil(mat2(0, 1, 0, 0), Matrix::Identity(2, 2)));
        REQUIRE(cert.regular);
        for (const ProbePoint &p : cert.probe_points)
            CHECK(p.determinant == doctest::Approx(1.0).epsilon(1e-14));
        const std::vector<double> &c = *cert.det_poly_coeffs;
        CHECK(c[0] == doctest::Approx(1.0));
        CHECK(std::abs(c[1]) <= 1e-14);
        CHECK(std::abs(c[2]) <= 1e-14);
    }
}

TEST_CASE("certify_lambda rejects a singular shift")
{
    const Pencil p(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    CHECK_THROWS_AS(certify_lambda(p, 1.0), Error);
    CHECK(certify_lambda(p, 3.0).chosen_lambda == 3.0);
}

TEST_CASE("quasi_weierstrass on hand examples")
{
    SUBCASE("pure ODE pencil")
    {
        const Pencil p(Matrix::Identity(2, 2), mat2(2, 0, 0, 3));
        const QwfDecomposition d = quasi_weierstrass(p, check_regularity(p));
        CHECK(d.n1 == 2);
        CHECK(d.n2 == 0);
        CHECK(d.nu == 1);
        CHECK(multiset_distance(eigenvalues(d.J), {2.0, 3.0}) <= 1e-12);
        check_invariants(p, d);
    }
    SUBCASE("index-2 nilpotent pencil")
    {
        const Pencil p(mat2(0, 1, 0, 0), Matrix::Identity(2, 2));
        const RegularityCertificate cert = check_regularity(p);
        const QwfDecomposition d = quasi_weierstrass(p, cert);
        CHECK(d.n1 == 0);
        CHECK(d.n2 == 2);
        CHECK(d.nu == 2);
        // similar to the Jordan block: rank 1, square zero
        CHECK(d.N.norm() > 1e-6);
        CHECK((d.N * d.N).norm() <= 1e-14);
        check_invariants(p, d);
    }
    SUBCASE("mixed canonical pencil")
    {
        const Matrix E = block_diagonal(Matrix::Identity(1, 1), jordan(2));
        const Matrix A = block_diagonal(2.0 * Matrix::Identity(1, 1), Matrix::Identity(2, 2));
        const Pencil p(E, A);
        const QwfDecomposition d = quasi_weierstrass(p, check_regularity(p));
        CHECK(d.n1 == 1);
        CHECK(d.n2 == 2);
        CHECK(d.nu == 2);
        CHECK(d.J(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
        check_invariants(p, d);
    }
    SUBCASE("algebraic block of index one")
    {
        const Pencil p(mat2(1, 0, 0, 0), mat2(-1, 0, 0, 1));
        const QwfDecomposition d = quasi_weierstrass(p, check_regularity(p));
        CHECK(d.n1 == 1);
        CHECK(d.n2 == 1);
        CHECK(d.nu == 1);
        CHECK(std::abs(d.N(0, 0)) <= 1e-14);
        check_invariants(p, d);
    }
}

TEST_CASE("quasi_weierstrass error paths")
{
    const Pencil singular(mat2(1, 0, 0, 0), Matrix::Zero(2, 2));
    CHECK_THROWS_AS(quasi_weierstrass(singular, check_regularity(singular)), Error);

    // a certificate whose lambda is a generalized eigenvalue
    const Pencil p(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    RegularityCertificate forged;
    forged.regular = true;
    forged.chosen_lambda = 1.0;
    try
    {
        quasi_weierstrass(p, forged);
        FAIL("expected SingularTransform");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::SingularTransform);
    }
}

TEST_CASE("pencil_index")
{
    QwfDecomposition d;
    d.n1 = 2;
    d.n2 = 0;
    d.N = Matrix(0, 0);
    CHECK(pencil_index(d) == 1);

    d.n2 = 2;
    d.N = jordan(2);
    d.nu = 2;
    CHECK(pencil_index(d) == 2);

    // powers computed directly: J3 != 0, J3^2 != 0, J3^3 = 0
    const Matrix J3 = jordan(3);
    REQUIRE((J3 * J3).norm() > 0.0);
    REQUIRE((J3 * J3 * J3).norm() == 0.0);
    d.n2 = 3;
    d.N = J3;
    d.nu = 3;
    CHECK(pencil_index(d) == 3);

    d.nu = 2;
    CHECK_THROWS_AS(pencil_index(d), Error);
}

TEST_CASE("random pencils: structure recovered and reconstruction holds")
{
    testing::CorpusGenerator gen(101);
    for (int trial = 0; trial < 100; ++trial)
    {
        const testing::KnownPencil k = gen.random_pencil();
        const Pencil p(k.E, k.A);
        const QwfDecomposition d = quasi_weierstrass(p, check_regularity(p));
        CHECK(d.n1 == k.n1);
        CHECK(d.n2 == k.n2);
        CHECK(d.nu == k.nu);
        CHECK(pencil_index(d) == k.nu);
        check_invariants(p, d);
    }
}

TEST_CASE("structure does not depend on the choice of lambda")
{
    testing::CorpusGenerator gen(202);
    for (int trial = 0; trial < 50; ++trial)
    {
        const testing::KnownPencil k = gen.random_pencil();
        const Pencil p(k.E, k.A);
        const QwfDecomposition first = quasi_weierstrass(p, certify_lambda(p, 0.37));
        const QwfDecomposition second = quasi_weierstrass(p, certify_lambda(p, -2.71));
        CHECK(first.n1 == second.n1);
        CHECK(first.n2 == second.n2);
        CHECK(first.nu == second.nu);
    }
}

TEST_CASE("invertible E: no algebraic part and J has the spectrum of E^{-1} A")
{
    testing::CorpusGenerator gen(303);
    for (int trial = 0; trial < 50; ++trial)
    {
        const testing::KnownPencil k = gen.pencil(gen.integer(1, 8), 0, 1);
        const Pencil p(k.E, k.A);
        const QwfDecomposition d = quasi_weierstrass(p, check_regularity(p));
        CHECK(d.n2 == 0);
        const Matrix reference = k.E.partialPivLu().solve(k.A);
        CHECK(multiset_distance(eigenvalues(d.J), eigenvalues(reference)) <= 1e-8);
    }
}
