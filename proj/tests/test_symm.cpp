#include "hesskit/error.hpp"
#include "hesskit/families.hpp"
#include "hesskit/symm.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace hesskit;

namespace {

std::vector<std::vector<double>> rows(const SymMatrix& m)
{
    std::vector<std::vector<double>> r(static_cast<std::size_t>(m.dim()), std::vector<double>(m.dim()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) r[i][j] = m(i, j);
    return r;
}

SymMatrix diag(std::vector<double> d) { return SymMatrix::diagonal(d); }

} // namespace

TEST_CASE("elem_sym of identity spectrum gives binomial coefficients")
{
    const std::vector<double> ones{1, 1, 1};
    const auto s = elem_sym(ones);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == 3.0);
    CHECK(s[2] == 3.0);
    CHECK(s[3] == 1.0);
}

TEST_CASE("elem_sym of (1,2,3) matches subset enumeration")
{
    const std::vector<double> l{1, 2, 3};
    const auto s = elem_sym(l);
    for (int k = 0; k <= 3; ++k) CHECK(s[k] == doctest::Approx(oracle::subset_esym(l, k)).epsilon(1e-15));
    CHECK(s[1] == 6.0);
    CHECK(s[2] == 11.0);
    CHECK(s[3] == 6.0);
}

TEST_CASE("a zero eigenvalue kills the top symmetric function")
{
    const std::vector<double> l{0, 5, -5};
    CHECK(elem_sym(l)[3] == 0.0);
}

TEST_CASE("sigma_k of 2c times the identity is C(n,k) (2c)^k")
{
    for (int n = 1; n <= 6; ++n)
        for (int k = 0; k <= n; ++k) {
            const double c = 0.37;
            CHECK(sigma_k(SymMatrix::identity(n, 2 * c), k) ==
                  doctest::Approx(oracle::binom(n, k) * std::pow(2 * c, k)).epsilon(1e-13));
        }
}

TEST_CASE("sigma_k of diag(1,2,3) at k = 2 is 11")
{
    CHECK(sigma_k(diag({1, 2, 3}), 2) == doctest::Approx(11.0).epsilon(1e-14));
}

TEST_CASE("sigma_k of random 4x4 matches principal-minor enumeration")
{
    gen::for_all(11, 20, [](gen::Gen& g) {
        const SymMatrix m(g.symmetric(4));
        for (int k = 0; k <= 4; ++k) {
            const double ref = oracle::principal_minor_sum(rows(m), k);
            CHECK(std::abs(sigma_k(m, k) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
        }
    });
}

TEST_CASE("sigma_k_grad at k = 1 is the identity")
{
    gen::Gen g(3);
    const SymMatrix m(g.symmetric(5));
    const auto d = sigma_k_grad(m, 1);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(d(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("sigma_k_grad diagonal entry of a diagonal matrix equals S_{k-1} of the others")
{
    const std::vector<double> d{0.5, -1.2, 2.0, 3.1};
    const auto m = diag(d);
    for (int k = 1; k <= 4; ++k) {
        const auto grad = sigma_k_grad(m, k);
        for (int i = 0; i < 4; ++i) {
            std::vector<double> others;
            for (int j = 0; j < 4; ++j)
                if (j != i) others.push_back(d[j]);
            CHECK(grad(i, i) == doctest::Approx(oracle::subset_esym(others, k - 1)).epsilon(1e-13));
            // Finite-difference oracle on sigma_k itself.
            const auto fd = oracle::central_difference(
                [&](double t) {
                    auto dd = d;
                    dd[i] += t;
                    return oracle::subset_esym(dd, k);
                },
                0.0, 1e-5);
            CHECK(grad(i, i) == doctest::Approx(fd).epsilon(1e-8));
        }
    }
}

TEST_CASE("off-diagonal sigma_k_grad entries follow the symmetric-perturbation convention")
{
    gen::Gen g(5);
    const SymMatrix m(g.symmetric(4));
    for (int k = 1; k <= 4; ++k) {
        const auto grad = sigma_k_grad(m, k);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                const auto f = [&](double h) {
                    Eigen::MatrixXd e = m.matrix();
                    e(i, j) += h / 2;
                    e(j, i) += h / 2;
                    return oracle::principal_minor_sum(rows(SymMatrix(e)), k);
                };
                CHECK(grad(i, j) == doctest::Approx(oracle::central_difference(f, 0.0, 1e-5)).epsilon(1e-7));
            }
    }
}

TEST_CASE("trace identity")
{
    SUBCASE("identity matrix, every k")
    {
        for (int n = 1; n <= 6; ++n)
            for (int k = 1; k <= n; ++k) CHECK(check_trace_identity(SymMatrix::identity(n), k) <= 1e-12);
    }
    SUBCASE("k = 1 is exact")
    {
        gen::Gen g(7);
        CHECK(check_trace_identity(SymMatrix(g.symmetric(5)), 1) == 0.0);
    }
    SUBCASE("random 3x3, k = 2")
    {
        gen::for_all(13, 20, [](gen::Gen& g) {
            CHECK(check_trace_identity(SymMatrix(g.symmetric(3)), 2) <= 1e-10);
        });
    }
}

TEST_CASE("Euler identity on random matrices")
{
    gen::for_all(17, 30, [](gen::Gen& g) {
        const int n = g.integer(2, 6);
        const SymMatrix m(g.symmetric(n));
        for (int k = 1; k <= n; ++k) CHECK(check_euler_identity(m, k) <= 1e-10 * std::pow(m.matrix().norm(), k));
    });
}

TEST_CASE("sigma_k_directional agrees with a difference quotient of principal minors")
{
    gen::for_all(19, 10, [](gen::Gen& g) {
        const SymMatrix a(g.symmetric(4));
        const SymMatrix b(g.symmetric(4));
        for (int k = 1; k <= 4; ++k) {
            const auto f = [&](double t) {
                return oracle::principal_minor_sum(rows(SymMatrix(a.matrix() + t * b.matrix())), k);
            };
            CHECK(sigma_k_directional(a, b, k) == doctest::Approx(oracle::central_difference(f, 0.0, 1e-5)).epsilon(1e-7));
        }
    });
}

TEST_CASE("Reilly derivative, null divergence and divergence form on cubic data")
{
    gen::for_all(23, 10, [](gen::Gen& g) {
        const int n = g.integer(2, 5);
        const SymMatrix a(g.symmetric(n));
        const SymMatrix b(g.symmetric(n));
        // Fully symmetric third-derivative tensor.
        std::vector<std::vector<std::vector<double>>> t(n, std::vector<std::vector<double>>(n, std::vector<double>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int l = j; l < n; ++l) {
                    const double v = g.normal();
                    t[i][j][l] = t[i][l][j] = t[j][i][l] = t[j][l][i] = t[l][i][j] = t[l][j][i] = v;
                }
        std::vector<SymMatrix> third;
        for (int j = 0; j < n; ++j) {
            Eigen::MatrixXd s(n, n);
            for (int a1 = 0; a1 < n; ++a1)
                for (int b1 = 0; b1 < n; ++b1) s(a1, b1) = t[a1][b1][j];
            third.emplace_back(s);
        }
        const auto grad = g.vector(n, -1, 1);
        for (int k = 1; k <= n; ++k) {
            CHECK(check_reilly_derivative(a, b, k, g.uniform(-1, 1)) <= 1e-9 * std::pow(10.0, k));
            CHECK(check_null_divergence(a, third, k) <= 1e-9 * std::pow(10.0, k));
            CHECK(check_divergence_form(a, third, grad, k) <= 1e-9 * std::pow(10.0, k));
        }
    });
}

TEST_CASE("Spectrum is ascending and SymMatrix rejects asymmetric input")
{
    const auto s = diag({3, -1, 2}).spectrum();
    CHECK(s[0] == doctest::Approx(-1));
    CHECK(s[1] == doctest::Approx(2));
    CHECK(s[2] == doctest::Approx(3));
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 2.0000001, 1;
    CHECK_THROWS_AS(SymMatrix{m}, PreconditionError);
    CHECK(SymMatrix::symmetrized(m)(0, 1) == doctest::Approx(2.00000005));
}

TEST_CASE("ExponentSet")
{
    const auto e = ExponentSet::make(5, 2);
    CHECK(e.alpha == doctest::Approx(4.0 / 3.0));
    CHECK(e.p == 3.0);
    CHECK(e.q_sobolev() == doctest::Approx(15.0));
    CHECK(e.q_dual == doctest::Approx(15.0 / 14.0));
    CHECK(e.subcritical());
    CHECK_FALSE(ExponentSet::make(4, 2).subcritical());
    CHECK_THROWS_AS((void)ExponentSet::make(4, 2).q_sobolev(), PreconditionError);
    CHECK_THROWS_AS(ExponentSet::make(3, 4), PreconditionError);
    CHECK_THROWS_AS(ExponentSet::make(3, 0), PreconditionError);
}
