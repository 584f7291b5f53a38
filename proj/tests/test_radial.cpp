#include "hesskit/error.hpp"
#include "hesskit/quadrature.hpp"
#include "hesskit/radial.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hesskit;

namespace {

/// u' = r^a on [0, 1] with u(1) = 0.
RadialField power_profile(int n, double a, int samples)
{
    const auto r = linear_grid(0.0, 1.0, samples);
    std::vector<double> u(r.size()), du(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        du[i] = std::pow(r[i], a);
        u[i] = (std::pow(r[i], a + 1) - 1.0) / (a + 1);
    }
    return {n, r, u, du, RadialKind::dirichlet_ball, "power"};
}

RadialField constant_profile(int n, double value, double radius, int samples)
{
    const auto r = linear_grid(0.0, radius, samples);
    return {n, r, std::vector<double>(r.size(), value), std::vector<double>(r.size(), 0.0), RadialKind::free, "constant"};
}

} // namespace

TEST_CASE("F_k of a power profile: eigenvalue form, divergence form and closed form")
{
    for (auto [n, k] : {std::pair{5, 1}, std::pair{5, 2}, std::pair{7, 3}}) {
        CAPTURE(n);
        CAPTURE(k);
        const double a = 1.0 + 2.0 / k;
        const auto u = power_profile(n, a, 10001);
        const auto eig = radial_fk(u, k);
        const auto div = radial_fk_divergence(u, k);
        double worst_forms = 0.0, worst_oracle = 0.0;
        for (std::size_t i = 1; i < u.size(); ++i) {
            const double ref = oracle::power_profile_fk(n, k, a, u.r()[i]);
            worst_forms = std::max(worst_forms, std::abs(eig.values[i] - div.values[i]));
            worst_oracle = std::max(worst_oracle, std::abs(eig.values[i] - ref));
        }
        const double scale = oracle::power_profile_fk(n, k, a, 1.0);
        CHECK(worst_forms <= 1e-9 * scale);
        CHECK(worst_oracle <= 1e-8 * scale);
    }
}

TEST_CASE("F_k of the zero profile vanishes")
{
    const auto z = constant_profile(4, 0.0, 1.0, 101);
    for (int k = 1; k <= 4; ++k)
        for (double v : radial_fk(z, k).values) CHECK(v == 0.0);
    for (double v : radial_fk(z, 0).values) CHECK(v == 1.0);
}

TEST_CASE("quadratic solutions")
{
    SUBCASE("unit right-hand side coefficient")
    {
        for (int n = 1; n <= 7; ++n)
            for (int k = 1; k <= n; ++k)
                CHECK(quadratic_coefficient(n, k) == doctest::Approx(0.5 * std::pow(oracle::binom(n, k), -1.0 / k)).epsilon(1e-14));
    }
    SUBCASE("quotient coefficient balances F_k and F_l")
    {
        for (int n = 2; n <= 8; ++n)
            for (int k = 2; k <= n; ++k)
                for (int l = 1; l < k; ++l) {
                    const double c = quadratic_coefficient(n, k, QuadraticMode::quotient(l));
                    const double fk = oracle::binom(n, k) * std::pow(2 * c, k);
                    const double fl = oracle::binom(n, l) * std::pow(2 * c, l);
                    CHECK(std::abs(fk - fl) <= 1e-12 * fl);
                }
    }
    SUBCASE("l = k - 1 gives k / (2 (n - k + 1))")
    {
        for (int n = 2; n <= 8; ++n)
            for (int k = 2; k <= n; ++k)
                CHECK(quadratic_coefficient(n, k, QuadraticMode::quotient(k - 1)) ==
                      doctest::Approx(k / (2.0 * (n - k + 1))).epsilon(1e-14));
    }
    SUBCASE("invalid (k, l) is rejected")
    {
        CHECK_THROWS_AS((void)quadratic_coefficient(5, 2, QuadraticMode::quotient(2)), PreconditionError);
        CHECK_THROWS_AS((void)quadratic_coefficient(5, 6), PreconditionError);
    }
    SUBCASE("F_k of the unit solution is 1")
    {
        const auto w = quadratic_solution(5, 2, 1.0);
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(radial_fk(w, 2).values[i] - 1.0) <= 1e-8);
    }
}

TEST_CASE("solve_radial")
{
    SUBCASE("zero density gives zero")
    {
        const auto u = solve_radial(RadialDensity::constant(0.0, 1.0), 3, 1, RadialDomain::ball(1.0), 101);
        for (double v : u.u()) CHECK(v == 0.0);
    }
    SUBCASE("uniform ball in five dimensions is the Newtonian potential")
    {
        const auto u = solve_radial(RadialDensity::constant(1.0, 1.0), 5, 1, RadialDomain::whole_space());
        for (double r : {0.0, 0.3, 0.99, 1.0, 2.0, 10.0, 500.0, 5000.0})
            CHECK(u.value_at(r) == doctest::Approx(oracle::newtonian_uniform_ball(5, r)).epsilon(1e-6));
        CHECK(u.tail_exponent() == doctest::Approx(-3.0));
    }
    SUBCASE("unit density on a ball reproduces the quadratic")
    {
        const auto u = solve_radial(RadialDensity::constant(1.0, 1.0), 5, 2, RadialDomain::ball(1.0));
        const double c = quadratic_coefficient(5, 2);
        for (std::size_t i = 0; i < u.size(); i += 500)
            CHECK(u.u()[i] == doctest::Approx(c * (u.r()[i] * u.r()[i] - 1.0)).epsilon(1e-8));
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(solve_radial(RadialDensity::constant(1.0, 1.0), 4, 2, RadialDomain::whole_space()), PreconditionError);
        RadialDensity neg{[](double) { return -1.0; }, 1.0, {}, "negative"};
        CHECK_THROWS_AS(solve_radial(neg, 3, 1, RadialDomain::ball(1.0)), PreconditionError);
    }
}

TEST_CASE("radial_norm")
{
    for (int n = 2; n <= 6; ++n) {
        const double r = 1.7;
        CHECK(radial_norm(constant_profile(n, 1.0, r, 1001), 1.0) ==
              doctest::Approx(oracle::ball_volume(n) * std::pow(r, n)).epsilon(1e-9));
    }
    const auto r = linear_grid(0.0, 1.0, 1001);
    std::vector<double> u(r.size()), du(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        u[i] = r[i] * r[i] - 1.0;
        du[i] = 2 * r[i];
    }
    const RadialField p(3, r, u, du, RadialKind::dirichlet_ball);
    CHECK(radial_norm(p, 1.0) == doctest::Approx(8 * std::numbers::pi / 15).epsilon(1e-12));
}

TEST_CASE("radial energies")
{
    for (auto [n, k] : {std::pair{3, 1}, std::pair{5, 2}, std::pair{7, 3}}) {
        const double radius = 1.4;
        const auto w = quadratic_solution(n, k, radius);
        const double c = quadratic_coefficient(n, k);
        CHECK(radial_energy(w, k) == doctest::Approx(c * oracle::paraboloid_integral(n, radius)).epsilon(1e-10));
        CHECK(radial_mutual_energy(w, w, k) == radial_energy(w, k));
    }
    SUBCASE("bump solution in seven dimensions converges under refinement")
    {
        const auto f = RadialDensity::polynomial_bump(2, 1.0);
        double e[3];
        const int samples[3] = {1001, 2001, 4001};
        for (int i = 0; i < 3; ++i) e[i] = radial_energy(solve_radial(f, 7, 2, RadialDomain::ball(1.0), samples[i]), 2);
        CHECK(e[2] > 0.0);
        CHECK(std::isfinite(e[2]));
        CHECK(std::abs(e[2] - e[1]) < std::abs(e[1] - e[0]));
        CHECK(std::abs(e[2] - e[1]) <= 1e-6 * e[2]);
    }
}

TEST_CASE("dilation and amplitude scaling of energies")
{
    const auto u = solve_radial(RadialDensity::polynomial_bump(1, 0.8), 5, 2, RadialDomain::ball(1.0), 4001);
    const double e = radial_energy(u, 2);
    // u_l(x) = l^{-2} u(l x): same Hessian at l x, so E(u_l) = l^{-2-n} E(u).
    for (double l : {0.5, 2.0}) CHECK(radial_energy(u.dilate(l), 2) == doctest::Approx(std::pow(l, -7.0) * e).epsilon(1e-10));
    CHECK(radial_energy(u.scaled(3.0), 2) == doctest::Approx(27.0 * e).epsilon(1e-12));
}

TEST_CASE("h curve of radial profiles")
{
    const auto u = quadratic_solution(5, 2, 1.0, {}, 2001);
    const std::vector<double> ts{0.0, 0.25, 1.0};
    const auto c = radial_h_curve(u, u, 2, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(c.h[i] == doctest::Approx(std::pow(1 + ts[i], 3) * c.h[0]).epsilon(1e-10));
}

TEST_CASE("RadialField invariants")
{
    const auto r = linear_grid(0.0, 1.0, 11);
    std::vector<double> u(r.size(), -1.0), du(r.size(), 0.0);
    CHECK_THROWS_AS(RadialField(3, r, u, du, RadialKind::dirichlet_ball), PreconditionError);
    du[3] = -0.1;
    CHECK_THROWS_AS(RadialField(3, r, u, du, RadialKind::free), PreconditionError);
    CHECK(radial_kind_from_string("entire") == RadialKind::entire);
    CHECK_THROWS_AS((void)radial_kind_from_string("torus"), PreconditionError);
}
