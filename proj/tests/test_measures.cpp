#include "hesskit/error.hpp"
#include "hesskit/measures.hpp"
#include "hesskit/quadrature.hpp"
#include "hesskit/symm.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace hesskit;

namespace {

Point origin(int n) { return Point(static_cast<std::size_t>(n), 0.0); }

Point on_axis(int n, double r)
{
    auto x = origin(n);
    x[0] = r;
    return x;
}

DiscreteMeasure uniform_ball(int n, double radius = 1.0, double value = 1.0)
{
    return DiscreteMeasure(n, {}, RadialDensityPart{origin(n), RadialDensity::constant(value, radius)});
}

/// min(|x|, cut)^{-2k} on B_rho.
DiscreteMeasure truncated_inverse_power(int n, int k, double rho, double cut)
{
    RadialDensity f{[cut, k](double r) { return std::pow(std::max(r, cut), -2.0 * k); }, rho, {cut}, "inverse-power"};
    return DiscreteMeasure(n, {}, RadialDensityPart{origin(n), f});
}

} // namespace

TEST_CASE("ball_mass")
{
    const auto mu = DiscreteMeasure::point_mass(origin(3));
    CHECK(ball_mass(mu, origin(3), 0.7) == 1.0);
    CHECK(ball_mass(mu, origin(3), 0.0) == 1.0);
    CHECK(ball_mass(mu, on_axis(3, 1.0), 0.5) == 0.0);
    CHECK(ball_mass(mu, on_axis(3, 1.0), 1.0) == 1.0);
    CHECK_THROWS_AS((void)ball_mass(mu, origin(3), -1.0), PreconditionError);

    SUBCASE("uniform density, half radius")
    {
        for (int n = 2; n <= 6; ++n)
            CHECK(ball_mass(uniform_ball(n), origin(n), 0.5) ==
                  doctest::Approx(oracle::ball_volume(n) / std::pow(2.0, n)).epsilon(1e-9));
    }
    SUBCASE("atoms and density add")
    {
        const int n = 3;
        const auto dens = uniform_ball(n);
        const auto both = dens.with_atom({on_axis(n, 0.2), 0.5}).with_atom({on_axis(n, 0.9), 2.0});
        CHECK(both.total_mass() == doctest::Approx(oracle::ball_volume(3) + 2.5));
        const Point x = on_axis(n, 0.4);
        for (double t : {0.1, 0.3, 0.6, 1.5}) {
            const double atoms = (t >= 0.2 ? 0.5 : 0.0) + (t >= 0.5 ? 2.0 : 0.0);
            CHECK(ball_mass(both, x, t) == doctest::Approx(ball_mass(dens, x, t) + atoms).epsilon(1e-12));
        }
    }
    SUBCASE("box density")
    {
        const DiscreteMeasure box(3, {}, BoxDensityPart{{-1, -1, -1}, {1, 1, 1}, 2.0});
        CHECK(ball_mass(box, origin(3), 0.5) == doctest::Approx(2.0 * oracle::ball_volume(3) / 8).epsilon(1e-9));
        CHECK(ball_mass(box, origin(3), 5.0) == doctest::Approx(16.0).epsilon(1e-12));
    }
    SUBCASE("hyperplane disk")
    {
        const DiscreteMeasure disk(3, {}, HyperplaneDiskPart{2, 0.0, origin(3), 2.0, 1.5});
        CHECK(ball_mass(disk, origin(3), 0.5) == doctest::Approx(1.5 * oracle::ball_volume(2) * 0.25).epsilon(1e-9));
        CHECK(disk.total_mass() == doctest::Approx(1.5 * oracle::ball_volume(2) * 4).epsilon(1e-12));
    }
}

TEST_CASE("measure invariants")
{
    CHECK_THROWS_AS(DiscreteMeasure(2, {{{0.0, 0.0}, 0.0}}), PreconditionError);
    CHECK_THROWS_AS(DiscreteMeasure(2, {{{0.0, 0.0}, -1.0}}), PreconditionError);
    CHECK_THROWS_AS(DiscreteMeasure(2, {{{0.0, 0.0, 0.0}, 1.0}}), PreconditionError);
    RadialDensity neg{[](double) { return -0.5; }, 1.0, {}, "negative"};
    CHECK_THROWS_AS(DiscreteMeasure(3, {}, RadialDensityPart{origin(3), neg}), PreconditionError);
}

TEST_CASE("Wolff potential of a point mass matches the closed form")
{
    for (auto [n, k] : {std::pair{3, 1}, std::pair{5, 1}, std::pair{5, 2}, std::pair{9, 3}}) {
        CAPTURE(n);
        CAPTURE(k);
        const auto mu = DiscreteMeasure::point_mass(origin(n));
        const auto params = PotentialParams::for_hessian(k);
        for (double r : geometric_grid(1e-3, 1e3, 13)) {
            const double w = wolff(mu, on_axis(n, r), params);
            CHECK(std::abs(w / oracle::point_mass_wolff(n, k, r) - 1.0) <= 1e-6);
        }
        CHECK(wolff(mu, origin(n), params) == std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("Wolff potential edge cases")
{
    const auto params = PotentialParams::for_hessian(1);
    CHECK(wolff(DiscreteMeasure(3), on_axis(3, 1.0), params) == 0.0);
    const auto mu = DiscreteMeasure::point_mass(origin(3));
    CHECK(wolff(mu, on_axis(3, 2.0), PotentialParams::for_hessian(1, 1.5)) == 0.0);
    CHECK_THROWS_AS((void)wolff(DiscreteMeasure::point_mass(origin(2)), on_axis(2, 1.0), params), NumericalError);
}

TEST_CASE("Riesz potential")
{
    const double alpha = 1.0;
    const auto one = DiscreteMeasure::point_mass(origin(3));
    CHECK(riesz(one, on_axis(3, 2.0), alpha) == doctest::Approx(std::pow(2.0, alpha - 3)).epsilon(1e-14));
    CHECK(riesz(one, origin(3), alpha) == std::numeric_limits<double>::infinity());
    const DiscreteMeasure two(3, {{origin(3), 1.0}, {on_axis(3, 1.0), 1.0}});
    const Point x{0.3, 0.4, 0.0};
    CHECK(riesz(two, x, alpha) == doctest::Approx(std::pow(0.5, alpha - 3) + std::pow(std::hypot(0.7, 0.4), alpha - 3)).epsilon(1e-14));

    SUBCASE("uniform ball in three dimensions is the Newtonian potential")
    {
        const auto ball = uniform_ball(3);
        for (double d : {0.0, 0.4, 0.8, 1.0, 1.5, 4.0})
            CHECK(riesz(ball, on_axis(3, d), 2.0) == doctest::Approx(oracle::newtonian_ball_potential_3d(d)).epsilon(1e-7));
    }
    SUBCASE("box densities are not supported")
    {
        const DiscreteMeasure box(3, {}, BoxDensityPart{{-1, -1, -1}, {1, 1, 1}, 1.0});
        CHECK_THROWS_AS((void)riesz(box, on_axis(3, 3.0), alpha), PreconditionError);
    }
}

TEST_CASE("Havin-Mazya potential")
{
    const auto params = PotentialParams::for_hessian(2);
    const auto mu = uniform_ball(5);
    const Point x = on_axis(5, 1.5);
    const double u = havin_mazya(mu, x, params);
    CHECK(u > 0.0);
    const double s = 8.0;
    CHECK(havin_mazya(mu.scaled(s), x, params) == doctest::Approx(std::pow(s, 1.0 / (params.p - 1)) * u).epsilon(1e-10));
    const DiscreteMeasure atoms(5, {{origin(5), 1.0}, {on_axis(5, 0.5), 2.0}});
    CHECK(havin_mazya(atoms.scaled(s), x, params) == doctest::Approx(std::pow(s, 1.0 / (params.p - 1)) * havin_mazya(atoms, x, params)).epsilon(1e-10));
    CHECK(havin_mazya(DiscreteMeasure(5), x, params) == 0.0);
}

TEST_CASE("Wolff energy")
{
    const auto params = PotentialParams::for_hessian(1);
    CHECK(wolff_energy(DiscreteMeasure(5), params) == 0.0);
    CHECK(wolff_energy(DiscreteMeasure::point_mass(origin(5)), params) == std::numeric_limits<double>::infinity());
    const double e = wolff_energy(uniform_ball(5), params);
    CHECK(std::isfinite(e));
    CHECK(e > 0.0);
}

TEST_CASE("adams_kappa")
{
    SUBCASE("Lebesgue measure at the Sobolev exponent")
    {
        for (auto [n, k] : {std::pair{3, 1}, std::pair{4, 1}}) {
            const double q = ExponentSet::make(n, k).q_sobolev();
            Point lo(static_cast<std::size_t>(n), -1.0), hi(static_cast<std::size_t>(n), 1.0);
            const DiscreteMeasure leb(n, {}, BoxDensityPart{lo, hi, 1.0});
            const auto kappa = adams_kappa(leb, q, k);
            CHECK_FALSE(kappa.divergent);
            CHECK(kappa.value <= 1.0 + 1e-9);
            CHECK(kappa.value >= 0.9);
        }
    }
    SUBCASE("point mass diverges")
    {
        const auto kappa = adams_kappa(DiscreteMeasure::point_mass(origin(5)), 3.0, 2);
        CHECK(kappa.divergent);
    }
    SUBCASE("hyperplane disk: finite iff q <= (n-1)(k+1)/(n-2k)")
    {
        const int n = 3, k = 1;
        const double threshold = (n - 1.0) * (k + 1) / (n - 2.0 * k);
        const DiscreteMeasure disk(n, {}, HyperplaneDiskPart{0, 0.0, origin(n), 1.0, 1.0});
        const auto below = adams_kappa(disk, 0.9 * threshold, k);
        const auto above = adams_kappa(disk, 1.2 * threshold, k);
        CHECK_FALSE(below.divergent);
        CHECK(std::isfinite(below.value));
        CHECK(above.divergent);
        // Analytic slab ratio for a small centered ball: V_{n-1} t^{n-1} / (V_n t^n)^theta.
        const double q = 0.9 * threshold;
        const double theta = (1.0 - 2.0 * k / n) * q / (k + 1);
        const double t = 0.5;
        const double ratio = oracle::ball_volume(n - 1) * std::pow(t, n - 1) / std::pow(oracle::ball_volume(n) * std::pow(t, n), theta);
        CHECK(below.value >= ratio * (1 - 1e-9));
    }
}

TEST_CASE("Fefferman-Phong condition at the borderline exponent")
{
    for (auto [n, k] : {std::pair{3, 1}, std::pair{5, 2}}) {
        CAPTURE(n);
        CAPTURE(k);
        const double eps = n / (2.0 * k) - 1.0;
        SUBCASE("constant weight: the sup is the total mass of w^{1+eps}")
        {
            const double c = 1.7;
            const auto r = fefferman_phong_check(uniform_ball(n, 1.0, c), eps, k);
            CHECK_FALSE(r.divergent);
            CHECK(r.value == doctest::Approx(oracle::ball_volume(n) * std::pow(c, 1 + eps)).epsilon(1e-6));
        }
        SUBCASE("truncated inverse power grows logarithmically and is flagged")
        {
            std::vector<DiscreteMeasure> levels;
            for (int j = 1; j <= 5; ++j) levels.push_back(truncated_inverse_power(n, k, 1.0, std::pow(2.0, -j)));
            const auto refined = fefferman_phong_refine(levels, eps, k);
            CHECK(refined.divergent);
            for (int j = 1; j <= 5; ++j)
                CHECK(refined.sups[j - 1] == doctest::Approx(oracle::truncated_inverse_power_mass(n, 1.0, std::pow(2.0, -j))).epsilon(1e-6));
        }
        SUBCASE("zero weight")
        {
            const auto r = fefferman_phong_check(uniform_ball(n, 1.0, 0.0), eps, k);
            CHECK(r.value == 0.0);
            CHECK_FALSE(r.divergent);
        }
    }
}

TEST_CASE("geometric helpers")
{
    // Ball fully inside the box.
    CHECK(ball_box_volume({0, 0}, 0.5, {-1, -1}, {1, 1}) == doctest::Approx(oracle::ball_volume(2) * 0.25).epsilon(1e-9));
    // Quarter disk at a box corner.
    CHECK(ball_box_volume({0, 0}, 0.5, {0, 0}, {1, 1}) == doctest::Approx(oracle::ball_volume(2) * 0.25 / 4).epsilon(1e-9));
    // Concentric lens is the smaller ball.
    CHECK(lens_volume(3, 0.5, 2.0, 0.0) == doctest::Approx(oracle::ball_volume(3) * 0.125).epsilon(1e-12));
    CHECK(lens_volume(3, 0.5, 0.5, 1.5) == 0.0);
    CHECK(sphere_cap_fraction(3, 1.0, 0.0, 2.0) == 1.0);
    // Archimedes: the cap y.e >= h of the unit sphere has area fraction (1-h)/2; here h = 1/2.
    CHECK(sphere_cap_fraction(3, 1.0, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
}
