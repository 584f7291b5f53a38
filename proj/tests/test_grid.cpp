#include "hesskit/error.hpp"
#include "hesskit/families.hpp"
#include "hesskit/grid.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace hesskit;

namespace {

double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double unit_c(int n, int k) { return 0.5 * std::pow(oracle::binom(n, k), -1.0 / k); }

/// Largest |D_00 u + sin x_0| over masked stencil nodes.
double sine_hessian_error(int cells)
{
    const auto spec = GridSpec::ball(2, cells, 1.0);
    const auto u = GridField::sample(spec, [](std::span<const double> x) { return std::sin(x[0]); });
    const auto h = hessian_fd(u);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.in_mask(i) && h.valid(i)) err = std::max(err, std::abs(h.entry(i, 0, 0) + std::sin(u.coords(i)[0])));
    return err;
}

} // namespace

TEST_CASE("GridSpec::ball centers the box on the ball")
{
    const auto spec = GridSpec::ball(3, 10, 2.0, {0.5, 0.0, -1.0});
    CHECK(spec.spacing == doctest::Approx(0.4));
    CHECK(spec.shape == std::vector<int>{15, 15, 15});
    const GridField u = GridField::sample(spec, [](std::span<const double>) { return 0.0; });
    const auto mid = u.coords(spec.node_count() / 2);
    CHECK(mid[0] == doctest::Approx(0.5));
    CHECK(mid[2] == doctest::Approx(-1.0));
    GridSpec bad = spec;
    bad.n = 5;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("Hessian of a quadratic is exact at every stencil node")
{
    for (int n = 2; n <= 4; ++n) {
        const auto spec = GridSpec::ball(n, 10, 1.0);
        const double c = 0.3;
        const auto u = quadratic_grid_field(spec, c);
        const auto h = hessian_fd(u);
        std::size_t checked = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!h.valid(i)) continue;
            ++checked;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) CHECK(h.entry(i, a, b) == doctest::Approx(a == b ? 2 * c : 0.0).epsilon(1e-10).scale(1));
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("Hessian of x1 x2 has unit off-diagonal entries")
{
    const auto spec = GridSpec::ball(3, 8, 1.0);
    const auto u = GridField::sample(spec, [](std::span<const double> x) { return x[0] * x[1]; });
    const auto h = hessian_fd(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!h.valid(i)) continue;
        CHECK(std::abs(h.entry(i, 0, 1) - 1.0) <= 1e-12);
        CHECK(std::abs(h.entry(i, 0, 0)) <= 1e-12);
        CHECK(std::abs(h.entry(i, 2, 2)) <= 1e-12);
        CHECK(std::abs(h.entry(i, 1, 2)) <= 1e-12);
    }
}

TEST_CASE("Hessian of sin(x1) converges at second order")
{
    const double e1 = sine_hessian_error(16);
    const double e2 = sine_hessian_error(32);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("F_k of the zero field vanishes")
{
    const auto spec = GridSpec::ball(3, 8, 1.0);
    const auto u = GridField::sample(spec, [](std::span<const double>) { return 0.0; });
    for (int k = 1; k <= 3; ++k)
        for (double v : fk_field(u, k).values()) CHECK(v == 0.0);
}

TEST_CASE("k-convexity")
{
    const auto spec = GridSpec::ball(3, 10, 1.0);
    const auto convex = GridField::sample(spec, [](std::span<const double> x) { return norm2(x) - 1.0; });
    for (int k = 1; k <= 3; ++k) CHECK(is_k_convex(convex, k));
    const auto concave = GridField::sample(spec, [](std::span<const double> x) { return -norm2(x); });
    CHECK_FALSE(is_k_convex(concave, 1));
    const auto bad = k_convexity_violation(concave, 1);
    REQUIRE(bad.has_value());
    CHECK(bad->order == 1);
    CHECK(bad->value == doctest::Approx(-6.0));

    SUBCASE("small cosine perturbation is decided pointwise")
    {
        const double c = unit_c(3, 2);
        const auto u = GridField::sample(spec, [&](std::span<const double> x) {
            return c * (norm2(x) - 1.0) * (1.0 + 0.05 * std::cos(x[0]));
        });
        const auto f1 = fk_field(u, 1);
        const auto f2 = fk_field(u, 2);
        bool pointwise = true;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u.in_mask(i) && (f1[i] < 0 || f2[i] < 0)) pointwise = false;
        CHECK(is_k_convex(u, 2, 0.0) == pointwise);
    }
}

TEST_CASE("integrate")
{
    SUBCASE("unit density on a disk, 64 cells")
    {
        const double r = 1.3;
        const auto spec = GridSpec::ball(2, 64, r);
        const auto one = GridField::sample(spec, [](std::span<const double>) { return 1.0; });
        CHECK(integrate(one) == doctest::Approx(oracle::ball_volume(2) * r * r).epsilon(0.01));
    }
    SUBCASE("zero")
    {
        const auto spec = GridSpec::ball(3, 8, 1.0);
        CHECK(integrate(GridField::sample(spec, [](std::span<const double>) { return 0.0; })) == 0.0);
    }
    SUBCASE("paraboloid in three dimensions")
    {
        const auto spec = GridSpec::ball(3, 24, 1.0);
        const auto f = GridField::sample(spec, [](std::span<const double> x) { return 1.0 - norm2(x); });
        CHECK(integrate(f) == doctest::Approx(oracle::paraboloid_integral(3, 1.0)).epsilon(0.01));
    }
}

TEST_CASE("Hessian energy of the unit quadratic")
{
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= n; ++k) {
            CAPTURE(n);
            CAPTURE(k);
            const double c = unit_c(n, k);
            const auto spec = GridSpec::ball(n, n == 2 ? 64 : 24, 1.0);
            const auto u = quadratic_grid_field(spec, c);
            const double e = hessian_energy(u, k);
            CHECK(e == doctest::Approx(c * oracle::paraboloid_integral(n, 1.0)).epsilon(0.01));
            CHECK(mutual_energy(u, u, k) == e);
        }
    const auto spec = GridSpec::ball(2, 16, 1.0);
    CHECK(hessian_energy(GridField::sample(spec, [](std::span<const double>) { return 0.0; }), 1) == 0.0);
}

TEST_CASE("energies reject non-k-convex fields and name the node")
{
    const auto spec = GridSpec::ball(2, 16, 1.0);
    const auto u = GridField::sample(spec, [](std::span<const double> x) { return -norm2(x); }, "bowl");
    try {
        (void)hessian_energy(u, 1);
        FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("F_1") != std::string::npos);
        CHECK(msg.find("bowl") != std::string::npos);
    }
}

TEST_CASE("h curve")
{
    const auto spec = GridSpec::ball(3, 16, 1.0);
    const int k = 2;
    const auto u = quadratic_grid_field(spec, unit_c(3, k));
    const std::vector<double> ts{0.0, 0.5, 1.0};

    SUBCASE("v = u is homogeneous of degree k+1")
    {
        const auto c = h_curve(u, u, k, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CHECK(c.h[i] == doctest::Approx(std::pow(1 + ts[i], k + 1) * c.h[0]).epsilon(1e-10));
            CHECK(c.h[i] * c.d2h[i] == doctest::Approx(k / (k + 1.0) * c.dh[i] * c.dh[i]).epsilon(1e-10));
        }
    }
    SUBCASE("v = 0 leaves h constant")
    {
        const auto zero = u.with_values(std::vector<double>(u.size(), 0.0));
        const auto c = h_curve(u, zero, k, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CHECK(c.h[i] == c.h[0]);
            CHECK(c.dh[i] == 0.0);
            CHECK(c.d2h[i] == 0.0);
        }
    }
    SUBCASE("h' matches a centered difference of h")
    {
        Rng rng(5);
        const auto v = random_admissible_grid_field(rng, spec, k);
        const double t = 0.4;
        // Discrete h is a cubic in t, so fd(d) - h' = c + a d^2 where c is the
        // discretization offset of the mutual-energy form of h'.
        const auto err = [&](double d) {
            const std::vector<double> s{t - d, t, t + d};
            const auto c = h_curve(u, v, k, s);
            return (c.h[2] - c.h[0]) / (2 * d) - c.dh[1];
        };
        const double e1 = err(0.04), e2 = err(0.02), e3 = err(0.01);
        CHECK((e1 - e2) / (e2 - e3) == doctest::Approx(4.0).epsilon(1e-6));
        const double offset = (4 * e3 - e2) / 3;
        const auto mid = h_curve(u, v, k, std::vector<double>{t});
        CHECK(std::abs(offset) <= 0.05 * std::abs(mid.dh[0]));
    }
}

TEST_CASE("Reilly residual")
{
    const auto spec = GridSpec::ball(3, 12, 1.0);
    SUBCASE("k = 1")
    {
        Rng rng(9);
        const auto u = random_admissible_grid_field(rng, spec, 1);
        const auto v = random_admissible_grid_field(rng, spec, 1);
        CHECK(reilly_residual(u, v, 1, 0.3).residual <= 1e-8);
    }
    SUBCASE("quadratic forms, step 1e-4")
    {
        const auto u = GridField::sample(spec, [](std::span<const double> x) {
            return x[0] * x[0] + 0.5 * x[1] * x[1] + 0.8 * x[2] * x[2] + 0.2 * x[0] * x[1];
        });
        const auto v = GridField::sample(spec, [](std::span<const double> x) {
            return -0.3 * x[0] * x[0] + x[1] * x[2] + 0.4 * x[2] * x[2];
        });
        for (int k = 1; k <= 3; ++k) CHECK(reilly_residual(u, v, k, 0.5, 1e-4).residual <= 1e-8);
    }
}

TEST_CASE("divergence identities are exact on cubic fields")
{
    const auto spec = GridSpec::ball(3, 12, 1.0);
    const auto u = GridField::sample(spec, [](std::span<const double> x) {
        return x[0] * x[0] * x[1] + 0.5 * x[2] * x[2] * x[2] + x[0] * x[1] * x[2] + norm2(x);
    });
    CHECK(divergence_form_residual(u, 1) <= 1e-9);
    for (int k = 1; k <= 2; ++k) CHECK(null_divergence_residual(u, k) <= 1e-9);
}

TEST_CASE("divergence form at k = 2 converges at second order on a cubic field")
{
    const auto f = [](std::span<const double> x) {
        return x[0] * x[0] * x[1] + 0.5 * x[2] * x[2] * x[2] + x[0] * x[1] * x[2] + norm2(x);
    };
    const double coarse = divergence_form_residual(GridField::sample(GridSpec::ball(3, 12, 1.0), f), 2);
    const double fine = divergence_form_residual(GridField::sample(GridSpec::ball(3, 24, 1.0), f), 2);
    CHECK(coarse > 0.0);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
}
