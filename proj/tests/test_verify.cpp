#include "hesskit/error.hpp"
#include "hesskit/families.hpp"
#include "hesskit/quadrature.hpp"
#include "hesskit/verify.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace hesskit;

namespace {

const double inf = std::numeric_limits<double>::infinity();

InequalityReport raw(double lhs, double rhs, double tol = default_tolerance, bool equality = false)
{
    InequalityReport r;
    r.name = "raw";
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tol;
    r.equality_case = equality;
    r.finish();
    return r;
}

RadialField zero_profile(const RadialField& like)
{
    return {like.dim(), like.r(), std::vector<double>(like.size(), 0.0), std::vector<double>(like.size(), 0.0),
            RadialKind::dirichlet_ball, "zero"};
}

} // namespace

TEST_CASE("report ratio and pass flag")
{
    CHECK(raw(1.0, 2.0).ratio == 0.5);
    CHECK(raw(1.0, 2.0).pass);
    CHECK(raw(0.0, 0.0).ratio == 0.0);
    CHECK(raw(0.0, 0.0).pass);
    CHECK(raw(1.0, 0.0).ratio == inf);
    CHECK_FALSE(raw(1.0, 0.0).pass);
    CHECK(raw(1.0 + 0.5e-4, 1.0).pass);
    CHECK_FALSE(raw(1.0 + 2e-4, 1.0).pass);
    CHECK(raw(1.0 - 0.5e-4, 1.0, default_tolerance, true).pass);
    CHECK_FALSE(raw(0.9, 1.0, default_tolerance, true).pass);
    const auto b = bound_report("b", 3e-10, 1e-9, {{"n", 3}});
    CHECK(b.pass);
    CHECK(b.tolerance == 0.0);
    CHECK(*b.parameter("n") == 3.0);
    CHECK_FALSE(b.parameter("k").has_value());
}

TEST_CASE("normalize_empirical uses the family maximum")
{
    std::vector<InequalityReport> family;
    for (double q : {0.5, 2.0, 1.25}) {
        InequalityReport r;
        r.name = "member";
        r.lhs = q;
        r.rhs_base = 1.0;
        r.rhs = 1.0;
        r.constant_source = ConstantSource::empirical;
        r.finish();
        family.push_back(r);
    }
    CHECK(normalize_empirical(family) == doctest::Approx(2.0));
    CHECK(family[0].ratio == doctest::Approx(0.25));
    CHECK(family[1].ratio == doctest::Approx(1.0));
    CHECK(family[2].ratio == doctest::Approx(0.625));
    for (const auto& r : family) CHECK(r.pass);
}

TEST_CASE("constant source strings")
{
    for (auto s : {ConstantSource::paper_sharp, ConstantSource::paper_explicit, ConstantSource::empirical})
        CHECK(constant_source_from_string(to_string(s)) == s);
    CHECK_THROWS_AS((void)constant_source_from_string("folklore"), PreconditionError);
}

TEST_CASE("Schwarz and Minkowski on closed-form pairs")
{
    for (auto [n, k] : {std::pair{3, 1}, std::pair{5, 2}}) {
        const auto w = quadratic_solution(n, k, 1.0, {}, 4001);
        CHECK(std::abs(verify_schwarz(w, w, k).ratio - 1.0) <= 1e-12);
        for (double s : {0.1, 3.0}) CHECK(std::abs(verify_schwarz(w, w.scaled(s), k).ratio - 1.0) <= 1e-10);
        CHECK(std::abs(verify_minkowski(w, w, k).ratio - 1.0) <= 1e-12);
        CHECK(std::abs(verify_minkowski(w, zero_profile(w), k).ratio - 1.0) <= 1e-12);
        // lhs of u = v is 2 E(u)^{1/(k+1)} by degree-(k+1) homogeneity.
        const double e = radial_energy(w, k);
        CHECK(verify_minkowski(w, w, k).lhs == doctest::Approx(2 * std::pow(e, 1.0 / (k + 1))).epsilon(1e-12));
    }
}

TEST_CASE("Schwarz, Minkowski and h-convexity on random radial pairs")
{
    Rng rng(2024);
    for (int i = 0; i < 10; ++i) {
        const auto u = random_admissible_profile(rng, 5, 2, 1.0, 2001);
        const auto v = random_admissible_profile(rng, 5, 2, 1.0, 2001);
        CHECK(verify_schwarz(u, v, 2).pass);
        CHECK(verify_schwarz(u, v, 2).ratio <= 1.0 + 1e-4);
        CHECK(verify_minkowski(u, v, 2).ratio <= 1.0 + 1e-4);
        const auto ts = linear_grid(0.0, 1.0, 21);
        const auto h = verify_h_convexity(u, v, 2, ts);
        CHECK(h.pass);
    }
}

TEST_CASE("h-convexity degenerate cases")
{
    const auto w = quadratic_solution(3, 1, 1.0, {}, 2001);
    const auto ts = linear_grid(0.0, 1.0, 21);
    CHECK(verify_h_convexity(w, w, 1, ts).pass);
    CHECK(verify_h_convexity(w, zero_profile(w), 1, ts).pass);
}

TEST_CASE("sharp Poincare witnesses")
{
    for (auto [n, k] : {std::pair{3, 1}, std::pair{5, 2}, std::pair{7, 3}}) {
        CAPTURE(n);
        CAPTURE(k);
        const auto w = quadratic_solution(n, k, 1.0);
        CHECK(std::abs(verify_poincare_L1(w, k).ratio - 1.0) <= 1e-4);
        CHECK(std::abs(verify_poincare_ball_scaled(w, k).ratio - 1.0) <= 1e-4);
        const auto wq = k == 1 ? w : quadratic_solution(n, k, 1.0, QuadraticMode::quotient(k - 1));
        CHECK(std::abs(verify_poincare_quotient(wq, k).ratio - 1.0) <= 1e-4);
        // Amplitude drops out of the ratio.
        for (double s : {0.1, 10.0})
            CHECK(verify_poincare_L1(w.scaled(s), k).ratio == doctest::Approx(verify_poincare_L1(w, k).ratio).epsilon(1e-10));
        // Ball-scaled form is dilation invariant.
        const auto d = verify_poincare_ball_scaled(w.dilate(2.0), k);
        CHECK(d.ratio == doctest::Approx(verify_poincare_ball_scaled(w, k).ratio).epsilon(1e-6));
    }
    SUBCASE("k = 1 quotient reproduces the L1 report")
    {
        const auto w = quadratic_solution(4, 1, 1.0);
        CHECK(verify_poincare_quotient(w, 1).ratio == doctest::Approx(verify_poincare_L1(w, 1).ratio).epsilon(1e-12));
    }
    SUBCASE("general Poincare rejects l = k")
    {
        const auto w = quadratic_solution(7, 3, 1.0);
        CHECK_THROWS_AS((void)verify_poincare_general(w, 3, 3), PreconditionError);
        CHECK(verify_poincare_general(w, 3, 2).pass);
    }
}

TEST_CASE("gradient Poincare at k = 1 is the Green identity")
{
    Rng rng(3);
    const auto u = random_admissible_profile(rng, 4, 1, 1.0, 4001);
    const auto r = verify_gradient_poincare(u, 1);
    CHECK(r.pass);
    CHECK(std::abs(r.ratio - 1.0) <= 1e-3);
}

TEST_CASE("Sobolev ratio is invariant under dilation at the critical exponent")
{
    Rng rng(4);
    const auto u = random_admissible_profile(rng, 5, 2, 1.0, 4001);
    const double q = ExponentSet::make(5, 2).q_sobolev();
    const double a = verify_sobolev(u, 2, q).lhs / verify_sobolev(u, 2, q).rhs_base;
    const auto d = verify_sobolev(u.dilate(0.5), 2, q);
    CHECK(d.lhs / d.rhs_base == doctest::Approx(a).epsilon(1e-6));
    CHECK_THROWS_AS((void)verify_sobolev(u, 2, q * 1.1), PreconditionError);
}

TEST_CASE("dual Sobolev degenerate and scaling cases")
{
    const auto zero = verify_dual_sobolev(RadialDensity::constant(0.0, 1.0), 3, 1, RadialDomain::ball(1.0), 1001);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.pass);
    const auto f = RadialDensity::polynomial_bump(2, 0.7);
    const auto a = verify_dual_sobolev(f, 5, 2, RadialDomain::ball(1.0), 4001);
    const auto b = verify_dual_sobolev(f.scaled(4.0), 5, 2, RadialDomain::ball(1.0), 4001);
    CHECK(b.lhs / b.rhs_base == doctest::Approx(a.lhs / a.rhs_base).epsilon(1e-6));
}

TEST_CASE("Wolff sandwich")
{
    SUBCASE("uniform ball, n = 5, k = 1")
    {
        const auto s = verify_wolff_sandwich(RadialDensity::constant(1.0, 1.0), 5, 1);
        CHECK(s.pass);
        CHECK(s.c1 > 0.0);
        CHECK(s.c1 <= s.c2);
        CHECK(std::isfinite(s.c2));
        CHECK(s.decay_u == doctest::Approx(3.0).epsilon(0.01));
        CHECK(s.decay_wolff == doctest::Approx(3.0).epsilon(0.01));
        const auto t = verify_wolff_sandwich(RadialDensity::constant(3.0, 1.0), 5, 1);
        CHECK(t.c1 == doctest::Approx(s.c1).epsilon(1e-6));
        CHECK(t.c2 == doctest::Approx(s.c2).epsilon(1e-6));
    }
    SUBCASE("zero density is degenerate")
    {
        const auto s = verify_wolff_sandwich(RadialDensity::constant(0.0, 1.0), 5, 1);
        CHECK(s.degenerate);
    }
}

TEST_CASE("trace inequality against Lebesgue measure and point masses")
{
    const int n = 5, k = 2;
    const double q = ExponentSet::make(n, k).q_sobolev();
    const auto w = quadratic_solution(n, k, 1.0, {}, 4001);
    Point lo(n, -1.0), hi(n, 1.0);
    const DiscreteMeasure leb(n, {}, BoxDensityPart{lo, hi, 1.0});
    const auto r = verify_trace(w, leb, k, q, 1.0);
    const auto s = verify_sobolev(w, k, q);
    CHECK(r.lhs == doctest::Approx(s.lhs).epsilon(1e-6));
    const auto probe = trace_necessity_probe(w, k, q, geometric_grid(1.0, 1e4, 9));
    CHECK(probe.kappa_divergent);
    CHECK(probe.unbounded);
    CHECK(probe.fitted_exponent == doctest::Approx(probe.expected_exponent).epsilon(1e-3));
    CHECK(trace_probe_report(probe, n, k, q).pass);
}

TEST_CASE("local integral estimate")
{
    const auto r = linear_grid(0.0, 1.0, 101);
    const RadialField minus_one(3, r, std::vector<double>(r.size(), -1.0), std::vector<double>(r.size(), 0.0), RadialKind::free);
    const auto rep = verify_local_integral(minus_one, 1);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.pass);
    const auto w = quadratic_solution(5, 2, 1.0);
    const double a = verify_local_integral(w.shifted(0.1), 2).lhs / verify_local_integral(w.shifted(0.1), 2).rhs_base;
    const double b = verify_local_integral(w.shifted(1.0), 2).lhs / verify_local_integral(w.shifted(1.0), 2).rhs_base;
    CHECK(b < a);
}
