// Randomized invariants. Each property runs over independently seeded
// cases; a failure prints the property seed and the case index.

#include "hesskit/families.hpp"
#include "hesskit/io.hpp"
#include "hesskit/measures.hpp"
#include "hesskit/quadrature.hpp"
#include "hesskit/symm.hpp"
#include "hesskit/verify.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace hesskit;

namespace {

std::vector<std::vector<double>> rows(const Eigen::MatrixXd& m)
{
    std::vector<std::vector<double>> r(static_cast<std::size_t>(m.rows()), std::vector<double>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
    return r;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Point random_point(gen::Gen& g, int n, double spread) { return g.vector(n, -spread, spread); }

DiscreteMeasure random_atoms(gen::Gen& g, int n, int count)
{
    std::vector<Atom> atoms;
    for (int i = 0; i < count; ++i) atoms.push_back({random_point(g, n, 1.0), g.scale(0.1, 3.0)});
    return DiscreteMeasure(n, atoms);
}

} // namespace

TEST_CASE("property: elem_sym equals subset enumeration")
{
    gen::for_all(101, 200, [](gen::Gen& g) {
        const int n = g.integer(1, 8);
        const auto l = g.vector(n, -3, 3);
        const auto s = elem_sym(l);
        for (int k = 0; k <= n; ++k) CHECK(rel(s[k], oracle::subset_esym(l, k)) <= 1e-12);
    });
}

TEST_CASE("property: sigma_k equals the principal-minor sum")
{
    gen::for_all(102, 100, [](gen::Gen& g) {
        const int n = g.integer(1, 6);
        const auto m = g.symmetric(n);
        for (int k = 0; k <= n; ++k) CHECK(rel(sigma_k(SymMatrix(m), k), oracle::principal_minor_sum(rows(m), k)) <= 1e-11);
    });
}

TEST_CASE("property: sigma_k is orthogonally invariant and homogeneous of degree k")
{
    gen::for_all(103, 100, [](gen::Gen& g) {
        const int n = g.integer(2, 6);
        const auto m = g.symmetric(n);
        const auto q = random_orthogonal(g.engine(), n);
        const SymMatrix rotated = SymMatrix::symmetrized(q * m * q.transpose());
        const double s = g.scale(0.1, 10);
        for (int k = 1; k <= n; ++k) {
            const double a = sigma_k(SymMatrix(m), k);
            CHECK(rel(sigma_k(rotated, k), a) <= 1e-10 * std::pow(m.norm(), k));
            CHECK(rel(sigma_k(SymMatrix(s * m), k), std::pow(s, k) * a) <= 1e-10 * std::pow(s * m.norm(), k));
        }
    });
}

TEST_CASE("property: sigma_k_grad is the gradient of sigma_k")
{
    gen::for_all(104, 50, [](gen::Gen& g) {
        const int n = g.integer(2, 5);
        const auto a = g.symmetric(n);
        const auto b = g.symmetric(n);
        const int k = g.integer(1, n);
        const auto f = [&](double t) { return oracle::principal_minor_sum(rows(a + t * b), k); };
        const double fd = oracle::central_difference(f, 0.0, 1e-5);
        CHECK(std::abs(sigma_k_directional(SymMatrix(a), SymMatrix(b), k) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    });
}

TEST_CASE("property: ball mass is monotone in the radius and additive over parts")
{
    gen::for_all(105, 50, [](gen::Gen& g) {
        const int n = g.integer(2, 5);
        const auto atoms = random_atoms(g, n, g.integer(1, 6));
        const DiscreteMeasure dens(n, {}, RadialDensityPart{random_point(g, n, 0.5), RadialDensity::polynomial_bump(g.integer(0, 3), g.uniform(0.3, 1.5), g.uniform(0.1, 2))});
        DiscreteMeasure both = dens;
        for (const auto& a : atoms.atoms()) both = both.with_atom(a);
        const Point x = random_point(g, n, 1.5);
        double last = 0.0;
        for (double t = 0.0; t < 4.0; t += 0.25) {
            const double m = ball_mass(both, x, t);
            CHECK(m >= last - 1e-12);
            CHECK(std::abs(m - ball_mass(dens, x, t) - ball_mass(atoms, x, t)) <= 1e-10 * std::max(1.0, m));
            last = m;
        }
        CHECK(last == doctest::Approx(both.total_mass()).epsilon(1e-8));
    });
}

TEST_CASE("property: Wolff potential is homogeneous of degree 1/(p-1) and decreasing along rays")
{
    gen::for_all(106, 20, [](gen::Gen& g) {
        const int k = g.integer(1, 3);
        const int n = 2 * k + g.integer(1, 3);
        const auto mu = random_atoms(g, n, g.integer(1, 4));
        const auto params = PotentialParams::for_hessian(k);
        const double s = g.scale(0.1, 10);
        Point x(n, 0.0);
        x[0] = g.uniform(3.0, 6.0);
        const double w = wolff(mu, x, params);
        CHECK(rel(wolff(mu.scaled(s), x, params), std::pow(s, 1.0 / k) * w) <= 1e-10);
        Point y = x;
        y[0] *= 2;
        CHECK(wolff(mu, y, params) < w);
    });
}

TEST_CASE("property: Riesz potential is linear in the measure")
{
    gen::for_all(107, 50, [](gen::Gen& g) {
        const int n = g.integer(2, 6);
        const auto a = random_atoms(g, n, 3);
        const auto b = random_atoms(g, n, 2);
        DiscreteMeasure sum = a;
        for (const auto& at : b.atoms()) sum = sum.with_atom(at);
        const double alpha = g.uniform(0.5, std::min(2.0, n - 0.5));
        const Point x = random_point(g, n, 4.0);
        CHECK(rel(riesz(sum, x, alpha), riesz(a, x, alpha) + riesz(b, x, alpha)) <= 1e-12);
    });
}

TEST_CASE("property: Schwarz, Minkowski and h-convexity on random radial pairs")
{
    gen::for_all(108, 12, [](gen::Gen& g) {
        const int k = g.integer(1, 3);
        const int n = k + g.integer(0, 3);
        const double radius = g.scale(0.5, 2.0);
        const auto u = random_admissible_profile(g.engine(), n, k, radius, 1001);
        const auto v = random_admissible_profile(g.engine(), n, k, radius, 1001);
        CHECK(verify_schwarz(u, v, k).ratio <= 1.0 + 1e-4);
        CHECK(verify_schwarz(v, u, k).ratio <= 1.0 + 1e-4);
        CHECK(verify_minkowski(u, v, k).ratio <= 1.0 + 1e-4);
        const auto ts = linear_grid(0.0, 1.0, 21);
        CHECK(verify_h_convexity(u, v, k, ts).pass);
    });
}

TEST_CASE("property: sharp Poincare inequalities hold on random profiles")
{
    gen::for_all(109, 12, [](gen::Gen& g) {
        const int k = g.integer(1, 3);
        const int n = k + g.integer(0, 4);
        const auto u = random_admissible_profile(g.engine(), n, k, g.scale(0.5, 2.0), 1001);
        CHECK(verify_poincare_L1(u, k).ratio <= 1.0 + 1e-4);
        CHECK(verify_poincare_ball_scaled(u, k).ratio <= 1.0 + 1e-4);
        CHECK(verify_poincare_quotient(u, k).ratio <= 1.0 + 1e-4);
    });
}

TEST_CASE("property: radial energy scales as lambda^{-2-n} under dilation and s^{k+1} under amplitude")
{
    gen::for_all(110, 12, [](gen::Gen& g) {
        const int k = g.integer(1, 3);
        const int n = k + g.integer(0, 3);
        const auto u = random_admissible_profile(g.engine(), n, k, 1.0, 1001);
        const double e = radial_energy(u, k);
        const double l = g.scale(0.25, 4);
        const double s = g.scale(0.25, 4);
        CHECK(rel(radial_energy(u.dilate(l), k), std::pow(l, -2.0 - n) * e) <= 1e-10 * std::max(1.0, e));
        CHECK(rel(radial_energy(u.scaled(s), k), std::pow(s, k + 1) * e) <= 1e-10 * std::max(1.0, e));
    });
}

TEST_CASE("property: report JSON round trip")
{
    gen::for_all(111, 30, [](gen::Gen& g) {
        ReportDocument doc;
        doc.suite = "prop";
        doc.seed = static_cast<std::uint64_t>(g.integer(0, 1 << 30));
        SuiteBlock block{"prop", {}};
        const int count = g.integer(0, 5);
        for (int i = 0; i < count; ++i) {
            const double lhs = g.integer(0, 4) == 0 ? 0.0 : g.scale(1e-12, 1e6);
            const double rhs = g.integer(0, 4) == 0 ? 0.0 : g.scale(1e-12, 1e6);
            auto r = bound_report("r" + std::to_string(i), lhs, rhs, {{"n", g.integer(1, 9)}});
            r.witness.emplace_back("note", "a, \"quoted\" value");
            block.reports.push_back(r);
        }
        doc.blocks.push_back(block);
        const auto back = report_from_json(to_json(doc));
        CHECK(to_json(back) == to_json(doc));
        CHECK(to_csv(back) == to_csv(doc));
    });
}
