#include "hesskit/suite.hpp"

#include "hesskit/constants.hpp"
#include "hesskit/error.hpp"
#include "hesskit/families.hpp"
#include "hesskit/quadrature.hpp"
#include "hesskit/symm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#ifndef HESSKIT_VERSION
#define HESSKIT_VERSION "0.0.0"
#endif

namespace hesskit {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

using Params = std::vector<std::pair<std::string, double>>;
using Reports = std::vector<InequalityReport>;
using Task = std::function<Reports()>;
using Pair = std::pair<int, int>;

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// ---- work pool ----

/// Runs every task, at most worker_count() at a time, and returns the
/// results in task order. The first exception in task order is rethrown.
std::vector<Reports> run_tasks(const std::vector<Task>& tasks)
{
    std::vector<Reports> out(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                out[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(worker_count(), tasks.size());
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

Reports flatten(std::vector<Reports> parts)
{
    Reports all;
    for (auto& p : parts)
        for (auto& r : p) all.push_back(std::move(r));
    return all;
}

// ---- report helpers ----

Params pair_params(int n, int k)
{
    return {{"n", n}, {"k", k}};
}

Params with(Params p, const std::string& key, double value)
{
    p.emplace_back(key, value);
    return p;
}

/// Relative drift |a/b - 1| against a bound.
InequalityReport drift_report(std::string name, double a, double b, double bound, Params params)
{
    const double d = b == 0.0 ? (a == 0.0 ? 0.0 : inf) : std::abs(a / b - 1.0);
    auto rep = bound_report(std::move(name), d, bound, std::move(params));
    rep.witness.emplace_back("value", fmt(a));
    rep.witness.emplace_back("reference", fmt(b));
    return rep;
}

/// A yes/no check: lhs 0 over rhs 0 passes, lhs 1 over rhs 0 fails.
InequalityReport flag_report(std::string name, bool ok, Params params)
{
    return bound_report(std::move(name), ok ? 0.0 : 1.0, 0.0, std::move(params));
}

/// Observed convergence order log2(e_h / e_{h/2}) against a required minimum,
/// encoded as lhs = minimum and rhs = observed order.
InequalityReport order_report(std::string name, double coarse, double fine, double minimum, Params params)
{
    const double order = fine > 0.0 ? std::log2(coarse / fine) : inf;
    auto rep = bound_report(std::move(name), minimum, order, std::move(params));
    rep.witness.emplace_back("error_h", fmt(coarse));
    rep.witness.emplace_back("error_h2", fmt(fine));
    return rep;
}

double raw_quotient(const InequalityReport& rep)
{
    return rep.rhs_base > 0.0 ? rep.lhs / rep.rhs_base : 0.0;
}

/// Largest |C_i / C - 1| where C_i is the family maximum without member i.
double leave_one_out_deviation(const std::vector<double>& raw)
{
    const double full = *std::max_element(raw.begin(), raw.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double c = 0.0;
        for (std::size_t j = 0; j < raw.size(); ++j)
            if (j != i) c = std::max(c, raw[j]);
        worst = std::max(worst, std::abs(c / full - 1.0));
    }
    return worst;
}

/// Largest |x_i / mean - 1|.
double spread_about_mean(const std::vector<double>& xs)
{
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double worst = 0.0;
    for (double x : xs) worst = std::max(worst, std::abs(x / mean - 1.0));
    return worst;
}

// ---- context ----

struct Context {
    const SuiteConfig& cfg;
    std::string suite;
    std::vector<Pair> pairs;
    double radius = 1.0;
    int samples = 10001;
    int family_samples = 2001;
    int family = 200;
    std::optional<RadialField> radial_input;
    std::optional<GridField> grid_input;
    std::optional<DiscreteMeasure> measure_input;

    [[nodiscard]] Rng rng(int n, int k, int stream = 0) const
    {
        std::uint32_t h = 2166136261u;
        for (char c : suite) h = (h ^ static_cast<unsigned char>(c)) * 16777619u;
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), h,
                          static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k),
                          static_cast<std::uint32_t>(stream)};
        return Rng(seq);
    }

    [[nodiscard]] int grid_cells(int n) const
    {
        if (cfg.grid) return *cfg.grid;
        return n == 2 ? 64 : n == 3 ? 24 : 12;
    }

    [[nodiscard]] int input_k() const { return cfg.k.value_or(1); }
};

int draw_seed(Rng& rng)
{
    return static_cast<int>(rng() & 0x7fffffffu);
}

/// |x|^2/2 + sum x_i^4/12 + sin(sum x_i)/10: smooth, k-convex for every k
/// when n <= 4, with nonzero third derivatives.
double test_field(std::span<const double> x)
{
    double s = 0.0, q = 0.0, f = 0.0;
    for (double xi : x) {
        s += xi;
        q += xi * xi;
        f += xi * xi * xi * xi;
    }
    return 0.5 * q + f / 12.0 + 0.1 * std::sin(s);
}

double test_field_hessian(std::span<const double> x, int i, int j)
{
    double s = 0.0;
    for (double xi : x) s += xi;
    const double diag = i == j ? 1.0 + x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)] : 0.0;
    return diag - 0.1 * std::sin(s);
}

// ---- symm ----

std::vector<SymMatrix> random_third_tensor(Rng& rng, int n)
{
    std::normal_distribution<double> g;
    std::vector<Eigen::MatrixXd> t(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c) {
                const double v = g(rng);
                const int idx[3] = {a, b, c};
                int perm[3] = {0, 1, 2};
                do {
                    t[static_cast<std::size_t>(idx[perm[2]])](idx[perm[0]], idx[perm[1]]) = v;
                } while (std::next_permutation(perm, perm + 3));
            }
    std::vector<SymMatrix> out;
    for (auto& m : t) out.emplace_back(m);
    return out;
}

double spectral_norm(const SymMatrix& m)
{
    const Spectrum spec = m.spectrum();
    double s = 0.0;
    for (double l : spec.values()) s = std::max(s, std::abs(l));
    return s;
}

SuiteBlock run_symm(const Context& cx)
{
    std::vector<int> ns;
    if (cx.cfg.n) ns = {*cx.cfg.n};
    else ns = {2, 3, 4, 5, 6};
    const int per_n = cx.cfg.family ? *cx.cfg.family : 1000 / static_cast<int>(ns.size());
    std::vector<Task> tasks;
    for (int n : ns) {
        struct Case {
            SymMatrix a, b;
            std::vector<SymMatrix> third;
            std::vector<double> grad;
            Eigen::MatrixXd q;
            double t;
        };
        auto cases = std::make_shared<std::vector<Case>>();
        Rng rng = cx.rng(n, 0);
        std::normal_distribution<double> g;
        std::uniform_real_distribution<double> ut(-1.0, 1.0);
        for (int i = 0; i < per_n; ++i) {
            Case c{random_symmetric(rng, n), random_symmetric(rng, n), random_third_tensor(rng, n), {},
                   random_orthogonal(rng, n), ut(rng)};
            for (int j = 0; j < n; ++j) c.grad.push_back(g(rng));
            cases->push_back(std::move(c));
        }
        std::vector<int> ks;
        if (cx.cfg.k) ks = {*cx.cfg.k};
        else
            for (int k = 1; k <= n; ++k) ks.push_back(k);
        tasks.push_back([cases, n, ks, per_n] {
            double euler = 0.0, trace = 0.0, reilly = 0.0, nulldiv = 0.0, divform = 0.0, orth = 0.0;
            for (const auto& c : *cases) {
                const double na = spectral_norm(c.a);
                double nt = 0.0;
                for (const auto& s : c.third) nt = std::max(nt, spectral_norm(s));
                const double nb = spectral_norm(c.b);
                double ng = 0.0;
                for (double x : c.grad) ng = std::max(ng, std::abs(x));
                const SymMatrix rotated = SymMatrix::symmetrized(c.q * c.a.matrix() * c.q.transpose());
                for (int k : ks) {
                    const double ck = binomial(n, k);
                    const double sa = ck * std::pow(std::max(1.0, na), k);
                    const double sab = ck * std::pow(std::max(1.0, na + std::abs(c.t) * nb + nb), k);
                    const double sat = ck * std::pow(std::max(1.0, na + n * nt), k) * std::max(1.0, ng);
                    euler = std::max(euler, check_euler_identity(c.a, k) / sa);
                    trace = std::max(trace, check_trace_identity(c.a, k) / sa);
                    reilly = std::max(reilly, check_reilly_derivative(c.a, c.b, k, c.t) / sab);
                    nulldiv = std::max(nulldiv, check_null_divergence(c.a, c.third, k) / sat);
                    divform = std::max(divform, check_divergence_form(c.a, c.third, c.grad, k) / sat);
                    orth = std::max(orth, std::abs(sigma_k(rotated, k) - sigma_k(c.a, k)) / sa);
                }
            }
            const Params p{{"n", n}, {"matrices", per_n}};
            Reports out{bound_report("euler-identity", euler, 1e-9, p),
                        bound_report("trace-identity", trace, 1e-9, p),
                        bound_report("divergence-form", divform, 1e-9, p),
                        bound_report("null-divergence", nulldiv, 1e-9, p),
                        bound_report("reilly-derivative", reilly, 1e-9, p),
                        bound_report("orthogonal-invariance", orth, 1e-9, p)};
            return out;
        });
    }
    return {"symm", flatten(run_tasks(tasks))};
}

// ---- grid identities ----

double max_abs_interior(const GridField& u, const std::function<double(std::size_t)>& value)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.in_mask(i) && u.has_stencil(i)) worst = std::max(worst, std::abs(value(i)));
    return worst;
}

double hessian_error(const GridField& u, double region)
{
    const auto hess = hessian_fd(u);
    const int n = u.dim();
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!hess.valid(i)) continue;
        const auto x = u.coords(i);
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) {
            const double d = x[static_cast<std::size_t>(a)] - u.spec().center[static_cast<std::size_t>(a)];
            r2 += d * d;
        }
        if (r2 >= region * region * u.spec().radius * u.spec().radius) continue;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                worst = std::max(worst, std::abs(hess.entry(i, a, b) - test_field_hessian(x, a, b)));
    }
    return worst;
}

SuiteBlock run_grid_identities(const Context& cx)
{
    std::vector<Task> tasks;
    std::vector<int> seen;
    for (auto [n, k] : cx.pairs) {
        const int cells = cx.grid_cells(n);
        const GridSpec coarse = GridSpec::ball(n, cells, cx.radius);
        const GridSpec fine = GridSpec::ball(n, 2 * cells, cx.radius);
        const Params p = with(pair_params(n, k), "cells", cells);
        Rng rng = cx.rng(n, k);
        const int seed_v = draw_seed(rng);
        tasks.push_back([=] {
            Reports out;
            // Quadratic minimizers: exact under central differences.
            const GridField w = quadratic_grid_field(coarse, quadratic_coefficient(n, k));
            const GridField fk = fk_field(w, k);
            out.push_back(bound_report("grid-quadratic-unit", max_abs_interior(w, [&](std::size_t i) { return fk[i] - 1.0; }),
                                       1e-10, p));
            const GridField wq = quadratic_grid_field(coarse, quadratic_coefficient(n, k, QuadraticMode::quotient(k - 1)));
            const GridField fq = fk_field(wq, k), fl = fk_field(wq, k - 1);
            const double scale = std::max(1.0, max_abs_interior(wq, [&](std::size_t i) { return fq[i]; }));
            out.push_back(bound_report("grid-quadratic-quotient",
                                       max_abs_interior(wq, [&](std::size_t i) { return fq[i] - fl[i]; }) / scale, 1e-10,
                                       p));
            // Second-order consistency at h and h/2.
            const GridField tc = GridField::sample(coarse, test_field, "test-field");
            const GridField tf = GridField::sample(fine, test_field, "test-field");
            out.push_back(order_report("hessian-fd-order", hessian_error(tc, 0.7), hessian_error(tf, 0.7), 1.8, p));
            out.push_back(order_report("divergence-form-order", divergence_form_residual(tc, k),
                                       divergence_form_residual(tf, k), 1.8, p));
            out.push_back(order_report("null-divergence-order", null_divergence_residual(tc, k),
                                       null_divergence_residual(tf, k), 1.8, p));
            // Reilly derivative along a random admissible direction.
            Rng local(static_cast<std::uint64_t>(seed_v));
            const GridField v = random_admissible_grid_field(local, coarse, k);
            const auto rr = reilly_residual(tc, v, k, 0.3);
            const GridField fs = fk_field(tc.axpy(0.3, v), k);
            double fscale = 1.0;
            for (double x : fs.values()) fscale = std::max(fscale, std::abs(x));
            auto rep = bound_report("grid-reilly-derivative", rr.residual / fscale, 1e-9, p);
            rep.witness.emplace_back("step", fmt(rr.step));
            out.push_back(std::move(rep));
            return out;
        });
        if (std::find(seen.begin(), seen.end(), n) != seen.end()) continue;
        seen.push_back(n);
        tasks.push_back([=] {
            Reports out;
            const Params pn{{"n", n}, {"cells", cells}};
            const GridField one = GridField::sample(coarse, [](std::span<const double>) { return 1.0; });
            out.push_back(drift_report("grid-ball-volume", integrate(one), unit_ball_volume(n) * std::pow(coarse.radius, n),
                                       0.01, pn));
            Rng local(static_cast<std::uint64_t>(seed_v) + 1);
            const GridField u = random_admissible_grid_field(local, coarse, 1);
            const GridField v = random_admissible_grid_field(local, coarse, 1);
            out.push_back(drift_report("grid-mutual-symmetry", mutual_energy(u, v, 1), mutual_energy(v, u, 1), 0.01, pn));
            return out;
        });
    }
    return {"grid-identities", flatten(run_tasks(tasks))};
}


// ---- radial ----

double max_rel_diff(std::span<const double> a, std::span<const double> b)
{
    double scale = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(b[i]));
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return scale > 0.0 ? worst / scale : worst;
}

double max_abs_minus(std::span<const double> a, double c)
{
    double worst = 0.0;
    for (double x : a) worst = std::max(worst, std::abs(x - c));
    return worst;
}

SuiteBlock run_radial(const Context& cx)
{
    std::vector<Task> tasks;
    for (auto [n, k] : cx.pairs) {
        Rng rng = cx.rng(n, k);
        const RadialDensity f = random_density(rng, cx.radius);
        const double big_r = cx.radius;
        const int samples = cx.samples;
        const Params p = with(pair_params(n, k), "R", big_r);
        tasks.push_back([=] {
            Reports out;
            const RadialField w = quadratic_solution(n, k, big_r, QuadraticMode::unit_rhs(), samples);
            out.push_back(bound_report("radial-quadratic-unit", max_abs_minus(radial_fk(w, k).values, 1.0), 1e-8, p));
            out.push_back(bound_report("radial-quadratic-unit-divergence",
                                       max_abs_minus(radial_fk_divergence(w, k).values, 1.0), 1e-8, p));
            const RadialField wq = quadratic_solution(n, k, big_r, QuadraticMode::quotient(k - 1), samples);
            out.push_back(bound_report("radial-quadratic-quotient",
                                       max_rel_diff(radial_fk(wq, k - 1).values, radial_fk(wq, k).values), 1e-8, p));
            out.push_back(drift_report("coefficient-unit", quadratic_coefficient(n, k),
                                       0.5 * std::pow(binomial(n, k), -1.0 / k), 1e-12, p));
            out.push_back(drift_report("coefficient-quotient",
                                       quadratic_coefficient(n, k, QuadraticMode::quotient(k - 1)),
                                       k / (2.0 * (n - k + 1)), 1e-12, p));
            const RadialField s = solve_radial(RadialDensity::constant(1.0, 2.0 * big_r), n, k,
                                               RadialDomain::ball(big_r), samples);
            std::vector<double> ws(s.size());
            for (std::size_t i = 0; i < ws.size(); ++i) ws[i] = w.value_at(s.r()[i]);
            out.push_back(bound_report("solve-quadratic", max_rel_diff(s.u(), ws), 1e-8, p));
            out.push_back(drift_report("energy-quadratic", radial_energy(w, k),
                                       2.0 * quadratic_coefficient(n, k) * unit_ball_volume(n) *
                                           std::pow(big_r, n + 2) / (n + 2.0),
                                       1e-8, p));
            // A generic profile: both forms of F_k, serialization, homogeneity.
            const RadialField u = solve_radial(f, n, k, RadialDomain::ball(big_r), samples);
            const auto fe = radial_fk(u, k), fd = radial_fk_divergence(u, k);
            const std::size_t skip = 2;
            out.push_back(bound_report("eigen-vs-divergence",
                                       max_rel_diff(std::span(fe.values).subspan(skip), std::span(fd.values).subspan(skip)),
                                       1e-5, p));
            const RadialField back = radial_field_from_json(to_json(u));
            out.push_back(bound_report("json-round-trip",
                                       std::max({max_rel_diff(back.r(), u.r()), max_rel_diff(back.u(), u.u()),
                                                 max_rel_diff(back.du(), u.du())}),
                                       0.0, p));
            const double factor = 8.0;
            const RadialField us = solve_radial(f.scaled(factor), n, k, RadialDomain::ball(big_r), samples);
            out.push_back(bound_report("solve-scaling", max_rel_diff(us.u(), u.scaled(std::pow(factor, 1.0 / k)).u()),
                                       1e-10, p));
            if (2 * k < n) {
                const RadialField e = solve_radial(f, n, k, RadialDomain::whole_space(), samples);
                const double expected = -(n - 2.0 * k) / k;
                out.push_back(drift_report("entire-tail-exponent", e.tail_exponent(), expected, 1e-12, p));
                // Outside the support u is an exact power of r.
                std::vector<double> scaled_u;
                for (std::size_t i = 0; i < e.size(); ++i)
                    if (e.r()[i] >= 2.0 * f.support) scaled_u.push_back(e.u()[i] * std::pow(e.r()[i], -expected));
                const double ref = scaled_u.back();
                out.push_back(bound_report("entire-power-law", max_abs_minus(scaled_u, ref) / std::abs(ref), 1e-8, p));
            }
            return out;
        });
    }
    return {"radial", flatten(run_tasks(tasks))};
}

// ---- poincare ----

std::vector<int> general_orders(const Context& cx, int k)
{
    if (cx.cfg.l) return *cx.cfg.l < k ? std::vector<int>{*cx.cfg.l} : std::vector<int>{};
    std::vector<int> ls;
    for (int l = 2; l < k; ++l) ls.push_back(l);
    return ls;
}

SuiteBlock run_poincare(const Context& cx)
{
    std::vector<Task> tasks;
    std::vector<std::pair<std::size_t, std::size_t>> gradient_groups;   // [first task, end task)
    for (auto [n, k] : cx.pairs) {
        const double big_r = cx.radius;
        const int samples = cx.samples, fs = cx.family_samples;
        const auto ls = general_orders(cx, k);
        const Params p = with(pair_params(n, k), "R", big_r);
        tasks.push_back([=] {
            Reports out;
            const RadialField w = quadratic_solution(n, k, big_r, QuadraticMode::unit_rhs(), samples);
            out.push_back(verify_poincare_L1(w, k));
            out.push_back(verify_poincare_ball_scaled(w, k));
            out.push_back(verify_poincare_quotient(w, k));
            for (int l : ls) out.push_back(verify_poincare_general(w, k, l, l < 2));
            // Amplitude: both sides are homogeneous of degree one.
            for (double s : {0.1, 10.0}) {
                auto rep = verify_poincare_L1(w.scaled(s), k);
                rep.parameters.emplace_back("s", s);
                out.push_back(drift_report("poincare-L1-amplitude", rep.ratio, out[0].ratio, 1e-6, with(p, "s", s)));
                out.push_back(std::move(rep));
            }
            // The normalized ball inequality is dilation invariant.
            const double base = out[1].ratio;
            for (double lambda : {2.0, 0.5}) {
                auto rep = verify_poincare_ball_scaled(w.dilate(lambda), k);
                out.push_back(drift_report("poincare-ball-dilation", rep.ratio, base, 1e-6,
                                           with(p, "R_dilated", big_r / lambda)));
                out.push_back(std::move(rep));
            }
            if (k == 1) {
                out.push_back(verify_gradient_poincare(w, k));
            } else {
                // Dilation exponent of ||Dw|| / E(w)^{1/(k+1)} in the ball radius.
                std::vector<double> lr, lq;
                for (double radius : {0.5, 1.0, 2.0, 4.0}) {
                    const auto rep = verify_gradient_poincare(quadratic_solution(n, k, radius, {}, samples), k);
                    lr.push_back(std::log(radius));
                    lq.push_back(std::log(raw_quotient(rep)));
                }
                const double expected = (n + 2.0) * (k - 1.0) / (2.0 * (k + 1.0));
                auto rep = bound_report("gradient-poincare-dilation-exponent", std::abs(fit_slope(lr, lq) - expected),
                                        1e-6, p);
                rep.witness.emplace_back("fitted", fmt(fit_slope(lr, lq)));
                rep.witness.emplace_back("expected", fmt(expected));
                out.push_back(std::move(rep));
            }
            return out;
        });
        Rng rng = cx.rng(n, k);
        const std::size_t first = tasks.size();
        for (int i = 0; i < cx.family; ++i) {
            const RadialDensity f = random_density(rng, big_r);
            tasks.push_back([=] {
                const RadialField u = solve_radial(f, n, k, RadialDomain::ball(big_r), fs);
                Reports out{verify_poincare_L1(u, k), verify_poincare_ball_scaled(u, k), verify_poincare_quotient(u, k)};
                for (int l : ls) out.push_back(verify_poincare_general(u, k, l, l < 2));
                out.push_back(verify_gradient_poincare(u, k));
                for (auto& r : out) r.parameters.emplace_back("member", i);
                return out;
            });
        }
        gradient_groups.emplace_back(first, tasks.size());
        if (cx.radial_input && cx.radial_input->dim() == n && cx.input_k() == k) {
            const RadialField u = *cx.radial_input;
            tasks.push_back([=] {
                Reports out;
                if (u.kind() == RadialKind::dirichlet_ball) {
                    out.push_back(verify_poincare_L1(u, k));
                    out.push_back(verify_poincare_ball_scaled(u, k));
                    out.push_back(verify_poincare_quotient(u, k));
                    for (int l : ls) out.push_back(verify_poincare_general(u, k, l, l < 2));
                }
                for (auto& r : out) r.witness.emplace_back("input", "field");
                return out;
            });
        }
        if (cx.grid_input && cx.grid_input->dim() == n && cx.input_k() == k) {
            const GridField u = *cx.grid_input;
            tasks.push_back([=] {
                Reports out{verify_poincare_L1(u, k)};
                if (k == 1) out.push_back(verify_gradient_poincare(u, k));
                for (auto& r : out) r.witness.emplace_back("input", "field");
                return out;
            });
        }
    }
    auto parts = run_tasks(tasks);
    for (auto [first, end] : gradient_groups) {
        Reports group;
        for (std::size_t t = first; t < end; ++t)
            for (auto& r : parts[t])
                if (r.name == "gradient-poincare") group.push_back(r);
        normalize_empirical(group);
        std::size_t g = 0;
        for (std::size_t t = first; t < end; ++t)
            for (auto& r : parts[t])
                if (r.name == "gradient-poincare") r = group[g++];
    }
    return {"poincare", flatten(std::move(parts))};
}

// ---- schwarz and minkowski ----

RadialField zero_like(const RadialField& w)
{
    std::vector<double> z(w.size(), 0.0);
    return RadialField(w.dim(), w.r(), z, z, w.kind(), "zero");
}

std::vector<double> t_grid(int count)
{
    return linear_grid(0.0, 1.0, count);
}

bool grid_pairs_enabled(int n, int k)
{
    return n <= 3 && k <= n;
}

SuiteBlock run_schwarz(const Context& cx)
{
    std::vector<Task> tasks;
    for (auto [n, k] : cx.pairs) {
        const double big_r = cx.radius;
        const int samples = cx.samples, fs = cx.family_samples;
        tasks.push_back([=] {
            const RadialField w = quadratic_solution(n, k, big_r, {}, samples);
            const RadialField zero = zero_like(w);
            const auto ts = t_grid(21);
            Reports out{verify_schwarz(w, w, k), verify_schwarz(w, w.scaled(3.0), k), verify_h_convexity(w, w, k, ts),
                        verify_h_convexity(w, zero, k, ts)};
            return out;
        });
        Rng rng = cx.rng(n, k);
        for (int i = 0; i < cx.family; ++i) {
            const RadialDensity f = random_density(rng, big_r), g = random_density(rng, big_r);
            const bool with_h = i < 20;
            tasks.push_back([=] {
                const RadialField u = solve_radial(f, n, k, RadialDomain::ball(big_r), fs);
                const RadialField v = solve_radial(g, n, k, RadialDomain::ball(big_r), fs);
                Reports out{verify_schwarz(u, v, k), verify_schwarz(v, u, k)};
                const double a = out[0].lhs, b = out[1].lhs;
                out[1].witness.emplace_back("orientation_asymmetry", fmt(std::abs(a - b) / std::max(a, b)));
                if (with_h) out.push_back(verify_h_convexity(u, v, k, t_grid(21)));
                for (auto& r : out) r.parameters.emplace_back("member", i);
                return out;
            });
        }
        if (grid_pairs_enabled(n, k)) {
            const GridSpec spec = GridSpec::ball(n, cx.grid_cells(n), big_r);
            for (int i = 0; i < 4; ++i) {
                const int seed_u = draw_seed(rng), seed_v = draw_seed(rng);
                tasks.push_back([=] {
                    Rng ru(static_cast<std::uint64_t>(seed_u)), rv(static_cast<std::uint64_t>(seed_v));
                    const GridField u = random_admissible_grid_field(ru, spec, k);
                    const GridField v = random_admissible_grid_field(rv, spec, k);
                    Reports out{verify_schwarz(u, v, k), verify_schwarz(v, u, k), verify_h_convexity(u, v, k, t_grid(21))};
                    if (i == 0) out.push_back(verify_schwarz(u, u, k));
                    for (auto& r : out) r.parameters.emplace_back("grid_member", i);
                    return out;
                });
            }
        }
        if (cx.radial_input && cx.radial_input->dim() == n && cx.input_k() == k) {
            const RadialField u = *cx.radial_input;
            tasks.push_back([=] {
                Reports out{verify_schwarz(u, u, k), verify_h_convexity(u, u, k, t_grid(21))};
                const RadialField w = quadratic_solution(n, k, u.radius(), {}, samples);
                if (u.kind() != RadialKind::free) {
                    out.push_back(verify_schwarz(u, w, k));
                    out.push_back(verify_schwarz(w, u, k));
                }
                for (auto& r : out) r.witness.emplace_back("input", "field");
                return out;
            });
        }
        if (cx.grid_input && cx.grid_input->dim() == n && cx.input_k() == k) {
            const GridField u = *cx.grid_input;
            tasks.push_back([=] {
                Reports out{verify_schwarz(u, u, k), verify_h_convexity(u, u, k, t_grid(21))};
                for (auto& r : out) r.witness.emplace_back("input", "field");
                return out;
            });
        }
    }
    return {"schwarz", flatten(run_tasks(tasks))};
}

SuiteBlock run_minkowski(const Context& cx)
{
    std::vector<Task> tasks;
    for (auto [n, k] : cx.pairs) {
        const double big_r = cx.radius;
        const int samples = cx.samples, fs = cx.family_samples;
        tasks.push_back([=] {
            const RadialField w = quadratic_solution(n, k, big_r, {}, samples);
            Reports out{verify_minkowski(w, zero_like(w), k), verify_minkowski(w, w, k),
                        verify_minkowski(w, w.scaled(2.5), k)};
            return out;
        });
        Rng rng = cx.rng(n, k);
        for (int i = 0; i < cx.family; ++i) {
            const RadialDensity f = random_density(rng, big_r), g = random_density(rng, big_r);
            tasks.push_back([=] {
                const RadialField u = solve_radial(f, n, k, RadialDomain::ball(big_r), fs);
                const RadialField v = solve_radial(g, n, k, RadialDomain::ball(big_r), fs);
                Reports out{verify_minkowski(u, v, k)};
                out[0].parameters.emplace_back("member", i);
                return out;
            });
        }
        if (grid_pairs_enabled(n, k)) {
            const GridSpec spec = GridSpec::ball(n, cx.grid_cells(n), big_r);
            for (int i = 0; i < 4; ++i) {
                const int seed_u = draw_seed(rng), seed_v = draw_seed(rng);
                tasks.push_back([=] {
                    Rng ru(static_cast<std::uint64_t>(seed_u)), rv(static_cast<std::uint64_t>(seed_v));
                    const GridField u = random_admissible_grid_field(ru, spec, k);
                    const GridField v = random_admissible_grid_field(rv, spec, k);
                    Reports out{verify_minkowski(u, v, k)};
                    if (i == 0) out.push_back(verify_minkowski(u, u, k));
                    for (auto& r : out) r.parameters.emplace_back("grid_member", i);
                    return out;
                });
            }
        }
        if (cx.radial_input && cx.radial_input->dim() == n && cx.input_k() == k) {
            const RadialField u = *cx.radial_input;
            tasks.push_back([=] {
                Reports out{verify_minkowski(u, u, k)};
                out[0].witness.emplace_back("input", "field");
                return out;
            });
        }
        if (cx.grid_input && cx.grid_input->dim() == n && cx.input_k() == k) {
            const GridField u = *cx.grid_input;
            tasks.push_back([=] {
                Reports out{verify_minkowski(u, u, k)};
                out[0].witness.emplace_back("input", "field");
                return out;
            });
        }
    }
    return {"minkowski", flatten(run_tasks(tasks))};
}

// ---- sobolev ----

SuiteBlock run_sobolev(const Context& cx)
{
    std::vector<Task> tasks;
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::vector<Params> group_params;
    for (auto [n, k] : cx.pairs) {
        const double big_r = cx.radius;
        const int samples = cx.samples;
        const double qs = ExponentSet::make(n, k).q_sobolev();
        const double q = cx.cfg.q.value_or(qs);
        const bool critical = std::abs(q / qs - 1.0) <= 1e-12;
        const int members = cx.cfg.family.value_or(10);
        Rng rng = cx.rng(n, k);
        const std::size_t first = tasks.size();
        for (int i = 0; i < members; ++i) {
            const RadialDensity f = random_density(rng, big_r);
            tasks.push_back([=] {
                const RadialField u = solve_radial(f, n, k, RadialDomain::ball(big_r), samples);
                Reports out{verify_sobolev(u, k, q)};
                out[0].parameters.emplace_back("member", i);
                const double base = raw_quotient(out[0]);
                const Params p = with(with(pair_params(n, k), "q", q), "member", i);
                if (critical) {
                    for (double lambda : {0.5, 2.0}) {
                        const auto rep = verify_sobolev(u.dilate(lambda), k, q);
                        out.push_back(drift_report("sobolev-dilation", raw_quotient(rep), base, 1e-6,
                                                   with(p, "lambda", lambda)));
                    }
                }
                for (double s : {0.2, 5.0}) {
                    const auto rep = verify_sobolev(u.scaled(s), k, q);
                    out.push_back(drift_report("sobolev-amplitude", raw_quotient(rep), base, 1e-6, with(p, "s", s)));
                }
                // Hoelder on the ball: ||u||_r <= |B_R|^{1/r - 1/q} ||u||_q for r < q.
                const double r = 0.5 * q;
                const double holder = std::pow(unit_ball_volume(n) * std::pow(big_r, n), 1.0 / r - 1.0 / q);
                auto rep = bound_report("sobolev-holder", raw_quotient(verify_sobolev(u, k, r)), holder * base,
                                        with(p, "q_lower", r));
                out.push_back(std::move(rep));
                return out;
            });
        }
        groups.emplace_back(first, tasks.size());
        group_params.push_back(with(pair_params(n, k), "q", q));
        if (cx.radial_input && cx.radial_input->dim() == n && cx.input_k() == k) {
            const RadialField u = *cx.radial_input;
            tasks.push_back([=] {
                Reports out{verify_sobolev(u, k, q)};
                out[0].witness.emplace_back("input", "field");
                return out;
            });
        }
    }
    auto parts = run_tasks(tasks);
    Reports extra;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto [first, end] = groups[g];
        Reports family;
        for (std::size_t t = first; t < end; ++t) family.push_back(parts[t][0]);
        std::vector<double> raw;
        for (const auto& r : family) raw.push_back(raw_quotient(r));
        normalize_empirical(family);
        for (std::size_t t = first; t < end; ++t) parts[t][0] = family[t - first];
        auto rep = bound_report("sobolev-constant-stability", leave_one_out_deviation(raw), 0.10, group_params[g]);
        rep.witness.emplace_back("members", std::to_string(raw.size()));
        rep.witness.emplace_back("raw_min", fmt(*std::min_element(raw.begin(), raw.end())));
        rep.witness.emplace_back("raw_max", fmt(*std::max_element(raw.begin(), raw.end())));
        parts[end - 1].push_back(std::move(rep));
    }
    return {"sobolev", flatten(std::move(parts))};
}

// ---- dual sobolev ----

SuiteBlock run_dual_sobolev(const Context& cx)
{
    std::vector<Task> tasks;
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (auto [n, k] : cx.pairs) {
        const double big_r = cx.radius;
        const int samples = cx.samples;
        const auto domain = RadialDomain::ball(big_r);
        tasks.push_back([=] {
            Reports out{verify_dual_sobolev(RadialDensity::constant(0.0, big_r), n, k, domain, samples)};
            out[0].witness.emplace_back("case", "zero density");
            return out;
        });
        Rng rng = cx.rng(n, k);
        const std::size_t first = tasks.size();
        const int members = cx.cfg.family.value_or(10);
        for (int i = 0; i < members; ++i) {
            const RadialDensity f = random_density(rng, big_r);
            tasks.push_back([=] {
                Reports out{verify_dual_sobolev(f, n, k, domain, samples)};
                out[0].parameters.emplace_back("member", i);
                const double base = raw_quotient(out[0]);
                for (double s : {0.25, 4.0}) {
                    const auto rep = verify_dual_sobolev(f.scaled(s), n, k, domain, samples);
                    out.push_back(drift_report("dual-sobolev-amplitude", raw_quotient(rep), base, 1e-6,
                                               with(with(pair_params(n, k), "member", i), "s", s)));
                }
                return out;
            });
        }
        groups.emplace_back(first, tasks.size());
    }
    auto parts = run_tasks(tasks);
    for (auto [first, end] : groups) {
        Reports family;
        for (std::size_t t = first; t < end; ++t) family.push_back(parts[t][0]);
        normalize_empirical(family);
        for (std::size_t t = first; t < end; ++t) parts[t][0] = family[t - first];
    }
    return {"dual-sobolev", flatten(std::move(parts))};
}

// ---- trace ----

/// Lebesgue measure on a set holding the unit-scale profiles: a ball when
/// n >= 5, a box otherwise.
DiscreteMeasure lebesgue_patch(int n, double radius)
{
    const Point o(static_cast<std::size_t>(n), 0.0);
    if (n >= 5) return DiscreteMeasure(n, {}, RadialDensityPart{o, RadialDensity::constant(1.0, radius)});
    return DiscreteMeasure(n, {}, BoxDensityPart{Point(static_cast<std::size_t>(n), -radius),
                                                 Point(static_cast<std::size_t>(n), radius), 1.0});
}

/// min(|x|, r_j)^{-2k} on B_radius for r_j = radius 2^{-j}, j = 1..levels.
std::vector<DiscreteMeasure> inverse_power_refinements(int n, int k, double radius, int levels)
{
    std::vector<DiscreteMeasure> out;
    const Point o(static_cast<std::size_t>(n), 0.0);
    for (int j = 1; j <= levels; ++j) {
        const double cut = radius * std::pow(2.0, -j);
        RadialDensity f{[cut, k](double r) { return std::pow(std::max(r, cut), -2.0 * k); }, radius, {cut},
                        "inverse-power(cut=" + fmt(cut) + ")"};
        out.emplace_back(n, std::vector<Atom>{}, RadialDensityPart{o, std::move(f)});
    }
    return out;
}

SuiteBlock run_trace(const Context& cx)
{
    std::vector<Task> tasks;
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (auto [n, k] : cx.pairs) {
        const double big_r = cx.radius;
        const int samples = cx.samples, fs = cx.family_samples;
        const double qs = ExponentSet::make(n, k).q_sobolev();
        const double q = cx.cfg.q.value_or(qs);
        const Params p = with(pair_params(n, k), "q", q);
        const Point o(static_cast<std::size_t>(n), 0.0);
        Rng rng = cx.rng(n, k);
        // Lebesgue: kappa at the critical exponent and the reduction to Sobolev.
        std::vector<RadialDensity> reduction;
        for (int i = 0; i < 5; ++i) reduction.push_back(random_density(rng, big_r));
        tasks.push_back([=] {
            Reports out;
            const DiscreteMeasure leb = lebesgue_patch(n, big_r);
            const auto kap = adams_kappa(leb, qs, k);
            const Params pk = with(pair_params(n, k), "q", qs);
            auto upper = bound_report("kappa-lebesgue-upper", kap.value, 1.0, pk);
            upper.tolerance = 1e-9;
            upper.finish();
            upper.witness.emplace_back("omega", leb.describe());
            out.push_back(std::move(upper));
            out.push_back(bound_report("kappa-lebesgue-lower", 0.9, kap.value, pk));
            for (std::size_t i = 0; i < reduction.size(); ++i) {
                const RadialField u = solve_radial(reduction[i], n, k, RadialDomain::ball(big_r), samples);
                const auto tr = verify_trace(u, leb, k, qs, kap.value);
                const auto so = verify_sobolev(u, k, qs);
                out.push_back(drift_report("trace-reduces-to-sobolev",
                                           raw_quotient(tr) * std::pow(kap.value, 1.0 / qs), raw_quotient(so), 1e-5,
                                           with(pk, "member", static_cast<double>(i))));
            }
            return out;
        });
        // Point mass: kappa diverges and the dilation family is unbounded.
        tasks.push_back([=] {
            const RadialField u = solve_radial(RadialDensity::polynomial_bump(2, big_r), n, k,
                                               RadialDomain::whole_space(), samples);
            const double e = (n - 2.0 * k) / (k + 1.0);
            const auto lambdas = geometric_grid(1.0, std::pow(10.0, 2.0 / e), 9);
            Reports out{trace_probe_report(trace_necessity_probe(u, k, q, lambdas), n, k, q)};
            return out;
        });
        // Hyperplane disk at the exponent where its kappa is scale free.
        const double q_disk = (n - 1.0) * (k + 1.0) / (n - 2.0 * k);
        std::vector<RadialDensity> disk_members;
        for (int i = 0; i < 3; ++i) disk_members.push_back(random_density(rng, big_r));
        tasks.push_back([=] {
            const DiscreteMeasure disk(n, {}, HyperplaneDiskPart{0, 0.0, o, 4.0 * big_r, 1.0});
            const auto kap = adams_kappa(disk, q_disk, k);
            Reports family;
            std::vector<double> raw;
            for (std::size_t i = 0; i < disk_members.size(); ++i) {
                const RadialField u = solve_radial(disk_members[i], n, k, RadialDomain::ball(big_r), samples);
                for (double lambda : {1.0, 1.5, 2.0, 4.0}) {
                    auto rep = verify_trace(u.dilate(lambda), disk, k, q_disk, kap.divergent ? inf : kap.value);
                    rep.parameters.emplace_back("member", static_cast<double>(i));
                    rep.parameters.emplace_back("lambda", lambda);
                    raw.push_back(raw_quotient(rep));
                    family.push_back(std::move(rep));
                }
            }
            normalize_empirical(family);
            auto spread = bound_report("trace-hyperplane-spread", spread_about_mean(raw), 0.15,
                                       with(pair_params(n, k), "q", q_disk));
            spread.witness.emplace_back("kappa", kap.divergent ? "divergent" : fmt(kap.value));
            family.push_back(std::move(spread));
            family.push_back(flag_report("trace-hyperplane-kappa-finite", !kap.divergent && std::isfinite(kap.value),
                                         with(pair_params(n, k), "q", q_disk)));
            return family;
        });
        // Adding an atom never decreases the left side or kappa.
        const RadialDensity mono = random_density(rng, big_r);
        tasks.push_back([=] {
            const RadialField u = solve_radial(mono, n, k, RadialDomain::ball(big_r), samples);
            const DiscreteMeasure leb = lebesgue_patch(n, big_r);
            Point x = o;
            x[0] = 0.25 * big_r;
            const DiscreteMeasure more = leb.with_atom({x, 0.05});
            const auto a = verify_trace(u, leb, k, q), b = verify_trace(u, more, k, q);
            const double ka = *a.parameter("kappa"), kb = *b.parameter("kappa");
            Reports out{bound_report("trace-monotone-lhs", a.lhs, b.lhs, p),
                        bound_report("trace-monotone-kappa", ka, kb, p)};
            return out;
        });
        // Fefferman-Phong at the borderline eps = n/(2k) - 1.
        const double eps = n / (2.0 * k) - 1.0;
        tasks.push_back([=] {
            const Params pe = with(pair_params(n, k), "eps", eps);
            const DiscreteMeasure one(n, {}, RadialDensityPart{o, RadialDensity::constant(1.0, big_r)});
            const auto c = fefferman_phong_check(one, eps, k);
            auto finite = flag_report("fefferman-phong-constant", !c.divergent && std::isfinite(c.value), pe);
            finite.witness.emplace_back("sup", fmt(c.value));
            const auto refined = fefferman_phong_refine(inverse_power_refinements(n, k, big_r, 6), eps, k);
            auto divergent = flag_report("fefferman-phong-inverse-power", refined.divergent, pe);
            std::string sups;
            for (double s : refined.sups) sups += (sups.empty() ? "" : ";") + fmt(s);
            divergent.witness.emplace_back("sups", sups);
            Reports out{std::move(finite), std::move(divergent)};
            return out;
        });
        // Random family against Lebesgue, normalized.
        const std::size_t first = tasks.size();
        const int members = cx.cfg.family.value_or(10);
        for (int i = 0; i < members; ++i) {
            const RadialDensity f = random_density(rng, big_r);
            tasks.push_back([=] {
                const RadialField u = solve_radial(f, n, k, RadialDomain::ball(big_r), fs);
                Reports out{verify_trace(u, lebesgue_patch(n, big_r), k, q)};
                out[0].parameters.emplace_back("member", i);
                return out;
            });
        }
        groups.emplace_back(first, tasks.size());
        if (cx.measure_input && cx.measure_input->dim() == n) {
            const DiscreteMeasure omega = *cx.measure_input;
            const RadialField u = cx.radial_input && cx.radial_input->dim() == n
                                      ? *cx.radial_input
                                      : quadratic_solution(n, k, big_r, {}, samples);
            tasks.push_back([=] {
                Reports out{verify_trace(u, omega, k, q)};
                out[0].witness.emplace_back("input", "measure");
                return out;
            });
        }
    }
    auto parts = run_tasks(tasks);
    for (auto [first, end] : groups) {
        Reports family;
        for (std::size_t t = first; t < end; ++t) family.push_back(parts[t][0]);
        normalize_empirical(family);
        for (std::size_t t = first; t < end; ++t) parts[t][0] = family[t - first];
    }
    return {"trace", flatten(std::move(parts))};
}

// ---- wolff sandwich ----

InequalityReport sandwich_report(const SandwichReport& s, double member)
{
    // Far-field decay of both sides against (n - 2k)/k, within 1%.
    const double err = s.degenerate ? 0.0
                                     : std::max(std::abs(s.decay_u / s.expected_decay - 1.0),
                                                std::abs(s.decay_wolff / s.expected_decay - 1.0));
    auto rep = bound_report("wolff-sandwich", err, 0.01, {{"n", s.n}, {"k", s.k}, {"member", member}});
    rep.constant_source = ConstantSource::empirical;
    rep.witness.emplace_back("f", s.description);
    rep.witness.emplace_back("c1", fmt(s.c1));
    rep.witness.emplace_back("c2", fmt(s.c2));
    rep.witness.emplace_back("decay_u", fmt(s.decay_u));
    rep.witness.emplace_back("decay_wolff", fmt(s.decay_wolff));
    rep.witness.emplace_back("expected_decay", fmt(s.expected_decay));
    rep.witness.emplace_back("cloud_points", std::to_string(s.radii.size()));
    rep.pass = rep.pass && s.pass;
    return rep;
}

SuiteBlock run_wolff_sandwich(const Context& cx)
{
    std::vector<Task> tasks;
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (auto [n, k] : cx.pairs) {
        const int samples = cx.samples;
        const double a = cx.radius;
        tasks.push_back([=] {
            // Point mass at the origin: W = (k/(n-2k)) r^{-(n-2k)/k}.
            const DiscreteMeasure delta = DiscreteMeasure::point_mass(Point(static_cast<std::size_t>(n), 0.0));
            const auto params = PotentialParams::for_hessian(k);
            double worst = 0.0;
            for (double r : geometric_grid(0.01 * a, 100.0 * a, 50)) {
                Point x(static_cast<std::size_t>(n), 0.0);
                x[0] = r;
                const double exact = k / (n - 2.0 * k) * std::pow(r, -(n - 2.0 * k) / k);
                worst = std::max(worst, std::abs(wolff(delta, x, params) / exact - 1.0));
            }
            Reports out{bound_report("wolff-point-mass", worst, 1e-6, pair_params(n, k))};
            return out;
        });
        const std::size_t first = tasks.size();
        for (int m = 0; m < 5; ++m) {
            tasks.push_back([=] {
                SandwichOptions opt;
                opt.samples = samples;
                const RadialDensity f = RadialDensity::polynomial_bump(m, a);
                const auto s = verify_wolff_sandwich(f, n, k, opt);
                Reports out{sandwich_report(s, m)};
                // Homogeneity: scaling f leaves C1 and C2 unchanged.
                const auto t = verify_wolff_sandwich(f.scaled(3.0), n, k, opt);
                const Params p{{"n", n}, {"k", k}, {"member", m}, {"s", 3.0}};
                out.push_back(drift_report("wolff-sandwich-scaling-c1", t.c1, s.c1, 1e-6, p));
                out.push_back(drift_report("wolff-sandwich-scaling-c2", t.c2, s.c2, 1e-6, p));
                return out;
            });
        }
        groups.emplace_back(first, tasks.size());
    }
    auto parts = run_tasks(tasks);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto [first, end] = groups[g];
        std::vector<double> c1, c2;
        for (std::size_t t = first; t < end; ++t) {
            c1.push_back(std::stod(*parts[t][0].witness_value("c1")));
            c2.push_back(std::stod(*parts[t][0].witness_value("c2")));
        }
        const Params p = pair_params(cx.pairs[g].first, cx.pairs[g].second);
        auto s1 = bound_report("wolff-sandwich-spread-c1", spread_about_mean(c1), 0.25, p);
        auto s2 = bound_report("wolff-sandwich-spread-c2", spread_about_mean(c2), 0.25, p);
        parts[end - 1].push_back(std::move(s1));
        parts[end - 1].push_back(std::move(s2));
    }
    return {"wolff-sandwich", flatten(std::move(parts))};
}

// ---- local estimate ----

SuiteBlock run_local_estimate(const Context& cx)
{
    std::vector<Task> tasks;
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (auto [n, k] : cx.pairs) {
        const double big_r = cx.radius;
        const int samples = cx.samples, fs = cx.family_samples;
        const Params p = with(pair_params(n, k), "R", big_r);
        tasks.push_back([=] {
            Reports out;
            const RadialField w = quadratic_solution(n, k, big_r, {}, samples);
            const double depth = std::abs(w.u().front());
            double previous = inf;
            for (double b : {0.01, 0.1, 1.0, 10.0}) {
                auto rep = verify_local_integral(w.shifted(b * depth), k);
                rep.parameters.emplace_back("b", b * depth);
                const double raw = raw_quotient(rep);
                if (std::isfinite(previous))
                    out.push_back(bound_report("local-integral-decreasing-in-b", raw, previous, with(p, "b", b * depth)));
                previous = raw;
                out.push_back(std::move(rep));
            }
            const RadialField shifted = w.shifted(0.1 * depth);
            const double base = raw_quotient(verify_local_integral(shifted, k));
            for (double lambda : {0.5, 2.0}) {
                const auto rep = verify_local_integral(shifted.dilate(lambda), k);
                out.push_back(drift_report("local-integral-dilation", raw_quotient(rep), base, 1e-6,
                                           with(p, "lambda", lambda)));
            }
            std::vector<double> minus_one(w.size(), -1.0), zero(w.size(), 0.0);
            const RadialField constant(n, w.r(), minus_one, zero, RadialKind::free, "constant(-1)");
            auto rep = verify_local_integral(constant, k);
            rep.witness.emplace_back("case", "constant");
            out.push_back(std::move(rep));
            return out;
        });
        Rng rng = cx.rng(n, k);
        std::uniform_real_distribution<double> ub(0.0, 1.0);
        const std::size_t first = tasks.size();
        const int members = cx.cfg.family.value_or(20);
        for (int i = 0; i < members; ++i) {
            const RadialDensity f = random_density(rng, big_r);
            const double b = ub(rng);
            tasks.push_back([=] {
                const RadialField u = solve_radial(f, n, k, RadialDomain::ball(big_r), fs);
                Reports out{verify_local_integral(u.shifted(b * std::abs(u.u().front())), k)};
                out[0].parameters.emplace_back("member", i);
                return out;
            });
        }
        groups.emplace_back(first, tasks.size());
        if (cx.radial_input && cx.radial_input->dim() == n && cx.input_k() == k &&
            cx.radial_input->kind() != RadialKind::entire) {
            const RadialField u = *cx.radial_input;
            tasks.push_back([=] {
                Reports out{verify_local_integral(u, k)};
                out[0].witness.emplace_back("input", "field");
                return out;
            });
        }
    }
    auto parts = run_tasks(tasks);
    for (auto [first, end] : groups) {
        Reports family;
        for (std::size_t t = first; t < end; ++t) family.push_back(parts[t][0]);
        normalize_empirical(family);
        for (std::size_t t = first; t < end; ++t) parts[t][0] = family[t - first];
    }
    return {"local-estimate", flatten(std::move(parts))};
}

// ---- dispatch ----

std::vector<Pair> default_pairs(const std::string& suite)
{
    if (suite == "symm") return {};
    if (suite == "grid-identities") return {{2, 1}, {2, 2}, {3, 1}, {3, 2}, {3, 3}};
    if (suite == "sobolev" || suite == "dual-sobolev" || suite == "trace") return {{3, 1}, {5, 2}};
    if (suite == "wolff-sandwich") return {{5, 1}, {5, 2}, {7, 2}, {9, 3}};
    return {{3, 1}, {5, 2}, {7, 3}};
}

std::vector<Pair> select_pairs(const std::string& suite, const SuiteConfig& cfg)
{
    if (cfg.n && cfg.k) return {{*cfg.n, *cfg.k}};
    std::vector<Pair> out;
    for (auto pr : default_pairs(suite))
        if ((!cfg.n || pr.first == *cfg.n) && (!cfg.k || pr.second == *cfg.k)) out.push_back(pr);
    if (!out.empty() || suite == "symm") return out;
    if (cfg.n) return {{*cfg.n, 1}};
    return {{2 * *cfg.k + 1, *cfg.k}};
}

bool needs_subcritical(const std::string& suite)
{
    return suite == "sobolev" || suite == "dual-sobolev" || suite == "trace" || suite == "wolff-sandwich";
}

using Runner = SuiteBlock (*)(const Context&);

Runner runner_for(const std::string& suite)
{
    static const std::map<std::string, Runner> table{
        {"symm", run_symm},           {"grid-identities", run_grid_identities},
        {"radial", run_radial},       {"poincare", run_poincare},
        {"schwarz", run_schwarz},     {"minkowski", run_minkowski},
        {"sobolev", run_sobolev},     {"dual-sobolev", run_dual_sobolev},
        {"trace", run_trace},         {"wolff-sandwich", run_wolff_sandwich},
        {"local-estimate", run_local_estimate}};
    return table.at(suite);
}

void apply_tolerance(Reports& reports, double tol)
{
    for (auto& r : reports) {
        if (r.tolerance != default_tolerance) continue;
        r.tolerance = tol;
        r.finish();
    }
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"symm",   "grid-identities", "radial",         "poincare",
                                                "schwarz", "minkowski",      "sobolev",        "dual-sobolev",
                                                "trace",   "wolff-sandwich", "local-estimate", "all"};
    return names;
}

void SuiteConfig::validate() const
{
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end())
        throw UsageError("unknown suite '" + suite + "'");
    if (n && *n < 1) throw UsageError("dimension n must be >= 1");
    if (k && *k < 1) throw UsageError("order k must be >= 1");
    if (n && k && *k > *n) throw UsageError("order k must satisfy 1 <= k <= n, got k=" + std::to_string(*k) +
                                            ", n=" + std::to_string(*n));
    if (l && (*l < 1 || (k && *l >= *k)))
        throw UsageError("order l must satisfy 1 <= l < k, got l=" + std::to_string(*l));
    if (q && !(*q > 0.0 && std::isfinite(*q))) throw UsageError("exponent q must be positive and finite");
    if (radius && !(*radius > 0.0 && std::isfinite(*radius))) throw UsageError("radius must be positive");
    if (samples && (*samples < 101 || *samples % 2 == 0))
        throw UsageError("samples must be odd and >= 101, got " + std::to_string(*samples));
    if (grid && *grid < 8) throw UsageError("grid must have at least 8 cells across the ball");
    if (family && *family < 2) throw UsageError("family must have at least 2 members");
    if (tol && !(*tol > 0.0 && *tol < 1.0)) throw UsageError("tolerance must lie in (0, 1)");
}

std::optional<std::string> suite_precondition(const std::string& suite, const SuiteConfig& cfg)
{
    if (suite == "symm") {
        if (cfg.n && *cfg.n > 10) return "symm runs for n <= 10";
        return std::nullopt;
    }
    for (auto [n, k] : select_pairs(suite, cfg)) {
        const std::string at = " (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")";
        if (k > n) return "needs 1 <= k <= n" + at;
        if (suite == "grid-identities" && (n < 2 || n > 4)) return "grid fields need 2 <= n <= 4" + at;
        if (needs_subcritical(suite) && !(2 * k < n)) return "needs 2k < n" + at;
        const double qs = 2 * k < n ? n * (k + 1.0) / (n - 2.0 * k) : inf;
        if (suite == "sobolev" && cfg.q && *cfg.q > qs * (1.0 + 1e-12))
            return "needs q <= n(k+1)/(n-2k) = " + fmt(qs) + at;
        if (suite == "trace" && cfg.q && !(*cfg.q > k + 1.0)) return "needs q > k+1" + at;
        if (suite == "poincare" && cfg.l && *cfg.l >= k) return "needs 1 <= l < k" + at;
    }
    return std::nullopt;
}

std::string toolkit_version()
{
    return HESSKIT_VERSION;
}

unsigned worker_count()
{
    if (const char* env = std::getenv("HESSKIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ReportDocument run_suite(const SuiteConfig& cfg)
{
    cfg.validate();
    ReportDocument doc;
    doc.suite = cfg.suite;
    doc.seed = cfg.seed;
    doc.version = toolkit_version();
    if (cfg.n) doc.parameters.emplace_back("n", *cfg.n);
    if (cfg.k) doc.parameters.emplace_back("k", *cfg.k);
    if (cfg.l) doc.parameters.emplace_back("l", *cfg.l);
    if (cfg.q) doc.parameters.emplace_back("q", *cfg.q);
    const double radius = cfg.radius.value_or(1.0);
    const double tol = cfg.tol.value_or(default_tolerance);
    doc.parameters.emplace_back("R", radius);
    doc.parameters.emplace_back("tol", tol);

    std::optional<RadialField> radial_input;
    std::optional<GridField> grid_input;
    std::optional<DiscreteMeasure> measure_input;
    if (cfg.field) {
        const std::string text = read_text(*cfg.field);
        const auto kind = detect_input_kind(text);
        if (kind == InputKind::radial_field) radial_input = radial_field_from_json(text);
        else if (kind == InputKind::grid_field) grid_input = grid_field_from_json(text, cfg.field->parent_path());
        else throw UsageError("--field " + cfg.field->string() + " holds a measure, not a field");
    }
    if (cfg.measure) measure_input = read_measure(*cfg.measure);

    std::vector<std::string> suites;
    if (cfg.suite == "all") {
        for (const auto& s : suite_names())
            if (s != "all") suites.push_back(s);
    } else {
        suites.push_back(cfg.suite);
    }

    const int samples = cfg.samples.value_or(10001);
    const int family_samples = std::min(samples, 2001);
    const int family = cfg.family.value_or(200);
    doc.resolutions = {{"samples", samples},
                       {"family_samples", family_samples},
                       {"family", family},
                       {"grid_cells_n2", cfg.grid.value_or(64)},
                       {"grid_cells_n3", cfg.grid.value_or(24)},
                       {"grid_cells_n4", cfg.grid.value_or(12)},
                       {"wolff_points_per_decade", PotentialParams{}.t_points_per_decade},
                       {"sandwich_cloud_points", SandwichOptions{}.cloud_points}};

    for (const auto& s : suites) {
        if (auto reason = suite_precondition(s, cfg)) {
            if (cfg.suite != "all") throw UsageError("suite " + s + ": " + *reason);
            doc.skipped.push_back({s, *reason});
            continue;
        }
        Context cx{cfg, s, select_pairs(s, cfg), radius, samples, family_samples, family,
                   radial_input, grid_input, measure_input};
        SuiteBlock block = runner_for(s)(cx);
        apply_tolerance(block.reports, tol);
        doc.blocks.push_back(std::move(block));
    }
    return doc;
}

} // namespace hesskit
