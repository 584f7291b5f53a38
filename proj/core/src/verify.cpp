#include "hesskit/verify.hpp"

#include "hesskit/constants.hpp"
#include "hesskit/error.hpp"
#include "hesskit/families.hpp"
#include "hesskit/quadrature.hpp"
#include "hesskit/symm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hesskit {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double equality_tolerance = 1e-6;

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

double safe_pow(double x, double e)
{
    return std::pow(std::max(x, 0.0), e);
}

/// True when b = s a for some s >= 0 up to rounding (a = 0 only matches b = 0).
bool proportional(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) return false;
    double aa = 0.0, ab = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa += a[i] * a[i];
        ab += a[i] * b[i];
        bmax = std::max(bmax, std::abs(b[i]));
    }
    if (bmax == 0.0) return true;
    if (aa == 0.0) return false;
    const double s = ab / aa;
    if (s < 0.0) return false;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(b[i] - s * a[i]));
    return worst <= 1e-12 * bmax;
}

/// u is a nonnegative multiple of r^2 - R^2 on its own samples.
bool is_ball_quadratic(const RadialField& u)
{
    const double big_r = u.radius();
    std::vector<double> q(u.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = u.r()[i] * u.r()[i] - big_r * big_r;
    return proportional(q, u.u());
}

void require_admissible(const RadialField& u, int k, const std::string& op, bool zero_boundary = true)
{
    if (!radial_is_k_convex(u, k))
        throw PreconditionError(op + ": '" + u.description() + "' is not " + std::to_string(k) + "-convex");
    double umax = 0.0;
    for (double x : u.u()) umax = std::max(umax, std::abs(x));
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.u()[i] > 1e-8 * umax)
            throw PreconditionError(op + ": '" + u.description() + "' is positive at r=" + fmt(u.r()[i]));
    if (zero_boundary && u.kind() == RadialKind::free)
        throw PreconditionError(op + ": '" + u.description() + "' has no zero boundary condition");
}

void require_ball(const RadialField& u, const std::string& op)
{
    if (u.kind() != RadialKind::dirichlet_ball)
        throw PreconditionError(op + ": needs a Dirichlet profile on a ball, got " + to_string(u.kind()));
}

void require_admissible(const GridField& u, int k, const std::string& op)
{
    if (auto bad = k_convexity_violation(u, k)) {
        const auto x = u.coords(bad->node);
        std::string where;
        for (double c : x) where += (where.empty() ? "" : ",") + fmt(c);
        throw PreconditionError(op + ": '" + u.description() + "' has F_" + std::to_string(bad->order) + " = " +
                                fmt(bad->value) + " at node (" + where + ")");
    }
}

std::vector<std::pair<std::string, double>> base_params(int n, int k)
{
    return {{"n", n}, {"k", k}};
}

void radial_witness(InequalityReport& rep, const RadialField& u, const std::string& label = "u")
{
    rep.witness.emplace_back(label, u.description());
    rep.witness.emplace_back("samples", std::to_string(u.size()));
}

std::string grid_shape(const GridSpec& spec)
{
    std::string s;
    for (int e : spec.shape) s += (s.empty() ? "" : "x") + std::to_string(e);
    return s;
}

void grid_witness(InequalityReport& rep, const GridField& u, const std::string& label = "u")
{
    rep.witness.emplace_back(label, u.description());
    rep.witness.emplace_back("grid", grid_shape(u.spec()));
    rep.witness.emplace_back("spacing", fmt(u.spacing()));
}

/// Empirical constant: the given one, or the raw quotient lhs / base.
void set_empirical(InequalityReport& rep, double base, std::optional<double> constant)
{
    rep.constant_source = ConstantSource::empirical;
    rep.rhs_base = base;
    const double raw = base > 0.0 ? rep.lhs / base : (rep.lhs > 0.0 ? inf : 0.0);
    rep.witness.emplace_back("raw_quotient", fmt(raw));
    rep.constant_used = constant ? *constant : raw;
    if (base == 0.0 || std::isinf(base))
        rep.rhs = base;
    else
        rep.rhs = rep.constant_used * base;
}

void set_constant(InequalityReport& rep, double constant, double base, ConstantSource source)
{
    rep.constant_source = source;
    rep.constant_used = constant;
    rep.rhs_base = base;
    rep.rhs = constant * base;
}

InequalityReport start(std::string name, int n, int k)
{
    InequalityReport rep;
    rep.name = std::move(name);
    rep.parameters = base_params(n, k);
    return rep;
}

} // namespace

const char* to_string(ConstantSource source) noexcept
{
    switch (source) {
    case ConstantSource::paper_sharp: return "paper-sharp";
    case ConstantSource::paper_explicit: return "paper-explicit";
    case ConstantSource::empirical: return "empirical";
    }
    return "?";
}

ConstantSource constant_source_from_string(const std::string& s)
{
    if (s == "paper-sharp") return ConstantSource::paper_sharp;
    if (s == "paper-explicit") return ConstantSource::paper_explicit;
    if (s == "empirical") return ConstantSource::empirical;
    throw PreconditionError("unknown constant source '" + s + "'");
}

void InequalityReport::finish()
{
    if (lhs == 0.0 && rhs == 0.0)
        ratio = 0.0;
    else if (rhs == 0.0)
        ratio = inf;
    else
        ratio = lhs / rhs;
    const bool bounded = !std::isnan(ratio) && ratio <= 1.0 + tolerance;
    pass = bounded && (!equality_case || std::abs(ratio - 1.0) <= tolerance);
}

std::optional<double> InequalityReport::parameter(const std::string& key) const
{
    for (const auto& [k, v] : parameters)
        if (k == key) return v;
    return std::nullopt;
}

std::optional<std::string> InequalityReport::witness_value(const std::string& key) const
{
    for (const auto& [k, v] : witness)
        if (k == key) return v;
    return std::nullopt;
}

InequalityReport bound_report(std::string name, double value, double bound,
                              std::vector<std::pair<std::string, double>> parameters)
{
    InequalityReport rep;
    rep.name = std::move(name);
    rep.parameters = std::move(parameters);
    rep.lhs = value;
    rep.rhs = bound;
    rep.rhs_base = bound;
    rep.tolerance = 0.0;
    rep.finish();
    return rep;
}

double normalize_empirical(std::span<InequalityReport> reports)
{
    double c = 0.0;
    for (const auto& rep : reports)
        if (rep.constant_source == ConstantSource::empirical && !rep.equality_case && rep.rhs_base > 0.0 &&
            std::isfinite(rep.rhs_base))
            c = std::max(c, rep.lhs / rep.rhs_base);
    for (auto& rep : reports) {
        if (rep.constant_source != ConstantSource::empirical || rep.equality_case) continue;
        rep.constant_used = c;
        if (rep.rhs_base > 0.0 && std::isfinite(rep.rhs_base)) rep.rhs = c * rep.rhs_base;
        rep.finish();
    }
    return c;
}

// ---- Schwarz and Minkowski ----

InequalityReport verify_schwarz(const RadialField& u, const RadialField& v, int k)
{
    require_admissible(u, k, "verify_schwarz");
    require_admissible(v, k, "verify_schwarz");
    auto rep = start("schwarz", u.dim(), k);
    rep.lhs = radial_mutual_energy(u, v, k);
    const double eu = radial_energy(u, k), ev = radial_energy(v, k);
    set_constant(rep, 1.0, safe_pow(eu, double(k) / (k + 1)) * safe_pow(ev, 1.0 / (k + 1)),
                 ConstantSource::paper_sharp);
    rep.equality_case = u.same_grid(v) && proportional(u.u(), v.u());
    if (rep.equality_case) rep.tolerance = equality_tolerance;
    radial_witness(rep, u);
    rep.witness.emplace_back("v", v.description());
    rep.finish();
    return rep;
}

InequalityReport verify_schwarz(const GridField& u, const GridField& v, int k)
{
    require_admissible(u, k, "verify_schwarz");
    require_admissible(v, k, "verify_schwarz");
    auto rep = start("schwarz", u.dim(), k);
    rep.lhs = mutual_energy(u, v, k);
    const double eu = hessian_energy(u, k), ev = hessian_energy(v, k);
    set_constant(rep, 1.0, safe_pow(eu, double(k) / (k + 1)) * safe_pow(ev, 1.0 / (k + 1)),
                 ConstantSource::paper_sharp);
    rep.equality_case = u.same_grid(v) && proportional(u.values(), v.values());
    if (rep.equality_case) rep.tolerance = equality_tolerance;
    grid_witness(rep, u);
    rep.witness.emplace_back("v", v.description());
    rep.finish();
    return rep;
}

InequalityReport verify_minkowski(const RadialField& u, const RadialField& v, int k)
{
    require_admissible(u, k, "verify_minkowski");
    require_admissible(v, k, "verify_minkowski");
    const RadialField w = u.combine(1.0, v);
    require_admissible(w, k, "verify_minkowski");
    auto rep = start("minkowski", u.dim(), k);
    const double e = 1.0 / (k + 1);
    rep.lhs = safe_pow(radial_energy(w, k), e);
    set_constant(rep, 1.0, safe_pow(radial_energy(u, k), e) + safe_pow(radial_energy(v, k), e),
                 ConstantSource::paper_sharp);
    rep.equality_case = proportional(u.u(), v.u());
    if (rep.equality_case) rep.tolerance = equality_tolerance;
    radial_witness(rep, u);
    rep.witness.emplace_back("v", v.description());
    rep.finish();
    return rep;
}

InequalityReport verify_minkowski(const GridField& u, const GridField& v, int k)
{
    require_admissible(u, k, "verify_minkowski");
    require_admissible(v, k, "verify_minkowski");
    const GridField w = u.axpy(1.0, v);
    require_admissible(w, k, "verify_minkowski");
    auto rep = start("minkowski", u.dim(), k);
    const double e = 1.0 / (k + 1);
    rep.lhs = safe_pow(hessian_energy(w, k), e);
    set_constant(rep, 1.0, safe_pow(hessian_energy(u, k), e) + safe_pow(hessian_energy(v, k), e),
                 ConstantSource::paper_sharp);
    rep.equality_case = proportional(u.values(), v.values());
    if (rep.equality_case) rep.tolerance = equality_tolerance;
    grid_witness(rep, u);
    rep.witness.emplace_back("v", v.description());
    rep.finish();
    return rep;
}

// ---- h-convexity ----

namespace {

/// Encodes min_t [h h'' - (k/(k+1)) h'^2] >= -tol max(h h'') as
/// lhs = max(h h'') - min slack, rhs = max(h h''), so ratio <= 1 + tol.
InequalityReport h_convexity_report(const HCurve& c, int n, int k)
{
    auto rep = start("h-convexity", n, k);
    rep.tolerance = equality_tolerance;
    const double a = double(k) / (k + 1);
    double top = 0.0, slack = inf, at = 0.0;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        top = std::max(top, c.h[i] * c.d2h[i]);
        const double s = c.h[i] * c.d2h[i] - a * c.dh[i] * c.dh[i];
        if (s < slack) {
            slack = s;
            at = c.t[i];
        }
    }
    if (c.t.empty()) slack = 0.0;
    rep.lhs = top - slack;
    set_constant(rep, 1.0, top, ConstantSource::paper_sharp);
    rep.witness.emplace_back("min_slack", fmt(slack));
    rep.witness.emplace_back("min_slack_t", fmt(at));
    // Midpoint convexity of h^{1/(k+1)} on consecutive equally spaced triples.
    bool convex = true;
    double gmax = 0.0;
    std::vector<double> g(c.h.size());
    for (std::size_t i = 0; i < g.size(); ++i) gmax = std::max(gmax, g[i] = safe_pow(c.h[i], 1.0 / (k + 1)));
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double l = c.t[i] - c.t[i - 1], r = c.t[i + 1] - c.t[i];
        if (std::abs(l - r) > 1e-12 * (l + r)) continue;
        if (g[i] > 0.5 * (g[i - 1] + g[i + 1]) + 1e-9 * gmax) convex = false;
    }
    rep.witness.emplace_back("root_convex", convex ? "yes" : "no");
    rep.finish();
    rep.pass = rep.pass && convex;
    return rep;
}

} // namespace

InequalityReport verify_h_convexity(const RadialField& u, const RadialField& v, int k,
                                    std::span<const double> t_samples)
{
    require_admissible(u, k, "verify_h_convexity");
    require_admissible(v, k, "verify_h_convexity");
    auto rep = h_convexity_report(radial_h_curve(u, v, k, t_samples), u.dim(), k);
    rep.equality_case = u.same_grid(v) && proportional(u.u(), v.u()) &&
                        std::any_of(v.u().begin(), v.u().end(), [](double x) { return x != 0.0; });
    radial_witness(rep, u);
    rep.witness.emplace_back("v", v.description());
    const bool convex = rep.witness_value("root_convex") == "yes";
    rep.finish();
    rep.pass = rep.pass && convex;
    return rep;
}

InequalityReport verify_h_convexity(const GridField& u, const GridField& v, int k,
                                    std::span<const double> t_samples)
{
    require_admissible(u, k, "verify_h_convexity");
    require_admissible(v, k, "verify_h_convexity");
    auto rep = h_convexity_report(h_curve(u, v, k, t_samples), u.dim(), k);
    rep.equality_case = u.same_grid(v) && proportional(u.values(), v.values()) &&
                        std::any_of(v.values().begin(), v.values().end(), [](double x) { return x != 0.0; });
    grid_witness(rep, u);
    rep.witness.emplace_back("v", v.description());
    const bool convex = rep.witness_value("root_convex") == "yes";
    rep.finish();
    rep.pass = rep.pass && convex;
    return rep;
}

// ---- Poincare family ----

namespace {

double neg_integral(const RadialField& u)
{
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::abs(u.u()[i]);
    return radial_integral(u, g);
}

int quadrature_samples(const RadialField& u)
{
    return std::max<int>(static_cast<int>(u.size()), 1001);
}

} // namespace

InequalityReport verify_poincare_L1(const RadialField& u, int k)
{
    require_ball(u, "verify_poincare_L1");
    require_admissible(u, k, "verify_poincare_L1");
    const int n = u.dim();
    const RadialField w = quadratic_solution(n, k, u.radius(), QuadraticMode::unit_rhs(), quadrature_samples(u));
    auto rep = start("poincare-L1", n, k);
    rep.parameters.emplace_back("R", u.radius());
    rep.lhs = neg_integral(u);
    set_constant(rep, std::pow(neg_integral(w), double(k) / (k + 1)), safe_pow(radial_energy(u, k), 1.0 / (k + 1)),
                 ConstantSource::paper_sharp);
    rep.equality_case = is_ball_quadratic(u);
    radial_witness(rep, u);
    rep.witness.emplace_back("minimizer", w.description());
    rep.finish();
    return rep;
}

InequalityReport verify_poincare_L1(const GridField& u, int k)
{
    require_admissible(u, k, "verify_poincare_L1");
    const int n = u.dim();
    const GridField w = quadratic_grid_field(u.spec(), quadratic_coefficient(n, k));
    auto rep = start("poincare-L1", n, k);
    rep.parameters.emplace_back("R", u.spec().radius);
    rep.lhs = -integrate(u);
    set_constant(rep, safe_pow(-integrate(w), double(k) / (k + 1)), safe_pow(hessian_energy(u, k), 1.0 / (k + 1)),
                 ConstantSource::paper_sharp);
    rep.equality_case = proportional(w.values(), u.values());
    grid_witness(rep, u);
    rep.finish();
    return rep;
}

InequalityReport verify_poincare_ball_scaled(const RadialField& u, int k)
{
    require_ball(u, "verify_poincare_ball_scaled");
    require_admissible(u, k, "verify_poincare_ball_scaled");
    const int n = u.dim();
    const double big_r = u.radius();
    const double a = 2.0 * unit_ball_volume(n) / (n + 2);
    const double c = quadratic_coefficient(n, k);
    auto rep = start("poincare-ball-scaled", n, k);
    rep.parameters.emplace_back("R", big_r);
    rep.lhs = std::pow(big_r, -n) * neg_integral(u);
    set_constant(rep, std::pow(c * a, double(k) / (k + 1)),
                 safe_pow(std::pow(big_r, 2 * k - n) * radial_energy(u, k), 1.0 / (k + 1)),
                 ConstantSource::paper_sharp);
    rep.equality_case = is_ball_quadratic(u);
    radial_witness(rep, u);
    rep.finish();
    return rep;
}

InequalityReport verify_poincare_quotient(const RadialField& u, int k)
{
    require_ball(u, "verify_poincare_quotient");
    require_admissible(u, k, "verify_poincare_quotient");
    const int n = u.dim();
    const RadialField w = quadratic_solution(n, k, u.radius(), QuadraticMode::quotient(k - 1), quadrature_samples(u));
    auto rep = start("poincare-quotient", n, k);
    rep.parameters.emplace_back("R", u.radius());
    rep.lhs = safe_pow(radial_energy(u, k - 1), 1.0 / k);
    set_constant(rep, safe_pow(radial_energy(w, k), 1.0 / (k * (k + 1.0))),
                 safe_pow(radial_energy(u, k), 1.0 / (k + 1)), ConstantSource::paper_sharp);
    rep.equality_case = is_ball_quadratic(u);
    radial_witness(rep, u);
    rep.witness.emplace_back("minimizer", w.description());
    rep.finish();
    return rep;
}

InequalityReport verify_poincare_general(const RadialField& u, int k, int l, bool extrapolated)
{
    const int lmin = extrapolated ? 1 : 2;
    if (l < lmin || l >= k || k > u.dim())
        throw PreconditionError("verify_poincare_general: need " + std::to_string(lmin) + " <= l < k <= n, got l=" +
                                std::to_string(l) + ", k=" + std::to_string(k));
    require_ball(u, "verify_poincare_general");
    require_admissible(u, k, "verify_poincare_general");
    const int n = u.dim();
    const RadialField w = quadratic_solution(n, k, u.radius(), QuadraticMode::quotient(l), quadrature_samples(u));
    const double big_k = std::pow(k, k) / (std::pow(l, l) * std::pow(k - l, k - l));
    auto rep = start("poincare-general", n, k);
    rep.parameters.emplace_back("l", l);
    rep.parameters.emplace_back("R", u.radius());
    rep.parameters.emplace_back("extrapolated", extrapolated ? 1.0 : 0.0);
    rep.lhs = safe_pow(radial_energy(u, l), 1.0 / (l + 1));
    set_constant(rep, big_k * safe_pow(radial_energy(w, k), double(k - l) / ((l + 1.0) * (k + 1.0))),
                 safe_pow(radial_energy(u, k), 1.0 / (k + 1)), ConstantSource::paper_explicit);
    radial_witness(rep, u);
    rep.witness.emplace_back("reference", w.description());
    rep.finish();
    return rep;
}

// ---- empirical constants ----

namespace {

InequalityReport gradient_report(double grad_sq, double energy, int n, int k, std::optional<double> constant)
{
    auto rep = start("gradient-poincare", n, k);
    rep.lhs = std::sqrt(std::max(grad_sq, 0.0));
    const double base = safe_pow(energy, 1.0 / (k + 1));
    if (k == 1) {
        // Green's identity: ||Du||^2 = int (-u) Lap u exactly.
        set_constant(rep, 1.0, base, ConstantSource::paper_sharp);
        rep.equality_case = true;
        rep.tolerance = 1e-3;
    } else {
        set_empirical(rep, base, constant);
    }
    return rep;
}

} // namespace

InequalityReport verify_gradient_poincare(const RadialField& u, int k, std::optional<double> constant)
{
    require_ball(u, "verify_gradient_poincare");
    require_admissible(u, k, "verify_gradient_poincare");
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = u.du()[i] * u.du()[i];
    auto rep = gradient_report(radial_integral(u, g), radial_energy(u, k), u.dim(), k, constant);
    rep.parameters.emplace_back("R", u.radius());
    radial_witness(rep, u);
    rep.finish();
    return rep;
}

InequalityReport verify_gradient_poincare(const GridField& u, int k, std::optional<double> constant)
{
    require_admissible(u, k, "verify_gradient_poincare");
    std::vector<double> g(u.size(), 0.0);
    for (int a = 0; a < u.dim(); ++a) {
        const auto d = gradient_fd(u, a);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += d[i] * d[i];
    }
    auto rep = gradient_report(integrate(u.with_values(std::move(g))), hessian_energy(u, k), u.dim(), k, constant);
    rep.parameters.emplace_back("R", u.spec().radius);
    grid_witness(rep, u);
    rep.finish();
    return rep;
}

InequalityReport verify_sobolev(const RadialField& u, int k, double q, std::optional<double> constant)
{
    const auto ex = ExponentSet::make(u.dim(), k);
    if (!ex.subcritical()) throw PreconditionError("verify_sobolev: needs 2k < n");
    const double qs = ex.q_sobolev();
    if (!(q > 0.0) || q > qs * (1.0 + 1e-12))
        throw PreconditionError("verify_sobolev: need 0 < q <= q_sob = " + fmt(qs) + ", got q=" + fmt(q));
    require_admissible(u, k, "verify_sobolev");
    auto rep = start("sobolev", u.dim(), k);
    rep.parameters.emplace_back("q", q);
    rep.parameters.emplace_back("q_sob", qs);
    rep.parameters.emplace_back("R", u.radius());
    rep.lhs = radial_norm(u, q);
    set_empirical(rep, safe_pow(radial_energy(u, k), 1.0 / (k + 1)), constant);
    radial_witness(rep, u);
    rep.finish();
    return rep;
}

InequalityReport verify_dual_sobolev(const RadialDensity& f, int n, int k, const RadialDomain& domain, int samples,
                                     std::optional<double> constant)
{
    const auto ex = ExponentSet::make(n, k);
    const RadialField v = solve_radial(f, n, k, domain, samples);
    RadialDensity restricted = f;
    if (!domain.entire && f.support > domain.radius) {
        restricted.support = domain.radius;
        std::erase_if(restricted.breaks, [&](double b) { return b >= domain.radius; });
    }
    auto rep = start("dual-sobolev", n, k);
    rep.parameters.emplace_back("q_dual", ex.q_dual);
    rep.parameters.emplace_back("R", domain.entire ? inf : domain.radius);
    rep.lhs = safe_pow(radial_energy(v, k), double(k) / (k + 1));
    set_empirical(rep, restricted.lq_norm(n, ex.q_dual), constant);
    rep.witness.emplace_back("f", f.description);
    rep.witness.emplace_back("samples", std::to_string(v.size()));
    rep.finish();
    return rep;
}

// ---- trace ----

namespace {

double trace_lhs(const RadialField& u, const DiscreteMeasure& omega, double q)
{
    const Point origin(static_cast<std::size_t>(u.dim()), 0.0);
    const double support = u.kind() == RadialKind::entire ? inf : u.radius();
    const double s = integrate_radial(
        omega, origin, [&](double r) { return std::pow(std::abs(u.value_at(r)), q); }, support);
    return safe_pow(s, 1.0 / q);
}

} // namespace

InequalityReport verify_trace(const RadialField& u, const DiscreteMeasure& omega, int k, double q,
                              std::optional<double> kappa, std::optional<double> constant)
{
    if (omega.dim() != u.dim()) throw PreconditionError("verify_trace: measure and profile dimensions differ");
    const auto ex = ExponentSet::make(u.dim(), k);
    if (!ex.subcritical()) throw PreconditionError("verify_trace: needs 2k < n");
    if (!(q > k + 1)) throw PreconditionError("verify_trace: needs q > k+1, got q=" + fmt(q));
    require_admissible(u, k, "verify_trace");
    auto rep = start("trace", u.dim(), k);
    rep.parameters.emplace_back("q", q);
    double kap = 0.0;
    if (kappa) {
        kap = *kappa;
    } else {
        const auto res = adams_kappa(omega, q, k);
        kap = res.divergent ? inf : res.value;
        rep.witness.emplace_back("kappa_balls", std::to_string(res.balls));
    }
    rep.parameters.emplace_back("kappa", kap);
    rep.lhs = trace_lhs(u, omega, q);
    const double base = std::isinf(kap) ? inf : safe_pow(kap, 1.0 / q) * safe_pow(radial_energy(u, k), 1.0 / (k + 1));
    set_empirical(rep, base, constant);
    if (std::isinf(kap)) rep.witness.emplace_back("kappa", "divergent");
    radial_witness(rep, u);
    rep.witness.emplace_back("omega", omega.describe());
    rep.finish();
    return rep;
}

TraceProbe trace_necessity_probe(const RadialField& u, int k, double q, std::span<const double> lambdas, double mass)
{
    const int n = u.dim();
    const auto ex = ExponentSet::make(n, k);
    if (!ex.subcritical()) throw PreconditionError("trace_necessity_probe: needs 2k < n");
    if (lambdas.size() < 2) throw PreconditionError("trace_necessity_probe: needs at least two dilations");
    const Point origin(static_cast<std::size_t>(n), 0.0);
    const auto omega = DiscreteMeasure::point_mass(origin, mass);
    TraceProbe probe;
    probe.expected_exponent = (n - 2.0 * k) / (k + 1.0);
    probe.kappa_divergent = adams_kappa(omega, q, k).divergent;
    std::vector<double> lx, ly;
    for (double lambda : lambdas) {
        const RadialField ul = u.dilate(lambda);
        const double quotient = trace_lhs(ul, omega, q) / safe_pow(radial_energy(ul, k), 1.0 / (k + 1));
        probe.lambdas.push_back(lambda);
        probe.quotients.push_back(quotient);
        lx.push_back(std::log(lambda));
        ly.push_back(std::log(quotient));
    }
    probe.fitted_exponent = fit_slope(lx, ly);
    bool increasing = true;
    for (std::size_t i = 1; i < probe.quotients.size(); ++i)
        if (!(probe.quotients[i] > probe.quotients[i - 1])) increasing = false;
    probe.unbounded = increasing && probe.quotients.back() >= 10.0 * probe.quotients.front();
    return probe;
}

InequalityReport trace_probe_report(const TraceProbe& probe, int n, int k, double q, double tolerance)
{
    auto rep = start("trace-necessity", n, k);
    rep.parameters.emplace_back("q", q);
    rep.parameters.emplace_back("lambda_min", probe.lambdas.empty() ? 0.0 : probe.lambdas.front());
    rep.parameters.emplace_back("lambda_max", probe.lambdas.empty() ? 0.0 : probe.lambdas.back());
    rep.lhs = probe.fitted_exponent;
    set_constant(rep, 1.0, probe.expected_exponent, ConstantSource::empirical);
    rep.equality_case = true;
    rep.tolerance = tolerance;
    rep.witness.emplace_back("kappa", probe.kappa_divergent ? "divergent" : "finite");
    rep.witness.emplace_back("growth", probe.quotients.empty() ? "0" : fmt(probe.quotients.back() / probe.quotients.front()));
    rep.witness.emplace_back("unbounded", probe.unbounded ? "yes" : "no");
    rep.finish();
    rep.pass = rep.pass && probe.kappa_divergent && probe.unbounded;
    return rep;
}

// ---- Wolff sandwich ----

SandwichReport verify_wolff_sandwich(const RadialDensity& f, int n, int k, const SandwichOptions& options)
{
    if (!(n > 2 * k)) throw PreconditionError("verify_wolff_sandwich: needs n > 2k");
    if (options.cloud_points < 3) throw PreconditionError("verify_wolff_sandwich: needs at least 3 cloud points");
    SandwichReport out;
    out.n = n;
    out.k = k;
    out.description = f.description;
    out.expected_decay = (n - 2.0 * k) / k;
    if (!(f.mass(n) > 0.0)) {
        out.degenerate = true;
        out.pass = true;
        return out;
    }
    const double a = f.support;
    const RadialField u = solve_radial(f, n, k, RadialDomain::whole_space(), options.samples);
    const DiscreteMeasure mu(n, {}, RadialDensityPart{Point(static_cast<std::size_t>(n), 0.0), f});
    const auto params = PotentialParams::for_hessian(k);
    out.radii = geometric_grid(0.01 * a, 100.0 * a, options.cloud_points);
    std::vector<double> lr, lu, lw;
    for (double r : out.radii) {
        Point x(static_cast<std::size_t>(n), 0.0);
        x[0] = r;
        const double nu = -u.value_at(r);
        const double w = wolff(mu, x, params);
        out.neg_u.push_back(nu);
        out.wolff.push_back(w);
        out.ratios.push_back(nu / w);
        if (r >= options.fit_from * a * (1.0 - 1e-12) && r <= options.fit_to * a * (1.0 + 1e-12)) {
            lr.push_back(std::log(r));
            lu.push_back(std::log(nu));
            lw.push_back(std::log(w));
        }
    }
    out.c1 = *std::min_element(out.ratios.begin(), out.ratios.end());
    out.c2 = *std::max_element(out.ratios.begin(), out.ratios.end());
    if (lr.size() >= 2) {
        out.decay_u = -fit_slope(lr, lu);
        out.decay_wolff = -fit_slope(lr, lw);
    }
    const auto close = [&](double d) { return std::abs(d / out.expected_decay - 1.0) <= 0.01; };
    out.pass = out.c1 > 0.0 && out.c1 <= out.c2 && std::isfinite(out.c2) && close(out.decay_u) &&
               close(out.decay_wolff);
    return out;
}

// ---- local estimate ----

InequalityReport verify_local_integral(const RadialField& u, int k, std::optional<double> constant)
{
    if (u.kind() == RadialKind::entire) throw PreconditionError("verify_local_integral: needs a ball profile");
    require_admissible(u, k, "verify_local_integral", false);
    const int n = u.dim();
    const double big_r = u.radius(), rho = 0.9 * big_r;
    const double inner = unit_sphere_area(n) * binomial(n - 1, k - 1) / k * std::pow(rho, n - k) *
                         std::pow(std::max(u.slope_at(rho), 0.0), k);
    auto rep = start("local-integral", n, k);
    rep.parameters.emplace_back("R", big_r);
    rep.lhs = safe_pow(std::pow(big_r, 2 * k - n) * inner, 1.0 / k);
    set_empirical(rep, std::pow(big_r, -n) * neg_integral(u), constant);
    radial_witness(rep, u);
    rep.finish();
    return rep;
}

} // namespace hesskit
