#include "hesskit/radial.hpp"

#include "hesskit/constants.hpp"
#include "hesskit/error.hpp"
#include "hesskit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace hesskit {

const char* to_string(RadialKind kind) noexcept
{
    switch (kind) {
    case RadialKind::dirichlet_ball: return "dirichlet_ball";
    case RadialKind::entire: return "entire";
    case RadialKind::free: return "free";
    }
    return "free";
}

RadialKind radial_kind_from_string(const std::string& s)
{
    if (s == "dirichlet_ball") return RadialKind::dirichlet_ball;
    if (s == "entire") return RadialKind::entire;
    if (s == "free") return RadialKind::free;
    throw PreconditionError("unknown radial kind '" + s + "'");
}

RadialField::RadialField(int n, std::vector<double> r, std::vector<double> u, std::vector<double> du,
                         RadialKind kind, std::string description, double tail_exponent)
    : n_(n), r_(std::move(r)), u_(std::move(u)), du_(std::move(du)), kind_(kind),
      description_(std::move(description)), tail_exponent_(tail_exponent)
{
    if (n_ < 1) throw PreconditionError("RadialField: dimension must be >= 1");
    if (r_.size() < 5 || u_.size() != r_.size() || du_.size() != r_.size())
        throw PreconditionError("RadialField: need at least 5 samples of r, u and u' of equal length");
    if (r_[0] != 0.0) throw PreconditionError("RadialField: first sample must be r = 0");
    double umax = 0.0, dumax = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) {
        if (!std::isfinite(r_[i]) || !std::isfinite(u_[i]) || !std::isfinite(du_[i]))
            throw PreconditionError("RadialField: non-finite sample at index " + std::to_string(i));
        if (i > 0 && !(r_[i] > r_[i - 1]))
            throw PreconditionError("RadialField: radii must increase strictly (index " + std::to_string(i) + ")");
        umax = std::max(umax, std::abs(u_[i]));
        dumax = std::max(dumax, std::abs(du_[i]));
    }
    if (std::abs(du_[0]) > 1e-12 * std::max(dumax, 1e-300))
        throw PreconditionError("RadialField: u'(0) must vanish");
    for (std::size_t i = 0; i < du_.size(); ++i)
        if (du_[i] < -1e-9 * dumax)
            throw PreconditionError("RadialField: u' must be nonnegative (index " + std::to_string(i) + ")");
    if (kind_ == RadialKind::dirichlet_ball && std::abs(u_.back()) > 1e-9 * std::max(umax, 1e-300))
        throw PreconditionError("RadialField: ball profile must vanish at r = R");
    if (kind_ == RadialKind::entire && !(tail_exponent_ < 0.0))
        throw PreconditionError("RadialField: entire profile needs a negative tail exponent");
}

namespace {

std::size_t bracket(const std::vector<double>& r, double x)
{
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t i = static_cast<std::size_t>(it - r.begin());
    if (i == 0) return 0;
    return std::min(i - 1, r.size() - 2);
}

} // namespace

double RadialField::value_at(double x) const
{
    if (x < 0.0) x = -x;
    if (x > r_.back()) {
        if (kind_ == RadialKind::entire) return u_.back() * std::pow(x / r_.back(), tail_exponent_);
        if (kind_ == RadialKind::dirichlet_ball) return 0.0;
        throw PreconditionError("RadialField::value_at: radius beyond the profile");
    }
    const std::size_t i = bracket(r_, x);
    const double h = r_[i + 1] - r_[i];
    const double t = (x - r_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * u_[i] + (t3 - 2 * t2 + t) * h * du_[i] + (-2 * t3 + 3 * t2) * u_[i + 1] +
           (t3 - t2) * h * du_[i + 1];
}

double RadialField::slope_at(double x) const
{
    if (x < 0.0) x = -x;
    if (x > r_.back()) {
        if (kind_ == RadialKind::entire) return du_.back() * std::pow(x / r_.back(), tail_exponent_ - 1.0);
        if (kind_ == RadialKind::dirichlet_ball) return 0.0;
        throw PreconditionError("RadialField::slope_at: radius beyond the profile");
    }
    const std::size_t i = bracket(r_, x);
    const double h = r_[i + 1] - r_[i];
    const double t = (x - r_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * u_[i] + (-6 * t2 + 6 * t) * u_[i + 1]) / h + (3 * t2 - 4 * t + 1) * du_[i] +
           (3 * t2 - 2 * t) * du_[i + 1];
}

RadialField RadialField::dilate(double lambda) const
{
    if (!(lambda > 0.0)) throw PreconditionError("RadialField::dilate: lambda must be positive");
    std::vector<double> r(r_.size()), u(r_.size()), du(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) {
        r[i] = r_[i] / lambda;
        u[i] = u_[i] / (lambda * lambda);
        du[i] = du_[i] / lambda;
    }
    return RadialField(n_, std::move(r), std::move(u), std::move(du), kind_, description_, tail_exponent_);
}

RadialField RadialField::scaled(double s) const
{
    if (!(s > 0.0)) throw PreconditionError("RadialField::scaled: factor must be positive");
    std::vector<double> u(u_), du(du_);
    for (auto& x : u) x *= s;
    for (auto& x : du) x *= s;
    return RadialField(n_, r_, std::move(u), std::move(du), kind_, description_, tail_exponent_);
}

RadialField RadialField::shifted(double b) const
{
    std::vector<double> u(u_);
    for (auto& x : u) x -= b;
    return RadialField(n_, r_, std::move(u), du_, RadialKind::free, description_);
}

bool RadialField::same_grid(const RadialField& v) const
{
    return n_ == v.n_ && r_ == v.r_;
}

RadialField RadialField::combine(double t, const RadialField& v) const
{
    if (!same_grid(v)) throw PreconditionError("RadialField::combine: profiles on different grids");
    std::vector<double> u(u_), du(du_);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] += t * v.u_[i];
        du[i] += t * v.du_[i];
    }
    RadialKind kind = kind_ == v.kind_ ? kind_ : RadialKind::free;
    double tail = std::numeric_limits<double>::quiet_NaN();
    if (kind == RadialKind::entire) {
        if (tail_exponent_ != v.tail_exponent_) kind = RadialKind::free;
        else tail = tail_exponent_;
    }
    return RadialField(n_, r_, std::move(u), std::move(du), kind, description_, tail);
}

RadialDensity RadialDensity::constant(double value, double radius)
{
    if (!(value >= 0.0) || !(radius > 0.0)) throw PreconditionError("RadialDensity::constant: bad parameters");
    return {[value](double) { return value; }, radius, {}, "uniform(" + std::to_string(value) + ")"};
}

RadialDensity RadialDensity::polynomial_bump(int m, double a, double value)
{
    if (m < 0 || !(a > 0.0) || !(value >= 0.0))
        throw PreconditionError("RadialDensity::polynomial_bump: bad parameters");
    return {[m, a, value](double r) {
                const double s = 1.0 - (r / a) * (r / a);
                return s <= 0.0 ? 0.0 : value * std::pow(s, m);
            },
            a,
            {},
            "bump(m=" + std::to_string(m) + ")"};
}

RadialDensity RadialDensity::scaled(double s) const
{
    if (!(s >= 0.0)) throw PreconditionError("RadialDensity::scaled: factor must be nonnegative");
    auto g = f;
    return {[g, s](double r) { return s * g(r); }, support, breaks, description};
}

RadialDensity RadialDensity::power(double s) const
{
    auto g = f;
    return {[g, s](double r) {
                const double v = g(r);
                return v <= 0.0 ? 0.0 : std::pow(v, s);
            },
            support, breaks, description};
}

namespace {

std::vector<double> density_breaks(const RadialDensity& f, double lo, double hi)
{
    std::vector<double> b;
    for (double x : f.breaks)
        if (x > lo && x < hi) b.push_back(x);
    if (f.support > lo && f.support < hi) b.push_back(f.support);
    std::sort(b.begin(), b.end());
    return b;
}

} // namespace

double RadialDensity::mass(int n) const
{
    const auto b = density_breaks(*this, 0.0, support);
    return unit_sphere_area(n) *
           integrate_piecewise([&](double r) { return (*this)(r) * std::pow(r, n - 1); }, 0.0, support, b, 30);
}

double RadialDensity::lq_norm(int n, double q) const
{
    if (!(q > 0.0) || !std::isfinite(q)) throw PreconditionError("RadialDensity::lq_norm: q must be finite and positive");
    const auto b = density_breaks(*this, 0.0, support);
    const double v = integrate_piecewise(
        [&](double r) { return std::pow(std::max((*this)(r), 0.0), q) * std::pow(r, n - 1); }, 0.0, support, b, 30);
    return std::pow(unit_sphere_area(n) * v, 1.0 / q);
}

namespace {

// Stencil of five samples for derivatives at node i, reflecting through
// r = 0 with the given parity (odd for u', even for u'/r).
void stencil(const std::vector<double>& r, const std::vector<double>& y, std::size_t i, double parity,
             std::array<double, 5>& xs, std::array<double, 5>& ys)
{
    const auto n = static_cast<long>(r.size());
    long lo = static_cast<long>(i) - 2;
    if (lo + 4 > n - 1) lo = n - 5;
    for (int j = 0; j < 5; ++j) {
        const long idx = lo + j;
        if (idx < 0) {
            xs[static_cast<std::size_t>(j)] = -r[static_cast<std::size_t>(-idx)];
            ys[static_cast<std::size_t>(j)] = parity * y[static_cast<std::size_t>(-idx)];
        } else {
            xs[static_cast<std::size_t>(j)] = r[static_cast<std::size_t>(idx)];
            ys[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(idx)];
        }
    }
}

std::vector<double> derivative(const std::vector<double>& r, const std::vector<double>& y, double parity)
{
    std::vector<double> d(r.size());
    std::array<double, 5> xs{}, ys{};
    for (std::size_t i = 0; i < r.size(); ++i) {
        stencil(r, y, i, parity, xs, ys);
        const auto w = fornberg_weights(r[i], xs, 1);
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j) s += w[1][j] * ys[j];
        d[i] = s;
    }
    return d;
}

double extrapolate_to_zero(const std::vector<double>& r, const std::vector<double>& q)
{
    const double r1 = r[1], r2 = r[2], r3 = r[3];
    return q[1] * r2 * r3 / ((r1 - r2) * (r1 - r3)) + q[2] * r1 * r3 / ((r2 - r1) * (r2 - r3)) +
           q[3] * r1 * r2 / ((r3 - r1) * (r3 - r2));
}

void check_radial_k(const RadialField& u, int k, const char* op, int min_k = 0)
{
    if (k < min_k || k > u.dim())
        throw PreconditionError(std::string(op) + ": order k=" + std::to_string(k) + " outside [" +
                                std::to_string(min_k) + ", " + std::to_string(u.dim()) + "]");
}

std::vector<double> fk_from(int n, int k, const RadialDerivatives& d)
{
    std::vector<double> f(d.q.size());
    if (k == 0) {
        std::fill(f.begin(), f.end(), 1.0);
        return f;
    }
    const double a = binomial(n - 1, k), b = binomial(n - 1, k - 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double qk1 = std::pow(d.q[i], k - 1);
        f[i] = a * qk1 * d.q[i] + b * qk1 * d.d2u[i];
    }
    return f;
}

} // namespace

RadialDerivatives radial_derivatives(const RadialField& u)
{
    RadialDerivatives d;
    const auto& r = u.r();
    const auto& du = u.du();
    d.q.resize(r.size());
    for (std::size_t i = 1; i < r.size(); ++i) d.q[i] = du[i] / r[i];
    d.q[0] = extrapolate_to_zero(r, d.q);
    d.d2u = derivative(r, du, -1.0);
    return d;
}

RadialProfile radial_fk(const RadialField& u, int k)
{
    check_radial_k(u, k, "radial_fk");
    return {u.dim(), u.r(), fk_from(u.dim(), k, radial_derivatives(u))};
}

RadialProfile radial_fk_divergence(const RadialField& u, int k)
{
    check_radial_k(u, k, "radial_fk_divergence", 1);
    const int n = u.dim();
    const auto d = radial_derivatives(u);
    std::vector<double> g(d.q.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(d.q[i], k);
    const auto dg = derivative(u.r(), g, 1.0);
    const double c = binomial(n - 1, k - 1) / k;
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = c * (n * g[i] + u.r()[i] * dg[i]);
    return {n, u.r(), std::move(f)};
}

bool radial_is_k_convex(const RadialField& u, int k, double tol)
{
    check_radial_k(u, k, "radial_is_k_convex", 1);
    const auto d = radial_derivatives(u);
    if (tol < 0.0) {
        const auto f1 = fk_from(u.dim(), 1, d);
        double scale = 0.0;
        for (double v : f1) scale = std::max(scale, std::abs(v));
        tol = 1e-8 * scale;
    }
    for (int j = 1; j <= k; ++j)
        for (double v : fk_from(u.dim(), j, d))
            if (v < -tol) return false;
    return true;
}

RadialField solve_radial(const RadialDensity& f, int n, int k, const RadialDomain& domain, int samples)
{
    if (n < 1 || k < 1 || k > n)
        throw PreconditionError("solve_radial: need 1 <= k <= n (n=" + std::to_string(n) + ", k=" +
                                std::to_string(k) + ")");
    if (samples < 11) throw PreconditionError("solve_radial: at least 11 samples required");
    if (!(f.support > 0.0) || !std::isfinite(f.support))
        throw PreconditionError("solve_radial: density support radius must be finite and positive");
    if (domain.entire && n <= 2 * k)
        throw PreconditionError("solve_radial: entire-space solutions need n > 2k (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + "); the tail is not integrable");
    if (!domain.entire && !(domain.radius > 0.0)) throw PreconditionError("solve_radial: ball radius must be positive");

    // The support radius is a sample so that no interpolation stencil spans
    // the kink of u' there.
    std::vector<double> r;
    std::vector<std::size_t> cuts;
    if (domain.entire) {
        const double a = f.support;
        const double big_t = domain.truncation * a;
        if (!(big_t > a)) throw PreconditionError("solve_radial: truncation factor must exceed 1");
        const int n1 = std::max(101, samples * 2 / 5);
        const int n2 = std::max(11, samples - n1 + 1);
        r = linear_grid(0.0, a, n1);
        const auto outer = geometric_grid(a, big_t, n2);
        r.insert(r.end(), outer.begin() + 1, outer.end());
        cuts.push_back(static_cast<std::size_t>(n1 - 1));
    } else if (f.support < domain.radius) {
        const double a = f.support, big_r = domain.radius;
        const int n1 = std::clamp(static_cast<int>(std::lround((samples - 1) * a / big_r)) + 1, 6, samples - 5);
        r = linear_grid(0.0, a, n1);
        const auto outer = linear_grid(a, big_r, samples - n1 + 1);
        r.insert(r.end(), outer.begin() + 1, outer.end());
        cuts.push_back(static_cast<std::size_t>(n1 - 1));
    } else {
        r = linear_grid(0.0, domain.radius, samples);
    }

    const std::size_t count = r.size();
    const double cprime = binomial(n - 1, k - 1);
    std::vector<double> mass(count, 0.0);
    const auto& rule = gauss_rule(7);
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const double lo = r[i];
        const double hi = std::min(r[i + 1], f.support);
        double acc = 0.0;
        if (hi > lo) {
            auto cuts = density_breaks(f, lo, hi);
            cuts.insert(cuts.begin(), lo);
            cuts.push_back(hi);
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                const double a = cuts[c], b = cuts[c + 1];
                const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
                    const double s = mid + half * rule.nodes[g];
                    const double fs = f.f(s);
                    if (!(fs >= 0.0))
                        throw PreconditionError("solve_radial: density negative or undefined at r=" + std::to_string(s));
                    acc += half * rule.weights[g] * fs * std::pow(s, n - 1);
                }
            }
        }
        mass[i + 1] = mass[i] + acc;
    }

    std::vector<double> du(count, 0.0);
    for (std::size_t i = 1; i < count; ++i)
        du[i] = std::pow(k / cprime * std::pow(r[i], k - n) * mass[i], 1.0 / k);
    const auto prim = cumulative_integral(r, du, cuts);
    std::vector<double> u(count);
    double tail = 0.0;
    if (domain.entire) {
        const double big_t = r.back();
        tail = std::pow(k * mass.back() / cprime, 1.0 / k) * std::pow(big_t, (2.0 * k - n) / k) * k / (n - 2.0 * k);
    }
    for (std::size_t i = 0; i < count; ++i) u[i] = -(prim.back() - prim[i]) - tail;

    const std::string desc = "solve_radial(" + f.description + ", k=" + std::to_string(k) + ")";
    if (domain.entire)
        return RadialField(n, std::move(r), std::move(u), std::move(du), RadialKind::entire, desc,
                           (2.0 * k - n) / k);
    u.back() = 0.0;
    return RadialField(n, std::move(r), std::move(u), std::move(du), RadialKind::dirichlet_ball, desc);
}

double quadratic_coefficient(int n, int k, QuadraticMode mode)
{
    if (n < 1 || k < 1 || k > n) throw PreconditionError("quadratic_solution: need 1 <= k <= n");
    if (mode.l < 0 || mode.l >= k)
        throw PreconditionError("quadratic_solution: quotient order l=" + std::to_string(mode.l) +
                                " must satisfy 1 <= l < k=" + std::to_string(k));
    return 0.5 * std::pow(binomial(n, mode.l) / binomial(n, k), 1.0 / (k - mode.l));
}

RadialField quadratic_solution(int n, int k, double radius, QuadraticMode mode, int samples)
{
    if (!(radius > 0.0)) throw PreconditionError("quadratic_solution: radius must be positive");
    if (samples < 5) throw PreconditionError("quadratic_solution: at least 5 samples required");
    const double c = quadratic_coefficient(n, k, mode);
    auto r = linear_grid(0.0, radius, samples);
    std::vector<double> u(r.size()), du(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        u[i] = c * (r[i] - radius) * (r[i] + radius);
        du[i] = 2.0 * c * r[i];
    }
    u.back() = 0.0;
    const std::string desc = mode.l == 0 ? "w_unit(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")"
                                         : "w_quotient(n=" + std::to_string(n) + ",k=" + std::to_string(k) +
                                               ",l=" + std::to_string(mode.l) + ")";
    return RadialField(n, std::move(r), std::move(u), std::move(du), RadialKind::dirichlet_ball, desc);
}

double radial_integral(const RadialField& u, std::span<const double> g)
{
    if (g.size() != u.size()) throw PreconditionError("radial_integral: sample count mismatch");
    std::vector<double> y(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) y[i] = g[i] * std::pow(u.r()[i], u.dim() - 1);
    return unit_sphere_area(u.dim()) * simpson(u.r(), y);
}

double radial_norm(const RadialField& u, double q, const std::function<double(double)>& weight)
{
    if (!(q > 0.0) || !std::isfinite(q)) throw PreconditionError("radial_norm: q must be finite and positive");
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = std::pow(std::abs(u.u()[i]), q);
        if (weight) g[i] *= weight(u.r()[i]);
    }
    double total = radial_integral(u, g);
    if (u.kind() == RadialKind::entire && !weight) {
        const double e = q * u.tail_exponent() + u.dim();
        const double big_t = u.radius();
        if (e >= 0.0 && u.u().back() != 0.0) return std::numeric_limits<double>::infinity();
        if (e < 0.0)
            total += unit_sphere_area(u.dim()) * std::pow(std::abs(u.u().back()), q) * std::pow(big_t, u.dim()) / (-e);
    }
    return std::pow(total, 1.0 / q);
}

double radial_mutual_energy(const RadialField& u, const RadialField& v, int k)
{
    check_radial_k(u, k, "radial_mutual_energy");
    if (u.dim() != v.dim()) throw PreconditionError("radial_mutual_energy: dimension mismatch");
    const auto f = radial_fk(u, k).values;
    std::vector<double> g(u.size());
    const bool same = u.same_grid(v);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -(same ? v.u()[i] : v.value_at(u.r()[i])) * f[i];
    return radial_integral(u, g);
}

double radial_energy(const RadialField& u, int k)
{
    return radial_mutual_energy(u, u, k);
}

HCurve radial_h_curve(const RadialField& u, const RadialField& v, int k, std::span<const double> t_samples)
{
    check_radial_k(u, k, "radial_h_curve", 1);
    if (!u.same_grid(v)) throw PreconditionError("radial_h_curve: profiles on different grids");
    for (std::size_t i = 1; i < t_samples.size(); ++i)
        if (!(t_samples[i] > t_samples[i - 1])) throw PreconditionError("radial_h_curve: t samples must increase");
    const int n = u.dim();
    const auto du = radial_derivatives(u);
    const auto dv = radial_derivatives(v);
    const double c1 = binomial(n - 1, k - 1), c2 = binomial(n - 2, k - 1), c3 = binomial(n - 2, k - 2);
    HCurve out;
    const std::size_t m = u.size();
    std::vector<double> e0(m), e1(m), e2(m);
    RadialDerivatives dw;
    dw.q.resize(m);
    dw.d2u.resize(m);
    for (double t : t_samples) {
        for (std::size_t i = 0; i < m; ++i) {
            dw.q[i] = du.q[i] + t * dv.q[i];
            dw.d2u[i] = du.d2u[i] + t * dv.d2u[i];
        }
        const RadialField w = u.combine(t, v);
        if (!radial_is_k_convex(w, k))
            throw PreconditionError("radial_h_curve: u + t v is not " + std::to_string(k) + "-convex at t=" +
                                    std::to_string(t));
        const auto fw = fk_from(n, k, dw);
        for (std::size_t i = 0; i < m; ++i) {
            const double q = dw.q[i];
            const double qk2 = k >= 2 ? std::pow(q, k - 2) : 0.0;
            const double qk1 = std::pow(q, k - 1);
            // v'' S_{k-1}(q,...,q) + (n-1) (v'/r) S_{k-1}(w'', q,...,q), the
            // radial form of sum_ij v_ij S_k^{ij}[D^2 w].
            const double dir = dv.d2u[i] * c1 * qk1 + (n - 1) * dv.q[i] * (c2 * qk1 + c3 * dw.d2u[i] * qk2);
            e0[i] = -w.u()[i] * fw[i];
            e1[i] = -v.u()[i] * fw[i];
            e2[i] = -v.u()[i] * dir;
        }
        out.t.push_back(t);
        out.h.push_back(radial_integral(u, e0));
        out.dh.push_back((k + 1) * radial_integral(u, e1));
        out.d2h.push_back((k + 1) * radial_integral(u, e2));
    }
    return out;
}

} // namespace hesskit
