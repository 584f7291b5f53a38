#include "hesskit/quadrature.hpp"

#include "hesskit/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hesskit {

namespace {

template <int N>
GaussRule build_rule()
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& abscissa = G::abscissa();
    const auto& weights = G::weights();
    GaussRule r;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
        if (abscissa[i] == 0.0) {
            r.nodes.push_back(0.0);
            r.weights.push_back(weights[i]);
        } else {
            r.nodes.push_back(-abscissa[i]);
            r.weights.push_back(weights[i]);
            r.nodes.push_back(abscissa[i]);
            r.weights.push_back(weights[i]);
        }
    }
    return r;
}

} // namespace

const GaussRule& gauss_rule(int points)
{
    static const GaussRule r7 = build_rule<7>();
    static const GaussRule r10 = build_rule<10>();
    static const GaussRule r15 = build_rule<15>();
    static const GaussRule r20 = build_rule<20>();
    static const GaussRule r30 = build_rule<30>();
    switch (points) {
    case 7: return r7;
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 30: return r30;
    default: throw PreconditionError("gauss_rule: unsupported size " + std::to_string(points));
    }
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int points)
{
    const GaussRule& g = gauss_rule(points);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
    return s * half;
}

double integrate_gauss_cosine(const std::function<double(double)>& f, double a, double b, int points)
{
    if (b <= a) return 0.0;
    const double half = 0.5 * (b - a);
    const GaussRule& g = gauss_rule(points);
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double phi = 0.5 * pi * (g.nodes[i] + 1.0);
        const double x = a + half * (1.0 - std::cos(phi));
        s += g.weights[i] * f(x) * half * std::sin(phi);
    }
    return s * 0.5 * pi;
}

double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks, int points)
{
    if (b <= a) return 0.0;
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        s += integrate_gauss_cosine(f, cuts[i], cuts[i + 1], points);
    return s;
}

double simpson(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n != y.size()) throw PreconditionError("simpson: size mismatch");
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);

    std::vector<double> parts;
    parts.reserve(n / 2 + 1);
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = x[i + 1] - x[i];
        const double h1 = x[i + 2] - x[i + 1];
        const double hs = h0 + h1;
        parts.push_back(hs / 6.0 *
                        (y[i] * (2.0 - h1 / h0) + y[i + 1] * hs * hs / (h0 * h1) + y[i + 2] * (2.0 - h0 / h1)));
    }
    if (i + 1 < n) {
        // Last interval [x_{n-2}, x_{n-1}] from the parabola through the last three samples.
        const double h0 = x[n - 2] - x[n - 3];
        const double h1 = x[n - 1] - x[n - 2];
        const double a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        const double b = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        const double c = -(h1 * h1 * h1) / (6.0 * h0 * (h0 + h1));
        parts.push_back(a * y[n - 1] + b * y[n - 2] + c * y[n - 3]);
    }
    return pairwise_sum(parts);
}

std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> y,
                                       std::span<const std::size_t> cuts)
{
    const std::size_t n = x.size();
    if (n != y.size()) throw PreconditionError("cumulative_integral: size mismatch");
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    std::vector<std::size_t> bounds{0};
    for (std::size_t c : cuts)
        if (c > 0 && c + 1 < n) bounds.push_back(c);
    bounds.push_back(n - 1);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    const GaussRule& g = gauss_rule(7);
    std::size_t seg = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        while (i >= bounds[seg + 1]) ++seg;
        const std::size_t first = bounds[seg], last = bounds[seg + 1];
        // Stencil of up to four samples around the interval, inside its segment.
        std::size_t lo = i > first ? i - 1 : first;
        std::size_t hi = std::min(last, lo + 3);
        if (hi - lo < 3) lo = hi >= first + 3 ? hi - 3 : first;
        const double a = x[i];
        const double b = x[i + 1];
        double s = 0.0;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double t = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[q];
            double v = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) {
                double l = 1.0;
                for (std::size_t m = lo; m <= hi; ++m)
                    if (m != j) l *= (t - x[m]) / (x[j] - x[m]);
                v += l * y[j];
            }
            s += g.weights[q] * v;
        }
        out[i + 1] = out[i] + 0.5 * (b - a) * s;
    }
    return out;
}

std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> xs, int max_order)
{
    const int n = static_cast<int>(xs.size());
    const int m = max_order;
    std::vector<std::vector<double>> c(static_cast<std::size_t>(m + 1), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

double pairwise_sum(std::span<const double> v)
{
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double fit_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_slope: need >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

std::vector<double> geometric_grid(double a, double b, int n)
{
    if (a <= 0.0 || b <= a || n < 2) throw PreconditionError("geometric_grid: need 0 < a < b and n >= 2");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double la = std::log(a);
    const double lb = std::log(b);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

std::vector<double> linear_grid(double a, double b, int n)
{
    if (n < 2) throw PreconditionError("linear_grid: n >= 2 required");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    g.back() = b;
    return g;
}

} // namespace hesskit
