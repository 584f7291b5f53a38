#include "hesskit/families.hpp"

#include "hesskit/constants.hpp"
#include "hesskit/error.hpp"

#include <Eigen/QR>

#include <array>
#include <numbers>

#include <cmath>
#include <string>

namespace hesskit {

SymMatrix random_symmetric(Rng& rng, int n)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = normal(rng);
    return SymMatrix(std::move(m));
}

Eigen::MatrixXd random_orthogonal(Rng& rng, int n)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

RadialDensity random_density(Rng& rng, double radius)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double base = 0.2 + 0.8 * unit(rng);
    std::array<double, 3> amp{}, mid{}, width{};
    for (std::size_t j = 0; j < 3; ++j) {
        amp[j] = 2.0 * unit(rng);
        mid[j] = radius * unit(rng);
        width[j] = radius * (0.1 + 0.4 * unit(rng));
    }
    return {[=](double r) {
                double v = base;
                for (std::size_t j = 0; j < 3; ++j) {
                    const double z = (r - mid[j]) / width[j];
                    v += amp[j] * std::exp(-z * z);
                }
                return v;
            },
            radius,
            {},
            "random-density"};
}

RadialField random_admissible_profile(Rng& rng, int n, int k, double radius, int samples)
{
    return solve_radial(random_density(rng, radius), n, k, RadialDomain::ball(radius), samples);
}

GridField quadratic_grid_field(const GridSpec& spec, double c)
{
    const auto center = spec.center;
    const double r2 = spec.radius * spec.radius;
    return GridField::sample(
        spec,
        [&](std::span<const double> x) {
            double d2 = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
            return c * (d2 - r2);
        },
        "quadratic(c=" + std::to_string(c) + ")");
}

GridField random_admissible_grid_field(Rng& rng, const GridSpec& spec, int k, double eps_max)
{
    spec.validate();
    if (k < 1 || k > spec.n) throw PreconditionError("random_admissible_grid_field: need 1 <= k <= n");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double c = 0.5 * std::pow(binomial(spec.n, k), -1.0 / k);
    const double r = spec.radius;
    std::vector<double> freq(static_cast<std::size_t>(spec.n)), phase(static_cast<std::size_t>(spec.n));
    for (std::size_t a = 0; a < freq.size(); ++a) {
        freq[a] = (0.5 + 1.5 * unit(rng)) / r;
        phase[a] = 2.0 * std::numbers::pi * unit(rng);
    }
    double eps = eps_max * unit(rng);
    const auto center = spec.center;
    for (int attempt = 0; attempt < 30; ++attempt) {
        GridField u = GridField::sample(
            spec,
            [&](std::span<const double> x) {
                double d2 = 0.0, g = 1.0;
                for (std::size_t a = 0; a < x.size(); ++a) {
                    const double y = x[a] - center[a];
                    d2 += y * y;
                    g *= std::cos(freq[a] * y + phase[a]);
                }
                return c * (d2 - r * r) * (1.0 + eps * g);
            },
            "perturbed-quadratic(eps=" + std::to_string(eps) + ")");
        if (is_k_convex(u, k)) return u;
        eps *= 0.5;
    }
    throw NumericalError("random_admissible_grid_field: no k-convex sample after 30 attempts");
}

} // namespace hesskit
