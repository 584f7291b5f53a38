#pragma once

#include <cmath>
#include <numbers>

namespace hesskit {

/// Binomial coefficient C(n, k) as a double; zero outside 0 <= k <= n.
[[nodiscard]] constexpr double binomial(int n, int k) noexcept
{
    if (k < 0 || n < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

/// Volume of the unit ball in R^n.
[[nodiscard]] inline double unit_ball_volume(int n) noexcept
{
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Surface area of the unit sphere S^{n-1} in R^n, i.e. n * unit_ball_volume(n).
[[nodiscard]] inline double unit_sphere_area(int n) noexcept
{
    return n * unit_ball_volume(n);
}

} // namespace hesskit
