#pragma once

// One-dimensional quadrature and differentiation helpers shared by the
// radial and measure modules.

#include <functional>
#include <span>
#include <vector>

namespace hesskit {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Supported sizes: 7, 10, 15, 20, 30. Rules are built once and shared.
[[nodiscard]] const GaussRule& gauss_rule(int points);

/// Gauss-Legendre on [a, b].
[[nodiscard]] double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                                     int points = 20);

/// Gauss-Legendre after the map s = a + (b-a)(1-cos phi)/2, phi in [0, pi].
/// Removes half-integer power singularities at both endpoints.
[[nodiscard]] double integrate_gauss_cosine(const std::function<double(double)>& f, double a,
                                            double b, int points = 20);

/// Same as integrate_gauss_cosine, split at every interior breakpoint.
[[nodiscard]] double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                         std::span<const double> breaks, int points = 20);

/// Composite Simpson on a possibly non-uniform grid. An odd number of
/// intervals closes with a three-point rule on the last two intervals.
[[nodiscard]] double simpson(std::span<const double> x, std::span<const double> y);

/// Running integral of samples y over x using the cubic through the four
/// nearest samples on each interval. Stencils never reach across the sample
/// indices listed in `cuts` (kinks of y). Returns a vector with result[0] = 0.
[[nodiscard]] std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> y,
                                                      std::span<const std::size_t> cuts = {});

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at x0
/// from samples at xs. result[m][j] multiplies f(xs[j]) for the m-th derivative.
[[nodiscard]] std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> xs,
                                                                int max_order);

/// Pairwise (tree) summation; the result depends only on the input order.
[[nodiscard]] double pairwise_sum(std::span<const double> v);

/// Least-squares slope of y against x.
[[nodiscard]] double fit_slope(std::span<const double> x, std::span<const double> y);

/// n points geometrically spaced from a to b inclusive (a, b > 0).
[[nodiscard]] std::vector<double> geometric_grid(double a, double b, int n);

/// n points uniformly spaced from a to b inclusive.
[[nodiscard]] std::vector<double> linear_grid(double a, double b, int n);

} // namespace hesskit
