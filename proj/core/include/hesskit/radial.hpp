#pragma once

// Radial profiles u(r) = u(|x|) in any dimension n. For such u the Hessian
// has eigenvalues u'' (radial direction) and u'/r (n-1 times), so
// F_k[u] = C(n-1,k) (u'/r)^k + C(n-1,k-1) (u'/r)^{k-1} u''.

#include "hesskit/hcurve.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hesskit {

enum class RadialKind {
    dirichlet_ball,   ///< zero at r = R
    entire,           ///< defined on R^n, vanishing at infinity; power-law tail beyond R
    free,             ///< no boundary condition (e.g. a solution minus a constant)
};

[[nodiscard]] const char* to_string(RadialKind kind) noexcept;
[[nodiscard]] RadialKind radial_kind_from_string(const std::string& s);

/// Samples of u and u' on 0 = r_0 < r_1 < ... < r_{N-1} = R. For entire
/// profiles R is the truncation radius and u continues as
/// u(R) (r/R)^{tail_exponent} beyond it.
class RadialField {
public:
    RadialField(int n, std::vector<double> r, std::vector<double> u, std::vector<double> du, RadialKind kind,
                std::string description = {}, double tail_exponent = std::numeric_limits<double>::quiet_NaN());

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] double radius() const noexcept { return r_.back(); }
    [[nodiscard]] std::size_t size() const noexcept { return r_.size(); }
    [[nodiscard]] const std::vector<double>& r() const& noexcept { return r_; }
    [[nodiscard]] std::vector<double> r() && { return std::move(r_); }
    [[nodiscard]] const std::vector<double>& u() const& noexcept { return u_; }
    [[nodiscard]] std::vector<double> u() && { return std::move(u_); }
    [[nodiscard]] const std::vector<double>& du() const& noexcept { return du_; }
    [[nodiscard]] std::vector<double> du() && { return std::move(du_); }
    [[nodiscard]] RadialKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& description() const noexcept { return description_; }
    [[nodiscard]] double tail_exponent() const noexcept { return tail_exponent_; }

    /// Cubic Hermite interpolation from (u, u'); entire profiles use the
    /// power-law tail past the truncation radius, ball profiles return 0.
    [[nodiscard]] double value_at(double r) const;
    [[nodiscard]] double slope_at(double r) const;

    /// u_lambda(r) = lambda^{-2} u(lambda r) on the grid r_i / lambda.
    [[nodiscard]] RadialField dilate(double lambda) const;
    /// s * u, s > 0.
    [[nodiscard]] RadialField scaled(double s) const;
    /// u - b; the result has kind `free`.
    [[nodiscard]] RadialField shifted(double b) const;
    /// u + t v on a shared grid.
    [[nodiscard]] RadialField combine(double t, const RadialField& v) const;
    [[nodiscard]] bool same_grid(const RadialField& v) const;

private:
    int n_;
    std::vector<double> r_, u_, du_;
    RadialKind kind_;
    std::string description_;
    double tail_exponent_;
};

/// A radial profile of some derived quantity (F_k, a density).
struct RadialProfile {
    int n = 0;
    std::vector<double> r;
    std::vector<double> values;
};

/// Nonnegative radial density f(|x - c|) with support in [0, support].
/// `breaks` lists radii where f or a low derivative jumps; quadrature
/// splits there.
struct RadialDensity {
    std::function<double(double)> f;
    double support = 1.0;
    std::vector<double> breaks;
    std::string description;

    [[nodiscard]] double operator()(double r) const { return r > support ? 0.0 : f(r); }

    static RadialDensity constant(double value, double radius);
    /// value * (1 - (r/a)^2)^m on [0, a].
    static RadialDensity polynomial_bump(int m, double a, double value = 1.0);
    [[nodiscard]] RadialDensity scaled(double s) const;
    /// s-th power of the density, pointwise.
    [[nodiscard]] RadialDensity power(double s) const;
    /// Total mass sigma_{n-1} int_0^support f r^{n-1} dr.
    [[nodiscard]] double mass(int n) const;
    /// (sigma_{n-1} int f^q r^{n-1} dr)^{1/q}.
    [[nodiscard]] double lq_norm(int n, double q) const;
};

/// Second derivative and u'/r at every sample (u'/r at r = 0 by parabolic
/// extrapolation through the next three samples).
struct RadialDerivatives {
    std::vector<double> q;     ///< u'/r
    std::vector<double> d2u;   ///< u''
};
[[nodiscard]] RadialDerivatives radial_derivatives(const RadialField& u);

/// F_k from the eigenvalue form; k == 0 gives 1.
[[nodiscard]] RadialProfile radial_fk(const RadialField& u, int k);
/// F_k from the divergence form (C(n-1,k-1)/k) r^{1-n} (r^{n-k} (u')^k)',
/// evaluated as (C(n-1,k-1)/k) (n q^k + r (q^k)') with q = u'/r.
[[nodiscard]] RadialProfile radial_fk_divergence(const RadialField& u, int k);

/// F_j >= -tol at every sample for j = 1..k. tol < 0: 1e-8 max|F_1|.
[[nodiscard]] bool radial_is_k_convex(const RadialField& u, int k, double tol = -1.0);

struct RadialDomain {
    bool entire = false;
    double radius = 1.0;        ///< ball radius; ignored for entire
    double truncation = 1000.0; ///< entire: truncation radius / support radius

    static RadialDomain ball(double radius) { return {false, radius, 1000.0}; }
    static RadialDomain whole_space(double truncation_factor = 1000.0) { return {true, 0.0, truncation_factor}; }
};

/// Solves F_k[u] = f by inverting the divergence form:
/// u'(r) = [(k / C(n-1,k-1)) r^{k-n} int_0^r s^{n-1} f]^{1/k}, then u(R) = 0 on
/// a ball or u(inf) = 0 on R^n with the power-law tail integrated exactly.
[[nodiscard]] RadialField solve_radial(const RadialDensity& f, int n, int k, const RadialDomain& domain,
                                       int samples = 10001);

struct QuadraticMode {
    int l = 0;   ///< 0: F_k[w] = 1; l >= 1: F_k[w] = F_l[w]
    static QuadraticMode unit_rhs() { return {0}; }
    static QuadraticMode quotient(int l) { return {l}; }
};

/// c with (2c)^{k-l} = C(n,l)/C(n,k); l = 0 gives c = C(n,k)^{-1/k}/2.
[[nodiscard]] double quadratic_coefficient(int n, int k, QuadraticMode mode = {});
/// w = c (r^2 - R^2) on a uniform grid.
[[nodiscard]] RadialField quadratic_solution(int n, int k, double radius, QuadraticMode mode = {},
                                             int samples = 10001);

/// (sigma_{n-1} int |u|^q w(r) r^{n-1} dr)^{1/q} by composite Simpson; the
/// power-law tail of entire profiles is added in closed form when no weight
/// is given. q must be finite and positive.
[[nodiscard]] double radial_norm(const RadialField& u, double q,
                                 const std::function<double(double)>& weight = {});

/// sigma_{n-1} int (-u) F_k[u] r^{n-1} dr.
[[nodiscard]] double radial_energy(const RadialField& u, int k);
/// sigma_{n-1} int (-v) F_k[u] r^{n-1} dr; u is differentiated.
[[nodiscard]] double radial_mutual_energy(const RadialField& u, const RadialField& v, int k);
/// sigma_{n-1} int g(r) r^{n-1} dr over the samples of u.
[[nodiscard]] double radial_integral(const RadialField& u, std::span<const double> g);

[[nodiscard]] HCurve radial_h_curve(const RadialField& u, const RadialField& v, int k,
                                    std::span<const double> t_samples);

} // namespace hesskit
