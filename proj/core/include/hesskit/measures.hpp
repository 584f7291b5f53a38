#pragma once

// Positive measures built from point masses and at most one density part,
// ball-mass queries, and the nonlinear potentials built on them.
//
// Riesz kernels are unnormalized: I_alpha mu(x) = int |x-y|^{alpha-n} dmu(y).
// Every constant we compare against depends only on (n, k), so the
// normalization never enters a verification.
//
// Balls are closed: mu(B_t(x)) counts atoms at distance exactly t.

#include "hesskit/grid.hpp"
#include "hesskit/radial.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <utility>
#include <vector>

namespace hesskit {

using Point = std::vector<double>;

struct Atom {
    Point x;
    double mass = 0.0;
};

/// f(|x - center|).
struct RadialDensityPart {
    Point center;
    RadialDensity profile;
};

/// Nonnegative grid samples; the ball mask limits the support.
struct GridDensityPart {
    GridField field;
};

/// value * Lebesgue measure on the box [lo, hi].
struct BoxDensityPart {
    Point lo, hi;
    double value = 1.0;
};

/// value * (n-1)-dimensional surface measure on the disk
/// {x : x[axis] = offset, |x - center| <= radius} (center[axis] is ignored).
struct HyperplaneDiskPart {
    int axis = 0;
    double offset = 0.0;
    Point center;
    double radius = 1.0;
    double value = 1.0;
};

using DensityPart = std::variant<RadialDensityPart, GridDensityPart, BoxDensityPart, HyperplaneDiskPart>;

class DiscreteMeasure {
public:
    /// Validates masses > 0, matching dimensions and a nonnegative density.
    explicit DiscreteMeasure(int n, std::vector<Atom> atoms = {}, std::optional<DensityPart> density = {});

    static DiscreteMeasure point_mass(Point x, double mass = 1.0);

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Atom>& atoms() const& noexcept { return atoms_; }
    [[nodiscard]] std::vector<Atom> atoms() && { return std::move(atoms_); }
    [[nodiscard]] const std::optional<DensityPart>& density() const noexcept { return density_; }
    [[nodiscard]] double total_mass() const noexcept { return atom_mass_ + density_mass_; }
    [[nodiscard]] double atom_mass() const noexcept { return atom_mass_; }
    [[nodiscard]] double density_mass() const noexcept { return density_mass_; }

    /// s * mu, s > 0.
    [[nodiscard]] DiscreteMeasure scaled(double s) const;
    [[nodiscard]] DiscreteMeasure with_atom(Atom atom) const;

    struct Box {
        Point lo, hi;
    };
    /// Smallest axis-aligned box holding the support (degenerate for a single atom).
    [[nodiscard]] Box support_box() const;
    [[nodiscard]] double diameter() const;
    /// Nearest and farthest distance from x to the density support
    /// (nothing when there is no density).
    [[nodiscard]] std::optional<std::pair<double, double>> density_distance_range(const Point& x) const;
    /// Radii at which the density's ball mass around x changes regime.
    [[nodiscard]] std::vector<double> density_breaks(const Point& x) const;
    /// Common symmetry center when every atom sits at it and the density is
    /// radial about it.
    [[nodiscard]] std::optional<Point> radial_center() const;
    [[nodiscard]] std::string describe() const;

private:
    int n_;
    std::vector<Atom> atoms_;
    std::optional<DensityPart> density_;
    double atom_mass_ = 0.0;
    double density_mass_ = 0.0;
};

/// Volume of B_t(c) intersected with the box [lo, hi] in R^n.
[[nodiscard]] double ball_box_volume(const Point& c, double t, const Point& lo, const Point& hi);
/// Volume of B_rho(p) intersected with B_l(q) in R^m where |p - q| = e.
[[nodiscard]] double lens_volume(int m, double rho, double l, double e);
/// Fraction of the sphere |y - c| = s in R^n lying in the closed ball
/// B_t(x) with |x - c| = d.
[[nodiscard]] double sphere_cap_fraction(int n, double s, double d, double t);

/// mu(B_t(x)) for the closed ball.
[[nodiscard]] double ball_mass(const DiscreteMeasure& mu, const Point& x, double t);

/// int g(|y - c|) dmu(y). `support` bounds where g is nonzero (infinity when unknown).
[[nodiscard]] double integrate_radial(const DiscreteMeasure& mu, const Point& c,
                                      const std::function<double(double)>& g,
                                      double support = std::numeric_limits<double>::infinity());

struct PotentialParams {
    double alpha = 1.0;
    double p = 2.0;
    double truncation = std::numeric_limits<double>::infinity();
    int t_points_per_decade = 400;

    /// alpha = 2k/(k+1), p = k+1.
    static PotentialParams for_hessian(int k, double truncation = std::numeric_limits<double>::infinity());
    void validate(int n) const;
};

/// int_0^R [mu(B_t(x)) / t^{n - alpha p}]^{1/(p-1)} dt/t. Pure power-law
/// pieces are integrated exactly; pieces where a density part is being
/// swept use log-spaced Simpson. Returns +infinity when x carries an atom
/// and the integral diverges at 0; throws NumericalError when the
/// untruncated integral diverges at infinity (n <= alpha p, mu != 0).
[[nodiscard]] double wolff(const DiscreteMeasure& mu, const Point& x, const PotentialParams& params);

/// Unnormalized Riesz potential. +infinity at an atom. Box and hyperplane
/// densities are not supported (PreconditionError).
[[nodiscard]] double riesz(const DiscreteMeasure& mu, const Point& x, double alpha);

/// U(x) = I_alpha[(I_alpha mu)^{1/(p-1)}](x), untruncated. Radially
/// symmetric measures use the one-dimensional spherical-mean kernel; other
/// measures must be atoms only and use polar quadrature around x.
[[nodiscard]] double havin_mazya(const DiscreteMeasure& mu, const Point& x, const PotentialParams& params);
[[nodiscard]] std::vector<double> havin_mazya(const DiscreteMeasure& mu, const std::vector<Point>& xs,
                                              const PotentialParams& params);

/// int W dmu. +infinity (not an exception) when an atom's self-energy diverges.
[[nodiscard]] double wolff_energy(const DiscreteMeasure& mu, const PotentialParams& params);

struct BallScanOptions {
    double min_radius = 0.0;     ///< 0: diameter / 1024 (grid spacing for grid densities)
    double max_radius = 0.0;     ///< 0: 4 * diameter
    int lattice_per_axis = 0;    ///< 0: about 125 lattice centers
    double growth = 1.05;        ///< per-step ratio growth flagging a divergent shrinking family
};

/// Supremum over a dyadic ball family, with the witnessing ball.
struct SupremumResult {
    double value = 0.0;
    bool divergent = false;
    Point center;
    double radius = 0.0;
    std::size_t balls = 0;
};

/// sup_B mu(B) / ratio_denominator(radius) over the dyadic family.
[[nodiscard]] SupremumResult scan_balls(const DiscreteMeasure& mu,
                                        const std::function<double(double)>& denominator,
                                        const BallScanOptions& options = {});

/// kappa(omega) = sup_B omega(B) / |B|^{(1 - 2k/n) q/(k+1)}; requires 2k < n.
[[nodiscard]] SupremumResult adams_kappa(const DiscreteMeasure& omega, double q, int k,
                                         const BallScanOptions& options = {});

/// sup_B int_B w^{1+eps} / R^{n - 2k(1+eps)} for a density-only measure w.
[[nodiscard]] SupremumResult fefferman_phong_check(const DiscreteMeasure& w, double eps, int k,
                                                   const BallScanOptions& options = {});

struct RefinementResult {
    std::vector<double> sups;
    bool divergent = false;
};

/// Repeats fefferman_phong_check over a sequence of refined truncations of
/// the same weight; divergent when the increments stop shrinking (each at
/// least 0.9 of the previous one) or any member diverges.
[[nodiscard]] RefinementResult fefferman_phong_refine(const std::vector<DiscreteMeasure>& refinements,
                                                      double eps, int k, const BallScanOptions& options = {});

} // namespace hesskit
