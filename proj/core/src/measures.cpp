#include "hesskit/measures.hpp"

#include "hesskit/constants.hpp"
#include "hesskit/error.hpp"
#include "hesskit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace hesskit {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double distance(const Point& a, const Point& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

void check_point(int n, const Point& x, const char* what)
{
    if (x.size() != static_cast<std::size_t>(n))
        throw PreconditionError(std::string(what) + ": expected a point with " + std::to_string(n) +
                                " coordinates, got " + std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw PreconditionError(std::string(what) + ": non-finite coordinate");
}

void sort_unique(std::vector<double>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Distance from x to the box and to its farthest corner.
std::pair<double, double> box_distances(const Point& x, const Point& lo, const Point& hi)
{
    double near = 0.0, far = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double below = lo[i] - x[i], above = x[i] - hi[i];
        const double d = std::max({below, above, 0.0});
        near += d * d;
        const double f = std::max(std::abs(x[i] - lo[i]), std::abs(x[i] - hi[i]));
        far += f * f;
    }
    return {std::sqrt(near), std::sqrt(far)};
}

// In-plane distance between x and the disk center, skipping `axis`.
double in_plane_distance(const Point& x, const HyperplaneDiskPart& h)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (static_cast<int>(i) == h.axis) continue;
        s += (x[i] - h.center[i]) * (x[i] - h.center[i]);
    }
    return std::sqrt(s);
}

DiscreteMeasure::Box grid_box(const GridField& g)
{
    const auto& s = g.spec();
    const double ext = s.radius + 1.5 * s.spacing;
    DiscreteMeasure::Box b;
    for (int a = 0; a < s.n; ++a) {
        b.lo.push_back(s.center[static_cast<std::size_t>(a)] - ext);
        b.hi.push_back(s.center[static_cast<std::size_t>(a)] + ext);
    }
    return b;
}

// int_0^theta sin^m(phi) dphi.
double sin_power_integral(int m, double theta)
{
    if (m == 0) return theta;
    if (m == 1) return 1.0 - std::cos(theta);
    const double s = std::sin(theta), c = std::cos(theta);
    return -std::pow(s, m - 1) * c / m + (m - 1.0) / m * sin_power_integral(m - 2, theta);
}

double sin_power_total(int m)
{
    if (m == 0) return std::numbers::pi;
    if (m == 1) return 2.0;
    return (m - 1.0) / m * sin_power_total(m - 2);
}

} // namespace

double sphere_cap_fraction(int n, double s, double d, double t)
{
    if (t < 0.0) return 0.0;
    if (s <= 0.0) return d <= t ? 1.0 : 0.0;
    if (d <= 0.0) return s <= t ? 1.0 : 0.0;
    const double gamma = (s * s + d * d - t * t) / (2.0 * s * d);
    if (gamma <= -1.0) return 1.0;
    if (gamma >= 1.0) return 0.0;
    const double theta = std::acos(gamma);
    return sin_power_integral(n - 2, theta) / sin_power_total(n - 2);
}

namespace {

// Area of the disk B_t(cx, cy) intersected with [x0, x1] x [y0, y1].
double disk_rect_area(double cx, double cy, double t, double x0, double x1, double y0, double y1)
{
    const double xa = std::max(x0, cx - t), xb = std::min(x1, cx + t);
    if (xa >= xb || y0 >= y1) return 0.0;
    std::vector<double> cuts{xa, xb};
    for (double v : {std::abs(y1 - cy), std::abs(y0 - cy)}) {
        if (v < t) {
            const double w = std::sqrt(t * t - v * v);
            for (double x : {cx - w, cx + w})
                if (x > xa && x < xb) cuts.push_back(x);
        }
    }
    sort_unique(cuts);
    auto half_chord = [&](double x) {
        const double u = x - cx;
        return std::sqrt(std::max(0.0, t * t - u * u));
    };
    // Antiderivative of sqrt(t^2 - u^2).
    auto prim = [&](double x) {
        const double u = std::clamp(x - cx, -t, t);
        return 0.5 * (u * std::sqrt(std::max(0.0, t * t - u * u)) + t * t * std::asin(u / t));
    };
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double p = cuts[i], q = cuts[i + 1];
        const double s = half_chord(0.5 * (p + q));
        const bool top_is_edge = cy + s >= y1;
        const bool bottom_is_edge = cy - s <= y0;
        const double top = top_is_edge ? y1 : cy + s;
        const double bottom = bottom_is_edge ? y0 : cy - s;
        if (top <= bottom) continue;
        double piece = 0.0;
        const double arc = prim(q) - prim(p);
        piece += top_is_edge ? y1 * (q - p) : cy * (q - p) + arc;
        piece -= bottom_is_edge ? y0 * (q - p) : cy * (q - p) - arc;
        area += piece;
    }
    return std::max(area, 0.0);
}

double ball_box_volume_impl(int m, const double* c, double t, const double* lo, const double* hi)
{
    if (t <= 0.0) return 0.0;
    double near = 0.0, far = 0.0, box = 1.0;
    bool ball_inside = true;
    for (int i = 0; i < m; ++i) {
        const double d = std::max({lo[i] - c[i], c[i] - hi[i], 0.0});
        near += d * d;
        const double f = std::max(std::abs(c[i] - lo[i]), std::abs(c[i] - hi[i]));
        far += f * f;
        box *= hi[i] - lo[i];
        if (c[i] - t < lo[i] || c[i] + t > hi[i]) ball_inside = false;
    }
    if (box <= 0.0 || near >= t * t) return 0.0;
    if (far <= t * t) return box;
    if (ball_inside) return unit_ball_volume(m) * std::pow(t, m);
    if (m == 1) return std::min(hi[0], c[0] + t) - std::max(lo[0], c[0] - t);
    if (m == 2) return disk_rect_area(c[0], c[1], t, lo[0], hi[0], lo[1], hi[1]);

    const double ya = std::max(lo[0], c[0] - t), yb = std::min(hi[0], c[0] + t);
    if (ya >= yb) return 0.0;
    // Radii at which the (m-1)-dimensional slice changes regime: distances
    // from the projected center to every face, edge and corner.
    std::vector<double> cuts;
    int combos = 1;
    for (int i = 1; i < m; ++i) combos *= 3;
    for (int code = 1; code < combos; ++code) {
        double r2 = 0.0;
        int rem = code;
        for (int i = 1; i < m; ++i) {
            const int choice = rem % 3;
            rem /= 3;
            if (choice == 1) r2 += (c[i] - lo[i]) * (c[i] - lo[i]);
            if (choice == 2) r2 += (c[i] - hi[i]) * (c[i] - hi[i]);
        }
        if (r2 < t * t) {
            const double w = std::sqrt(t * t - r2);
            for (double y : {c[0] - w, c[0] + w})
                if (y > ya && y < yb) cuts.push_back(y);
        }
    }
    if (c[0] > ya && c[0] < yb) cuts.push_back(c[0]);
    sort_unique(cuts);
    const int points = m >= 4 ? 7 : 10;
    return integrate_piecewise(
        [&](double y) {
            const double s2 = t * t - (y - c[0]) * (y - c[0]);
            if (s2 <= 0.0) return 0.0;
            return ball_box_volume_impl(m - 1, c + 1, std::sqrt(s2), lo + 1, hi + 1);
        },
        ya, yb, cuts, points);
}

} // namespace

double ball_box_volume(const Point& c, double t, const Point& lo, const Point& hi)
{
    if (c.size() != lo.size() || c.size() != hi.size() || c.empty())
        throw PreconditionError("ball_box_volume: dimension mismatch");
    return ball_box_volume_impl(static_cast<int>(c.size()), c.data(), t, lo.data(), hi.data());
}

double lens_volume(int m, double rho, double l, double e)
{
    if (m < 1) throw PreconditionError("lens_volume: dimension must be >= 1");
    if (rho <= 0.0 || l <= 0.0) return 0.0;
    e = std::abs(e);
    if (m == 1) return std::max(0.0, std::min(rho, e + l) - std::max(-rho, e - l));
    if (e >= rho + l) return 0.0;
    if (e + rho <= l) return unit_ball_volume(m) * std::pow(rho, m);
    if (e + l <= rho) return unit_ball_volume(m) * std::pow(l, m);
    const double za = std::max(-rho, e - l), zb = std::min(rho, e + l);
    const double zstar = (rho * rho - l * l + e * e) / (2.0 * e);
    std::vector<double> cuts;
    if (zstar > za && zstar < zb) cuts.push_back(zstar);
    const double slice = unit_ball_volume(m - 1);
    return integrate_piecewise(
        [&](double z) {
            const double a = rho * rho - z * z, b = l * l - (z - e) * (z - e);
            const double r2 = std::min(a, b);
            return r2 <= 0.0 ? 0.0 : slice * std::pow(r2, 0.5 * (m - 1));
        },
        za, zb, cuts, 20);
}

// ---------------------------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(int n, std::vector<Atom> atoms, std::optional<DensityPart> density)
    : n_(n), atoms_(std::move(atoms)), density_(std::move(density))
{
    if (n_ < 1) throw PreconditionError("DiscreteMeasure: dimension must be >= 1");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        check_point(n_, atoms_[i].x, "DiscreteMeasure atom");
        if (!(atoms_[i].mass > 0.0) || !std::isfinite(atoms_[i].mass))
            throw PreconditionError("DiscreteMeasure: atom " + std::to_string(i) + " has mass " +
                                    std::to_string(atoms_[i].mass) + "; masses must be positive");
        atom_mass_ += atoms_[i].mass;
    }
    if (!density_) return;
    if (auto* rd = std::get_if<RadialDensityPart>(&*density_)) {
        check_point(n_, rd->center, "radial density center");
        if (n_ < 2) throw PreconditionError("radial densities need n >= 2");
        if (!rd->profile.f || !(rd->profile.support > 0.0) || !std::isfinite(rd->profile.support))
            throw PreconditionError("radial density needs a profile with finite positive support");
        for (int i = 0; i <= 200; ++i) {
            const double r = rd->profile.support * i / 200.0;
            if (!(rd->profile(r) >= 0.0))
                throw PreconditionError("radial density is negative at r=" + std::to_string(r));
        }
        density_mass_ = rd->profile.mass(n_);
    } else if (auto* gd = std::get_if<GridDensityPart>(&*density_)) {
        if (gd->field.dim() != n_) throw PreconditionError("grid density dimension mismatch");
        for (std::size_t i = 0; i < gd->field.size(); ++i)
            if (gd->field.cell_weight(i) > 0.0 && !(gd->field[i] >= 0.0))
                throw PreconditionError("grid density is negative at node " + std::to_string(i));
        density_mass_ = integrate(gd->field);
    } else if (auto* bd = std::get_if<BoxDensityPart>(&*density_)) {
        check_point(n_, bd->lo, "box density lower corner");
        check_point(n_, bd->hi, "box density upper corner");
        if (!(bd->value >= 0.0) || !std::isfinite(bd->value))
            throw PreconditionError("box density value must be nonnegative");
        double vol = 1.0;
        for (int i = 0; i < n_; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (!(bd->hi[ui] > bd->lo[ui])) throw PreconditionError("box density needs lo < hi on every axis");
            vol *= bd->hi[ui] - bd->lo[ui];
        }
        density_mass_ = bd->value * vol;
    } else if (auto* hd = std::get_if<HyperplaneDiskPart>(&*density_)) {
        if (n_ < 2) throw PreconditionError("hyperplane densities need n >= 2");
        if (hd->axis < 0 || hd->axis >= n_) throw PreconditionError("hyperplane axis out of range");
        check_point(n_, hd->center, "hyperplane disk center");
        hd->center[static_cast<std::size_t>(hd->axis)] = hd->offset;
        if (!(hd->radius > 0.0) || !(hd->value >= 0.0) || !std::isfinite(hd->value))
            throw PreconditionError("hyperplane disk needs positive radius and nonnegative value");
        density_mass_ = hd->value * unit_ball_volume(n_ - 1) * std::pow(hd->radius, n_ - 1);
    }
}

DiscreteMeasure DiscreteMeasure::point_mass(Point x, double mass)
{
    const int n = static_cast<int>(x.size());
    return DiscreteMeasure(n, {Atom{std::move(x), mass}});
}

DiscreteMeasure DiscreteMeasure::scaled(double s) const
{
    if (!(s > 0.0)) throw PreconditionError("DiscreteMeasure::scaled: factor must be positive");
    auto atoms = atoms_;
    for (auto& a : atoms) a.mass *= s;
    std::optional<DensityPart> d = density_;
    if (d) {
        if (auto* rd = std::get_if<RadialDensityPart>(&*d)) rd->profile = rd->profile.scaled(s);
        else if (auto* gd = std::get_if<GridDensityPart>(&*d)) {
            auto v = gd->field.values();
            for (auto& x : v) x *= s;
            gd->field = gd->field.with_values(std::move(v), gd->field.description());
        } else if (auto* bd = std::get_if<BoxDensityPart>(&*d)) bd->value *= s;
        else if (auto* hd = std::get_if<HyperplaneDiskPart>(&*d)) hd->value *= s;
    }
    return DiscreteMeasure(n_, std::move(atoms), std::move(d));
}

DiscreteMeasure DiscreteMeasure::with_atom(Atom atom) const
{
    auto atoms = atoms_;
    atoms.push_back(std::move(atom));
    return DiscreteMeasure(n_, std::move(atoms), density_);
}

DiscreteMeasure::Box DiscreteMeasure::support_box() const
{
    Box b;
    bool any = false;
    auto extend = [&](const Point& lo, const Point& hi) {
        if (!any) {
            b.lo = lo;
            b.hi = hi;
            any = true;
            return;
        }
        for (std::size_t i = 0; i < lo.size(); ++i) {
            b.lo[i] = std::min(b.lo[i], lo[i]);
            b.hi[i] = std::max(b.hi[i], hi[i]);
        }
    };
    for (const auto& a : atoms_) extend(a.x, a.x);
    if (density_) {
        if (auto* rd = std::get_if<RadialDensityPart>(&*density_)) {
            Point lo = rd->center, hi = rd->center;
            for (std::size_t i = 0; i < lo.size(); ++i) {
                lo[i] -= rd->profile.support;
                hi[i] += rd->profile.support;
            }
            extend(lo, hi);
        } else if (auto* gd = std::get_if<GridDensityPart>(&*density_)) {
            const auto gb = grid_box(gd->field);
            extend(gb.lo, gb.hi);
        } else if (auto* bd = std::get_if<BoxDensityPart>(&*density_)) {
            extend(bd->lo, bd->hi);
        } else if (auto* hd = std::get_if<HyperplaneDiskPart>(&*density_)) {
            Point lo = hd->center, hi = hd->center;
            for (std::size_t i = 0; i < lo.size(); ++i) {
                if (static_cast<int>(i) == hd->axis) continue;
                lo[i] -= hd->radius;
                hi[i] += hd->radius;
            }
            extend(lo, hi);
        }
    }
    if (!any) {
        b.lo.assign(static_cast<std::size_t>(n_), 0.0);
        b.hi.assign(static_cast<std::size_t>(n_), 0.0);
    }
    return b;
}

double DiscreteMeasure::diameter() const
{
    const auto b = support_box();
    return distance(b.lo, b.hi);
}

std::optional<std::pair<double, double>> DiscreteMeasure::density_distance_range(const Point& x) const
{
    if (!density_) return std::nullopt;
    if (auto* rd = std::get_if<RadialDensityPart>(&*density_)) {
        const double d = distance(x, rd->center), a = rd->profile.support;
        return std::make_pair(std::max(0.0, d - a), d + a);
    }
    if (auto* gd = std::get_if<GridDensityPart>(&*density_)) {
        const auto gb = grid_box(gd->field);
        return box_distances(x, gb.lo, gb.hi);
    }
    if (auto* bd = std::get_if<BoxDensityPart>(&*density_)) return box_distances(x, bd->lo, bd->hi);
    const auto& hd = std::get<HyperplaneDiskPart>(*density_);
    const double dn = std::abs(x[static_cast<std::size_t>(hd.axis)] - hd.offset);
    const double e = in_plane_distance(x, hd);
    const double near = std::max(0.0, e - hd.radius);
    return std::make_pair(std::hypot(dn, near), std::hypot(dn, e + hd.radius));
}

std::vector<double> DiscreteMeasure::density_breaks(const Point& x) const
{
    std::vector<double> out;
    const auto range = density_distance_range(x);
    if (!range) return out;
    out.push_back(range->first);
    out.push_back(range->second);
    if (auto* rd = std::get_if<RadialDensityPart>(&*density_)) {
        const double d = distance(x, rd->center);
        std::vector<double> radii = rd->profile.breaks;
        radii.push_back(rd->profile.support);
        for (double b : radii) {
            out.push_back(std::abs(d - b));
            out.push_back(d + b);
        }
    } else if (auto* hd = std::get_if<HyperplaneDiskPart>(&*density_)) {
        const double dn = std::abs(x[static_cast<std::size_t>(hd->axis)] - hd->offset);
        const double e = in_plane_distance(x, *hd);
        out.push_back(std::hypot(dn, std::abs(hd->radius - e)));
    } else if (auto* bd = std::get_if<BoxDensityPart>(&*density_)) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.push_back(std::abs(x[i] - bd->lo[i]));
            out.push_back(std::abs(x[i] - bd->hi[i]));
        }
    }
    sort_unique(out);
    return out;
}

std::optional<Point> DiscreteMeasure::radial_center() const
{
    std::optional<Point> c;
    if (density_) {
        const auto* rd = std::get_if<RadialDensityPart>(&*density_);
        if (!rd) return std::nullopt;
        c = rd->center;
    }
    for (const auto& a : atoms_) {
        if (!c) c = a.x;
        else if (a.x != *c) return std::nullopt;
    }
    return c;
}

std::string DiscreteMeasure::describe() const
{
    std::string s = std::to_string(atoms_.size()) + " atoms";
    if (density_) {
        if (auto* rd = std::get_if<RadialDensityPart>(&*density_)) s += " + radial " + rd->profile.description;
        else if (std::holds_alternative<GridDensityPart>(*density_)) s += " + grid density";
        else if (std::holds_alternative<BoxDensityPart>(*density_)) s += " + box density";
        else s += " + hyperplane disk";
    }
    return s;
}

// ---------------------------------------------------------------------------

namespace {

double radial_part_mass(int n, const RadialDensityPart& rd, const Point& x, double t)
{
    if (t <= 0.0) return 0.0;
    const double d = distance(x, rd.center), a = rd.profile.support;
    const auto& f = rd.profile;
    const double sigma = unit_sphere_area(n);
    auto radial_cuts = [&](double lo, double hi) {
        std::vector<double> cuts;
        for (double b : f.breaks)
            if (b > lo && b < hi) cuts.push_back(b);
        return cuts;
    };
    double total = 0.0;
    const double full_hi = std::min(a, t - d);
    if (full_hi > 0.0)
        total += integrate_piecewise([&](double s) { return f(s) * std::pow(s, n - 1); }, 0.0, full_hi,
                                     radial_cuts(0.0, full_hi), 20);
    const double lo = std::max({0.0, d - t, t - d}), hi = std::min(a, d + t);
    if (hi > lo && d > 0.0)
        total += integrate_piecewise(
            [&](double s) { return f(s) * std::pow(s, n - 1) * sphere_cap_fraction(n, s, d, t); }, lo, hi,
            radial_cuts(lo, hi), 20);
    return sigma * total;
}

double grid_part_mass(const GridField& g, const Point& x, double t)
{
    if (t < 0.0) return 0.0;
    const auto& s = g.spec();
    const int n = s.n;
    const double h = s.spacing;
    const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(n));
    std::vector<int> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const double origin = s.center[ua] - 0.5 * (s.shape[ua] - 1) * h;
        lo[ua] = std::max(0, static_cast<int>(std::floor((x[ua] - t - origin) / h)) - 1);
        hi[ua] = std::min(s.shape[ua] - 1, static_cast<int>(std::ceil((x[ua] + t - origin) / h)) + 1);
        if (lo[ua] > hi[ua]) return 0.0;
    }
    int sub_total = 1;
    for (int a = 0; a < n; ++a) sub_total *= 3;
    std::vector<int> idx = lo;
    double total = 0.0;
    while (true) {
        std::size_t node = 0;
        for (int a = 0; a < n; ++a) node += static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]) * g.stride(a);
        const double w = g.cell_weight(node);
        if (w > 0.0 && g[node] > 0.0) {
            const auto y = g.coords(node);
            const double dist = distance(x, y);
            double frac = 0.0;
            if (dist + half_diag <= t) {
                frac = 1.0;
            } else if (dist - half_diag <= t) {
                int inside = 0;
                for (int sc = 0; sc < sub_total; ++sc) {
                    int code = sc;
                    double e2 = 0.0;
                    for (int a = 0; a < n; ++a) {
                        const auto ua = static_cast<std::size_t>(a);
                        const double off = (code % 3 - 1) * h / 3.0;
                        code /= 3;
                        const double dy = y[ua] + off - x[ua];
                        e2 += dy * dy;
                    }
                    if (e2 <= t * t) ++inside;
                }
                frac = static_cast<double>(inside) / sub_total;
            }
            total += g[node] * w * frac;
        }
        int a = n - 1;
        while (a >= 0) {
            const auto ua = static_cast<std::size_t>(a);
            if (++idx[ua] <= hi[ua]) break;
            idx[ua] = lo[ua];
            --a;
        }
        if (a < 0) break;
    }
    return total * std::pow(h, n);
}

double density_mass_in_ball(const DiscreteMeasure& mu, const Point& x, double t)
{
    const auto& d = mu.density();
    if (!d || t <= 0.0) return 0.0;
    if (auto* rd = std::get_if<RadialDensityPart>(&*d)) return radial_part_mass(mu.dim(), *rd, x, t);
    if (auto* gd = std::get_if<GridDensityPart>(&*d)) return grid_part_mass(gd->field, x, t);
    if (auto* bd = std::get_if<BoxDensityPart>(&*d)) return bd->value * ball_box_volume(x, t, bd->lo, bd->hi);
    const auto& hd = std::get<HyperplaneDiskPart>(*d);
    const double dn = std::abs(x[static_cast<std::size_t>(hd.axis)] - hd.offset);
    if (t <= dn) return 0.0;
    const double rho = std::sqrt(t * t - dn * dn);
    return hd.value * lens_volume(mu.dim() - 1, rho, hd.radius, in_plane_distance(x, hd));
}

} // namespace

double ball_mass(const DiscreteMeasure& mu, const Point& x, double t)
{
    check_point(mu.dim(), x, "ball_mass");
    if (t < 0.0) throw PreconditionError("ball_mass: radius must be nonnegative");
    double m = 0.0;
    for (const auto& a : mu.atoms())
        if (distance(a.x, x) <= t) m += a.mass;
    return m + density_mass_in_ball(mu, x, t);
}

double integrate_radial(const DiscreteMeasure& mu, const Point& c, const std::function<double(double)>& g,
                        double support)
{
    check_point(mu.dim(), c, "integrate_radial");
    const int n = mu.dim();
    double total = 0.0;
    for (const auto& a : mu.atoms()) {
        const double d = distance(a.x, c);
        if (d <= support) total += a.mass * g(d);
    }
    const auto& dens = mu.density();
    if (!dens) return total;
    if (auto* rd = std::get_if<RadialDensityPart>(&*dens); rd && distance(rd->center, c) == 0.0) {
        const double hi = std::min(rd->profile.support, support);
        std::vector<double> cuts;
        for (double b : rd->profile.breaks)
            if (b > 0.0 && b < hi) cuts.push_back(b);
        return total + unit_sphere_area(n) * integrate_piecewise(
                                                 [&](double s) { return rd->profile(s) * g(s) * std::pow(s, n - 1); },
                                                 0.0, hi, cuts, 20);
    }
    if (auto* gd = std::get_if<GridDensityPart>(&*dens)) {
        const auto& f = gd->field;
        std::vector<double> terms;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f.cell_weight(i) <= 0.0) continue;
            const double d = distance(f.coords(i), c);
            if (d <= support) terms.push_back(f[i] * f.cell_weight(i) * g(d));
        }
        return total + pairwise_sum(terms) * std::pow(f.spacing(), n);
    }
    // Stieltjes sum against s -> density mass of B_s(c).
    const auto range = *mu.density_distance_range(c);
    const double lo = range.first, hi = std::min(range.second, support);
    if (!(hi > lo)) return total;
    constexpr int steps = 2000;
    double prev_m = density_mass_in_ball(mu, c, lo), prev_g = g(lo), acc = 0.0;
    for (int j = 1; j <= steps; ++j) {
        const double s = lo + (hi - lo) * j / steps;
        const double m = density_mass_in_ball(mu, c, s), gv = g(s);
        acc += 0.5 * (prev_g + gv) * (m - prev_m);
        prev_m = m;
        prev_g = gv;
    }
    return total + acc;
}

// ---------------------------------------------------------------------------

PotentialParams PotentialParams::for_hessian(int k, double truncation)
{
    if (k < 1) throw PreconditionError("PotentialParams: order k must be >= 1");
    PotentialParams p;
    p.alpha = 2.0 * k / (k + 1.0);
    p.p = k + 1.0;
    p.truncation = truncation;
    return p;
}

void PotentialParams::validate(int n) const
{
    if (!(alpha > 0.0) || !(p > 1.0) || !(alpha * p > 0.0))
        throw PreconditionError("potential parameters need alpha > 0 and p > 1");
    if (alpha >= n) throw PreconditionError("potential order alpha must be below the dimension n");
    if (!(truncation > 0.0)) throw PreconditionError("potential truncation radius must be positive");
    if (t_points_per_decade < 8) throw PreconditionError("potential quadrature needs >= 8 points per decade");
}

double wolff(const DiscreteMeasure& mu, const Point& x, const PotentialParams& params)
{
    const int n = mu.dim();
    check_point(n, x, "wolff");
    params.validate(n);
    const double ap = params.alpha * params.p;
    const double inv = 1.0 / (params.p - 1.0);
    const double beta = (ap - n) * inv;
    const double big_r = params.truncation;
    if (mu.total_mass() <= 0.0) return 0.0;
    if (!std::isfinite(big_r) && beta >= 0.0)
        throw NumericalError("wolff: untruncated integral diverges at infinity because n <= alpha p (n=" +
                             std::to_string(n) + ", alpha p=" + std::to_string(ap) + ")");

    std::vector<std::pair<double, double>> atoms;
    double at_x = 0.0;
    for (const auto& a : mu.atoms()) {
        const double d = distance(a.x, x);
        atoms.emplace_back(d, a.mass);
        if (d == 0.0) at_x += a.mass;
    }
    if (at_x > 0.0 && beta <= 0.0) return inf;

    const auto range = mu.density_distance_range(x);
    const double ta = range ? range->first : 0.0, tb = range ? range->second : 0.0;
    const double dens_total = mu.density_mass();
    std::vector<double> cuts{0.0};
    for (const auto& [d, m] : atoms)
        if (d > 0.0 && d < big_r) cuts.push_back(d);
    if (range && dens_total > 0.0)
        for (double b : mu.density_breaks(x))
            if (b > 0.0 && b < big_r) cuts.push_back(b);
    sort_unique(cuts);
    cuts.push_back(big_r);

    auto atoms_within = [&](double t) {
        double m = 0.0;
        for (const auto& [d, mass] : atoms)
            if (d <= t) m += mass;
        return m;
    };
    // Cancellation in lens volumes can leave a tiny negative mass near t = ta.
    auto integrand = [&](double t) { return std::pow(std::max(ball_mass(mu, x, t), 0.0) * std::pow(t, ap - n), inv); };

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double t1 = cuts[i], t2 = cuts[i + 1];
        const bool varying = range && dens_total > 0.0 && t1 >= ta && t2 <= tb && t2 > t1;
        if (!varying) {
            const double m = atoms_within(t1) + (range && t1 >= tb ? dens_total : 0.0);
            if (m <= 0.0) continue;
            const double mi = std::pow(m, inv);
            if (beta == 0.0) total += mi * std::log(t2 / t1);
            else if (!std::isfinite(t2)) total += mi * std::pow(t1, beta) / (-beta);
            else total += mi * (std::pow(t2, beta) - std::pow(t1, beta)) / beta;
            continue;
        }
        double start = t1;
        if (t1 == 0.0) {
            start = 1e-4 * t2;
            const double m0 = ball_mass(mu, x, start);
            if (m0 > 0.0) {
                if (at_x > 0.0) total += std::pow(m0, inv) * std::pow(start, beta) / beta;
                else total += std::pow(m0 * std::pow(start, ap - n), inv) / (ap * inv);
            }
        }
        const double decades = std::log10(t2 / start);
        int count = std::max(17, static_cast<int>(std::ceil(params.t_points_per_decade * decades)));
        if (count % 2 == 0) ++count;
        std::vector<double> lt(static_cast<std::size_t>(count)), y(static_cast<std::size_t>(count));
        const double l1 = std::log(start), l2 = std::log(t2);
        for (int j = 0; j < count; ++j) {
            lt[static_cast<std::size_t>(j)] = l1 + (l2 - l1) * j / (count - 1);
            y[static_cast<std::size_t>(j)] = integrand(std::exp(lt[static_cast<std::size_t>(j)]));
        }
        total += simpson(lt, y);
    }
    return total;
}

// ---------------------------------------------------------------------------

namespace {

// sigma_{n-2} int_0^pi (rho^2 + s^2 - 2 rho s cos phi)^{(alpha-n)/2} sin^{n-2} phi dphi:
// the integral of |x - y|^{alpha-n} over the unit-normalized sphere |y| = s
// (without the s^{n-1} factor), |x| = rho.
double sphere_kernel(int n, double rho, double s, double alpha)
{
    const double e = 0.5 * (alpha - n);
    if (rho == 0.0) return unit_sphere_area(n) * std::pow(s, alpha - n);
    if (s == 0.0) return unit_sphere_area(n) * std::pow(rho, alpha - n);
    const double diff2 = (rho - s) * (rho - s);
    auto f = [&](double phi) {
        const double sh = std::sin(0.5 * phi);
        return std::pow(diff2 + 4.0 * rho * s * sh * sh, e) * std::pow(std::sin(phi), n - 2);
    };
    const double phi0 = std::abs(rho - s) / std::sqrt(rho * s);
    double acc = 0.0;
    if (phi0 >= 1.0) {
        acc = integrate_gauss(f, 0.0, std::numbers::pi, 20);
    } else {
        double a = 0.0, b = std::max(phi0, 1e-12);
        while (b < std::numbers::pi) {
            acc += integrate_gauss(f, a, b, 10);
            a = b;
            b *= 4.0;
        }
        acc += integrate_gauss(f, a, std::numbers::pi, 10);
    }
    return unit_sphere_area(n - 1) * acc;
}

// Breakpoints grading toward rho inside [lo, hi].
std::vector<double> graded_cuts(double rho, double lo, double hi, const std::vector<double>& extra)
{
    std::vector<double> cuts;
    for (double b : extra)
        if (b > lo && b < hi) cuts.push_back(b);
    if (rho > lo && rho < hi) cuts.push_back(rho);
    for (int j = 1; j <= 10; ++j) {
        const double off = rho * std::ldexp(1.0, -j);
        for (double c : {rho - off, rho + off})
            if (c > lo && c < hi) cuts.push_back(c);
    }
    sort_unique(cuts);
    return cuts;
}

double riesz_radial_part(int n, const RadialDensityPart& rd, const Point& x, double alpha)
{
    const double rho = distance(x, rd.center), a = rd.profile.support;
    const auto cuts = graded_cuts(rho, 0.0, a, rd.profile.breaks);
    return integrate_piecewise(
        [&](double s) { return rd.profile(s) * std::pow(s, n - 1) * sphere_kernel(n, rho, s, alpha); }, 0.0, a,
        cuts, 10);
}

double riesz_grid_part(const GridField& g, const Point& x, double alpha)
{
    const int n = g.dim();
    const double h = g.spacing();
    const double rc = std::pow(std::pow(h, n) / unit_ball_volume(n), 1.0 / n);
    std::vector<double> terms;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = g.cell_weight(i);
        if (w <= 0.0 || g[i] == 0.0) continue;
        const double d = distance(g.coords(i), x);
        // Inside the equal-volume ball of the cell use the kernel's ball average.
        const double kernel = d < 0.5 * h ? n / alpha * std::pow(rc, alpha - n) : std::pow(d, alpha - n);
        terms.push_back(g[i] * w * kernel);
    }
    return pairwise_sum(terms) * std::pow(h, n);
}

} // namespace

double riesz(const DiscreteMeasure& mu, const Point& x, double alpha)
{
    const int n = mu.dim();
    check_point(n, x, "riesz");
    if (!(alpha > 0.0) || !(alpha < n)) throw PreconditionError("riesz: need 0 < alpha < n");
    double total = 0.0;
    for (const auto& a : mu.atoms()) {
        const double d = distance(a.x, x);
        if (d == 0.0) return inf;
        total += a.mass * std::pow(d, alpha - n);
    }
    const auto& dens = mu.density();
    if (!dens) return total;
    if (auto* rd = std::get_if<RadialDensityPart>(&*dens)) return total + riesz_radial_part(n, *rd, x, alpha);
    if (auto* gd = std::get_if<GridDensityPart>(&*dens)) return total + riesz_grid_part(gd->field, x, alpha);
    throw PreconditionError("riesz: box and hyperplane densities are not supported");
}

namespace {

struct InnerTable {
    std::vector<double> log_s, log_g;
    double slope_lo = 0.0;
};

double inner_value(const InnerTable& tab, double mass, double alpha, int n, double inv, double s)
{
    const double ls = std::log(s);
    if (ls <= tab.log_s.front()) return std::exp(tab.log_g.front() + tab.slope_lo * (ls - tab.log_s.front()));
    if (ls >= tab.log_s.back()) return std::pow(mass * std::pow(s, alpha - n), inv);
    auto it = std::upper_bound(tab.log_s.begin(), tab.log_s.end(), ls);
    const auto j = static_cast<std::size_t>(it - tab.log_s.begin()) - 1;
    const double w = (ls - tab.log_s[j]) / (tab.log_s[j + 1] - tab.log_s[j]);
    return std::exp(tab.log_g[j] + w * (tab.log_g[j + 1] - tab.log_g[j]));
}

std::vector<double> havin_mazya_radial(const DiscreteMeasure& mu, const Point& c, const std::vector<Point>& xs,
                                       const PotentialParams& params)
{
    const int n = mu.dim();
    const double alpha = params.alpha, inv = 1.0 / (params.p - 1.0);
    const double beta = (alpha * params.p - n) * inv;
    const double mass = mu.total_mass();
    double scale = 1.0;
    if (mu.density()) scale = std::get<RadialDensityPart>(*mu.density()).profile.support;
    double rho_min = scale, rho_max = scale;
    std::vector<double> rhos;
    for (const auto& x : xs) {
        const double r = distance(x, c);
        rhos.push_back(r);
        if (r > 0.0) rho_min = std::min(rho_min, r);
        rho_max = std::max(rho_max, r);
    }
    const double s_min = 1e-3 * rho_min, s_max = 1e3 * rho_max;

    InnerTable tab;
    const int per_decade = 40;
    const int count = static_cast<int>(std::ceil(per_decade * std::log10(s_max / s_min))) + 1;
    for (double s : geometric_grid(s_min, s_max, count)) {
        Point y = c;
        y[0] += s;
        tab.log_s.push_back(std::log(s));
        tab.log_g.push_back(inv * std::log(riesz(mu, y, alpha)));
    }
    tab.slope_lo = (tab.log_g[1] - tab.log_g[0]) / (tab.log_s[1] - tab.log_s[0]);

    std::vector<double> decade_cuts;
    for (double b = s_min * 10.0; b < s_max; b *= 10.0) decade_cuts.push_back(b);
    if (mu.density()) {
        const auto& prof = std::get<RadialDensityPart>(*mu.density()).profile;
        decade_cuts.push_back(prof.support);
        for (double b : prof.breaks) decade_cuts.push_back(b);
    }
    const double sigma = unit_sphere_area(n);
    std::vector<double> out;
    for (double rho : rhos) {
        const double g_min = std::exp(tab.log_g.front());
        double total = 0.0;
        // Inner piece where the sphere kernel is frozen at s = 0 (or exact at rho = 0).
        if (rho == 0.0) total += sigma * g_min * std::pow(s_min, alpha) / (alpha + tab.slope_lo);
        else total += sigma * std::pow(rho, alpha - n) * g_min * std::pow(s_min, n) / (n + tab.slope_lo);
        const auto cuts = graded_cuts(rho, s_min, s_max, decade_cuts);
        total += integrate_piecewise(
            [&](double s) {
                return inner_value(tab, mass, alpha, n, inv, s) * std::pow(s, n - 1) * sphere_kernel(n, rho, s, alpha);
            },
            s_min, s_max, cuts, 10);
        total += sigma * std::pow(mass, inv) * std::pow(s_max, beta) / (-beta);
        out.push_back(total);
    }
    return out;
}

std::vector<double> havin_mazya_atoms(const DiscreteMeasure& mu, const std::vector<Point>& xs,
                                      const PotentialParams& params)
{
    const int n = mu.dim();
    const double alpha = params.alpha, inv = 1.0 / (params.p - 1.0);
    const double beta = (alpha * params.p - n) * inv;
    const double mass = mu.total_mass();
    const double sigma = unit_sphere_area(n);

    // Fixed direction set (antithetic pairs) from a fixed seed.
    constexpr int pairs = 1024;
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> normal;
    std::vector<Point> dirs;
    for (int i = 0; i < pairs; ++i) {
        Point d(static_cast<std::size_t>(n));
        double norm = 0.0;
        for (auto& v : d) {
            v = normal(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : d) v /= norm;
        Point neg = d;
        for (auto& v : neg) v = -v;
        dirs.push_back(std::move(d));
        dirs.push_back(std::move(neg));
    }
    auto g = [&](const Point& y) {
        double s = 0.0;
        for (const auto& a : mu.atoms()) s += a.mass * std::pow(distance(a.x, y), alpha - n);
        return std::pow(s, inv);
    };

    std::vector<double> out;
    for (const auto& x : xs) {
        double near = inf, far = 0.0;
        for (const auto& a : mu.atoms()) {
            const double d = distance(a.x, x);
            near = std::min(near, d);
            far = std::max(far, d);
        }
        if (near == 0.0) {
            out.push_back(inf);
            continue;
        }
        const double r_min = 1e-4 * near, r_max = 1e3 * far;
        int count = static_cast<int>(std::ceil(40 * std::log10(r_max / r_min))) + 1;
        if (count % 2 == 0) ++count;
        const auto radii = geometric_grid(r_min, r_max, count);
        std::vector<double> lr, y;
        Point p(static_cast<std::size_t>(n));
        for (double r : radii) {
            std::vector<double> vals;
            vals.reserve(dirs.size());
            for (const auto& d : dirs) {
                for (std::size_t i = 0; i < p.size(); ++i) p[i] = x[i] + r * d[i];
                vals.push_back(g(p));
            }
            lr.push_back(std::log(r));
            y.push_back(sigma * std::pow(r, alpha) * pairwise_sum(vals) / static_cast<double>(vals.size()));
        }
        double total = simpson(lr, y);
        total += sigma * g(x) * std::pow(r_min, alpha) / alpha;
        total += sigma * std::pow(mass, inv) * std::pow(r_max, beta) / (-beta);
        out.push_back(total);
    }
    return out;
}

} // namespace

std::vector<double> havin_mazya(const DiscreteMeasure& mu, const std::vector<Point>& xs, const PotentialParams& params)
{
    const int n = mu.dim();
    params.validate(n);
    for (const auto& x : xs) check_point(n, x, "havin_mazya");
    if (n < 2) throw PreconditionError("havin_mazya: need n >= 2");
    if (!(n > params.alpha * params.p))
        throw PreconditionError("havin_mazya: the global potential needs n > alpha p");
    if (mu.total_mass() <= 0.0) return std::vector<double>(xs.size(), 0.0);
    if (auto c = mu.radial_center()) return havin_mazya_radial(mu, *c, xs, params);
    if (mu.density()) throw PreconditionError("havin_mazya: non-radial densities are not supported");
    return havin_mazya_atoms(mu, xs, params);
}

double havin_mazya(const DiscreteMeasure& mu, const Point& x, const PotentialParams& params)
{
    return havin_mazya(mu, std::vector<Point>{x}, params).front();
}

double wolff_energy(const DiscreteMeasure& mu, const PotentialParams& params)
{
    const int n = mu.dim();
    params.validate(n);
    const double beta = (params.alpha * params.p - n) / (params.p - 1.0);
    if (!mu.atoms().empty() && beta <= 0.0) return inf;
    double total = 0.0;
    for (const auto& a : mu.atoms()) total += a.mass * wolff(mu, a.x, params);
    const auto& dens = mu.density();
    if (!dens) return total;
    if (auto* rd = std::get_if<RadialDensityPart>(&*dens)) {
        if (!mu.radial_center())
            throw PreconditionError("wolff_energy: radial density with off-center atoms is not supported");
        std::vector<double> cuts;
        for (double b : rd->profile.breaks)
            if (b > 0.0 && b < rd->profile.support) cuts.push_back(b);
        return total + unit_sphere_area(n) * integrate_piecewise(
                                                 [&](double s) {
                                                     Point y = rd->center;
                                                     y[0] += s;
                                                     return rd->profile(s) * std::pow(s, n - 1) * wolff(mu, y, params);
                                                 },
                                                 0.0, rd->profile.support, cuts, 20);
    }
    if (auto* gd = std::get_if<GridDensityPart>(&*dens)) {
        const auto& f = gd->field;
        std::vector<double> terms;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f.cell_weight(i) > 0.0 && f[i] > 0.0)
                terms.push_back(f[i] * f.cell_weight(i) * wolff(mu, f.coords(i), params));
        return total + pairwise_sum(terms) * std::pow(f.spacing(), n);
    }
    if (auto* bd = std::get_if<BoxDensityPart>(&*dens)) {
        const auto& rule = gauss_rule(7);
        const std::size_t m = rule.nodes.size();
        std::size_t count = 1;
        for (int i = 0; i < n; ++i) count *= m;
        std::vector<double> terms;
        Point y(static_cast<std::size_t>(n));
        for (std::size_t code = 0; code < count; ++code) {
            std::size_t rem = code;
            double w = bd->value;
            for (int i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                const std::size_t j = rem % m;
                rem /= m;
                const double half = 0.5 * (bd->hi[ui] - bd->lo[ui]);
                y[ui] = bd->lo[ui] + half * (1.0 + rule.nodes[j]);
                w *= half * rule.weights[j];
            }
            terms.push_back(w * wolff(mu, y, params));
        }
        return total + pairwise_sum(terms);
    }
    throw PreconditionError("wolff_energy: hyperplane densities are not supported");
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Point> scan_centers(const DiscreteMeasure& mu, int per_axis)
{
    std::vector<Point> centers;
    for (const auto& a : mu.atoms()) centers.push_back(a.x);
    if (const auto& d = mu.density()) {
        if (auto* rd = std::get_if<RadialDensityPart>(&*d)) centers.push_back(rd->center);
        else if (auto* gd = std::get_if<GridDensityPart>(&*d)) centers.push_back(gd->field.spec().center);
        else if (auto* hd = std::get_if<HyperplaneDiskPart>(&*d)) centers.push_back(hd->center);
        else if (auto* bd = std::get_if<BoxDensityPart>(&*d)) {
            Point c(bd->lo.size());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (bd->lo[i] + bd->hi[i]);
            centers.push_back(c);
        }
    }
    const auto box = mu.support_box();
    const int n = mu.dim();
    std::vector<int> counts(static_cast<std::size_t>(n));
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        counts[ua] = box.hi[ua] > box.lo[ua] ? per_axis : 1;
        total *= static_cast<std::size_t>(counts[ua]);
    }
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rem = code;
        Point c(static_cast<std::size_t>(n));
        for (int a = n - 1; a >= 0; --a) {
            const auto ua = static_cast<std::size_t>(a);
            const auto m = static_cast<std::size_t>(counts[ua]);
            const double frac = (static_cast<double>(rem % m) + 0.5) / static_cast<double>(m);
            rem /= m;
            c[ua] = box.lo[ua] + frac * (box.hi[ua] - box.lo[ua]);
        }
        centers.push_back(std::move(c));
    }
    std::vector<Point> unique;
    for (auto& c : centers)
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(std::move(c));
    return unique;
}

} // namespace

SupremumResult scan_balls(const DiscreteMeasure& mu, const std::function<double(double)>& denominator,
                          const BallScanOptions& options)
{
    SupremumResult res;
    if (mu.total_mass() <= 0.0) return res;
    const int n = mu.dim();
    double diam = mu.diameter();
    if (!(diam > 0.0)) diam = 1.0;
    double r_min = options.min_radius;
    if (!(r_min > 0.0)) {
        r_min = diam / 1024.0;
        if (const auto& d = mu.density())
            if (auto* gd = std::get_if<GridDensityPart>(&*d)) r_min = gd->field.spacing();
    }
    const double r_max = options.max_radius > 0.0 ? options.max_radius : 4.0 * diam;
    int per_axis = options.lattice_per_axis;
    if (per_axis <= 0) per_axis = std::max(2, static_cast<int>(std::lround(std::pow(125.0, 1.0 / n))));

    std::vector<double> radii;
    for (double r = r_min; r <= r_max * (1.0 + 1e-12) || radii.size() < 3; r *= 2.0) radii.push_back(r);

    for (const auto& c : scan_centers(mu, per_axis)) {
        std::vector<double> ratios;
        for (double r : radii) {
            const double ratio = ball_mass(mu, c, r) / denominator(r);
            ++res.balls;
            ratios.push_back(ratio);
            if (ratio > res.value && !res.divergent) {
                res.value = ratio;
                res.center = c;
                res.radius = r;
            }
        }
        const double g = options.growth;
        if (ratios[0] > 0.0 && ratios[0] > g * ratios[1] && ratios[1] > g * ratios[2] && !res.divergent) {
            res.divergent = true;
            res.value = inf;
            res.center = c;
            res.radius = radii[0];
        }
    }
    return res;
}

SupremumResult adams_kappa(const DiscreteMeasure& omega, double q, int k, const BallScanOptions& options)
{
    const int n = omega.dim();
    if (!(q > 0.0)) throw PreconditionError("adams_kappa: q must be positive");
    if (!(2 * k < n)) throw PreconditionError("adams_kappa: requires 2k < n");
    const double theta = (1.0 - 2.0 * k / n) * q / (k + 1.0);
    const double vol = unit_ball_volume(n);
    return scan_balls(omega, [&](double r) { return std::pow(vol * std::pow(r, n), theta); }, options);
}

namespace {

DiscreteMeasure density_power(const DiscreteMeasure& w, double s)
{
    if (!w.atoms().empty()) throw PreconditionError("fefferman_phong_check: the weight must not carry atoms");
    const auto& d = w.density();
    if (!d) return w;
    if (auto* rd = std::get_if<RadialDensityPart>(&*d))
        return DiscreteMeasure(w.dim(), {}, RadialDensityPart{rd->center, rd->profile.power(s)});
    if (auto* gd = std::get_if<GridDensityPart>(&*d)) {
        auto v = gd->field.values();
        for (auto& x : v) x = x > 0.0 ? std::pow(x, s) : 0.0;
        return DiscreteMeasure(w.dim(), {}, GridDensityPart{gd->field.with_values(std::move(v))});
    }
    if (auto* bd = std::get_if<BoxDensityPart>(&*d))
        return DiscreteMeasure(w.dim(), {}, BoxDensityPart{bd->lo, bd->hi, std::pow(bd->value, s)});
    throw PreconditionError("fefferman_phong_check: the weight must be absolutely continuous");
}

} // namespace

SupremumResult fefferman_phong_check(const DiscreteMeasure& w, double eps, int k, const BallScanOptions& options)
{
    const int n = w.dim();
    if (!(eps > 0.0)) throw PreconditionError("fefferman_phong_check: eps must be positive");
    if (k < 1 || k > n) throw PreconditionError("fefferman_phong_check: need 1 <= k <= n");
    const DiscreteMeasure wp = density_power(w, 1.0 + eps);
    const double e = n - 2.0 * k * (1.0 + eps);
    return scan_balls(wp, [&](double r) { return std::pow(r, e); }, options);
}

RefinementResult fefferman_phong_refine(const std::vector<DiscreteMeasure>& refinements, double eps, int k,
                                        const BallScanOptions& options)
{
    if (refinements.size() < 3) throw PreconditionError("fefferman_phong_refine: need at least 3 refinements");
    RefinementResult out;
    for (const auto& w : refinements) {
        const auto r = fefferman_phong_check(w, eps, k, options);
        out.sups.push_back(r.value);
        if (r.divergent) out.divergent = true;
    }
    const std::size_t m = out.sups.size();
    const double d1 = out.sups[m - 2] - out.sups[m - 3];
    const double d2 = out.sups[m - 1] - out.sups[m - 2];
    const double scale = std::max(std::abs(out.sups[m - 1]), 1e-300);
    if (d1 > 1e-9 * scale && d2 >= 0.9 * d1) out.divergent = true;
    return out;
}

} // namespace hesskit
