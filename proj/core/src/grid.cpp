#include "hesskit/grid.hpp"

#include "hesskit/error.hpp"
#include "hesskit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace hesskit {

namespace {

constexpr int max_grid_dim = 4;

using Mat4 = std::array<std::array<double, max_grid_dim>, max_grid_dim>;

// S_0..S_n of a small symmetric matrix from the power sums tr(r^m) via the
// Newton identities. Polynomial in the entries, so exact for quadratics.
std::array<double, max_grid_dim + 1> small_elem_sym(const Mat4& r, int n)
{
    std::array<double, max_grid_dim + 1> p{};
    Mat4 pw = r;
    for (int m = 1; m <= n; ++m) {
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += pw[i][i];
        p[m] = tr;
        if (m == n) break;
        Mat4 next{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += pw[i][l] * r[l][j];
                next[i][j] = s;
            }
        pw = next;
    }
    std::array<double, max_grid_dim + 1> s{};
    s[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double acc = 0.0;
        for (int i = 1; i <= m; ++i) acc += ((i % 2) ? 1.0 : -1.0) * s[m - i] * p[i];
        s[m] = acc / m;
    }
    return s;
}

// S_k^{ij} through the Newton tensors T_0 = I, T_m = S_m I - r T_{m-1}.
Mat4 small_sigma_grad(const Mat4& r, int n, int k)
{
    const auto s = small_elem_sym(r, n);
    Mat4 t{};
    for (int i = 0; i < n; ++i) t[i][i] = 1.0;
    for (int m = 1; m < k; ++m) {
        Mat4 next{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int l = 0; l < n; ++l) acc += r[i][l] * t[l][j];
                next[i][j] = (i == j ? s[m] : 0.0) - acc;
            }
        t = next;
    }
    // T is a polynomial in r and therefore symmetric; enforce it bitwise.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) t[j][i] = t[i][j] = 0.5 * (t[i][j] + t[j][i]);
    return t;
}

Mat4 to_mat(const HessianField& h, std::size_t node)
{
    Mat4 m{};
    const int n = h.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m[i][j] = m[j][i] = h.entry(node, i, j);
    return m;
}

Mat4 combine(const HessianField& a, const HessianField& b, double t, std::size_t node)
{
    Mat4 m{};
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m[i][j] = m[j][i] = a.entry(node, i, j) + t * b.entry(node, i, j);
    return m;
}

double sigma_of(const Mat4& m, int n, int k)
{
    return small_elem_sym(m, n)[static_cast<std::size_t>(k)];
}

void check_k(int n, int k, const char* op)
{
    if (k < 0 || k > n)
        throw PreconditionError(std::string(op) + ": order k=" + std::to_string(k) + " outside [0, " +
                                std::to_string(n) + "]");
}

void check_same(const GridField& a, const GridField& b, const char* op)
{
    if (!a.same_grid(b)) throw PreconditionError(std::string(op) + ": fields live on different grids");
}

std::string describe_node(const GridField& u, std::size_t node)
{
    const auto x = u.coords(node);
    std::string s = "node " + std::to_string(node) + " at (";
    for (std::size_t a = 0; a < x.size(); ++a) {
        if (a) s += ", ";
        s += std::to_string(x[a]);
    }
    return s + ")";
}

// Weighted footprint sum of per-node values, in node order.
double footprint_sum(const GridField& g, const std::vector<double>& per_node)
{
    std::vector<double> terms;
    terms.reserve(per_node.size());
    for (std::size_t i = 0; i < per_node.size(); ++i) {
        const double w = g.cell_weight(i);
        if (w > 0.0) terms.push_back(per_node[i] * w);
    }
    return pairwise_sum(terms) * std::pow(g.spacing(), g.dim());
}

} // namespace

GridSpec GridSpec::ball(int n, int cells_across, double radius, std::vector<double> center, int pad)
{
    if (cells_across < 2) throw PreconditionError("GridSpec::ball: need at least 2 cells across the ball");
    if (pad < 2) throw PreconditionError("GridSpec::ball: padding must be at least 2 nodes");
    GridSpec s;
    s.n = n;
    s.shape.assign(static_cast<std::size_t>(n), cells_across + 1 + 2 * pad);
    s.spacing = 2.0 * radius / cells_across;
    s.center = center.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0) : std::move(center);
    s.radius = radius;
    s.validate();
    return s;
}

std::size_t GridSpec::node_count() const
{
    std::size_t c = 1;
    for (int s : shape) c *= static_cast<std::size_t>(s);
    return c;
}

void GridSpec::validate() const
{
    if (n < 2 || n > max_grid_dim)
        throw PreconditionError("grid dimension must satisfy 2 <= n <= 4 (got " + std::to_string(n) + ")");
    if (shape.size() != static_cast<std::size_t>(n) || center.size() != static_cast<std::size_t>(n))
        throw PreconditionError("grid shape and center must have n entries");
    for (int s : shape)
        if (s < 3) throw PreconditionError("grid needs at least 3 nodes per axis");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw PreconditionError("grid spacing must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("ball radius must be positive");
}

GridField::GridField(GridSpec spec, std::vector<double> values, std::string description)
    : spec_(std::move(spec)), values_(std::move(values)), description_(std::move(description))
{
    spec_.validate();
    const std::size_t count = spec_.node_count();
    if (values_.size() != count)
        throw PreconditionError("GridField: expected " + std::to_string(count) + " values, got " +
                                std::to_string(values_.size()));
    const int n = spec_.n;
    strides_.assign(static_cast<std::size_t>(n), 1);
    for (int a = n - 2; a >= 0; --a)
        strides_[static_cast<std::size_t>(a)] =
            strides_[static_cast<std::size_t>(a) + 1] * static_cast<std::size_t>(spec_.shape[static_cast<std::size_t>(a) + 1]);

    mask_.assign(count, 0);
    weights_.assign(count, 0.0);
    const double h = spec_.spacing;
    const double big_r = spec_.radius;
    const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(n));
    int sub_total = 1;
    for (int a = 0; a < n; ++a) sub_total *= 3;

    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < count; ++i) {
        double d2 = 0.0;
        for (int a = 0; a < n; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            const int ia = static_cast<int>((i / strides_[ua]) % static_cast<std::size_t>(spec_.shape[ua]));
            x[ua] = spec_.center[ua] + (ia - 0.5 * (spec_.shape[ua] - 1)) * h;
            const double dx = x[ua] - spec_.center[ua];
            d2 += dx * dx;
        }
        const double d = std::sqrt(d2);
        if (!std::isfinite(values_[i]) && d < big_r)
            throw PreconditionError("GridField: non-finite value at masked " + std::to_string(i));
        mask_[i] = d < big_r ? 1 : 0;
        if (d + half_diag < big_r) {
            weights_[i] = 1.0;
        } else if (d - half_diag < big_r) {
            int inside = 0;
            for (int s = 0; s < sub_total; ++s) {
                double e2 = 0.0;
                int code = s;
                for (int a = 0; a < n; ++a) {
                    const auto ua = static_cast<std::size_t>(a);
                    const double off = (code % 3 - 1) * h / 3.0;
                    code /= 3;
                    const double y = x[ua] + off - spec_.center[ua];
                    e2 += y * y;
                }
                if (e2 < big_r * big_r) ++inside;
            }
            weights_[i] = static_cast<double>(inside) / sub_total;
        }
        if (weights_[i] > 0.0 && !std::isfinite(values_[i]))
            throw PreconditionError("GridField: non-finite value at footprint node " + std::to_string(i));
    }
}

GridField GridField::sample(const GridSpec& spec, const Function& f, std::string description)
{
    spec.validate();
    const std::size_t count = spec.node_count();
    std::vector<double> values(count);
    std::vector<double> x(static_cast<std::size_t>(spec.n));
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t rem = i;
        for (int a = spec.n - 1; a >= 0; --a) {
            const auto ua = static_cast<std::size_t>(a);
            const auto s = static_cast<std::size_t>(spec.shape[ua]);
            const int ia = static_cast<int>(rem % s);
            rem /= s;
            x[ua] = spec.center[ua] + (ia - 0.5 * (spec.shape[ua] - 1)) * spec.spacing;
        }
        values[i] = f(x);
    }
    return GridField(spec, std::move(values), std::move(description));
}

std::vector<int> GridField::multi_index(std::size_t i) const
{
    std::vector<int> idx(static_cast<std::size_t>(spec_.n));
    for (int a = 0; a < spec_.n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        idx[ua] = static_cast<int>((i / strides_[ua]) % static_cast<std::size_t>(spec_.shape[ua]));
    }
    return idx;
}

std::vector<double> GridField::coords(std::size_t i) const
{
    const auto idx = multi_index(i);
    std::vector<double> x(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        x[a] = spec_.center[a] + (idx[a] - 0.5 * (spec_.shape[a] - 1)) * spec_.spacing;
    return x;
}

bool GridField::has_stencil(std::size_t i) const
{
    for (int a = 0; a < spec_.n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const int ia = static_cast<int>((i / strides_[ua]) % static_cast<std::size_t>(spec_.shape[ua]));
        if (ia < 1 || ia > spec_.shape[ua] - 2) return false;
    }
    return true;
}

GridField GridField::with_values(std::vector<double> values, std::string description) const
{
    GridField g = *this;
    if (values.size() != values_.size()) throw PreconditionError("GridField::with_values: size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (weights_[i] > 0.0 && !std::isfinite(values[i]))
            throw PreconditionError("GridField: non-finite value at footprint node " + std::to_string(i));
    g.values_ = std::move(values);
    g.description_ = std::move(description);
    return g;
}

GridField GridField::axpy(double t, const GridField& other) const
{
    check_same(*this, other, "GridField::axpy");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + t * other.values_[i];
    return with_values(std::move(v), description_);
}

bool GridField::same_grid(const GridField& other) const
{
    return spec_.n == other.spec_.n && spec_.shape == other.spec_.shape && spec_.spacing == other.spec_.spacing &&
           spec_.center == other.spec_.center && spec_.radius == other.spec_.radius;
}

HessianField::HessianField(int n, std::size_t nodes)
    : n_(n), packed_(static_cast<std::size_t>(n * (n + 1) / 2)), data_(packed_ * nodes, 0.0), valid_(nodes, 0)
{
}

namespace {
std::size_t packed_index(int n, int i, int j)
{
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i * n - i * (i - 1) / 2 + (j - i));
}
} // namespace

double HessianField::entry(std::size_t node, int i, int j) const
{
    return data_[node * packed_ + packed_index(n_, i, j)];
}

void HessianField::set(std::size_t node, int i, int j, double v)
{
    data_[node * packed_ + packed_index(n_, i, j)] = v;
}

SymMatrix HessianField::at(std::size_t node) const
{
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) m(i, j) = m(j, i) = entry(node, i, j);
    return SymMatrix(std::move(m));
}

HessianField hessian_fd(const GridField& u)
{
    const int n = u.dim();
    const double h = u.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const auto& v = u.values();
    HessianField hess(n, u.size());
    for (std::size_t node = 0; node < u.size(); ++node) {
        if (!u.has_stencil(node)) {
            if (u.cell_weight(node) > 0.0)
                throw PreconditionError("hessian_fd: grid too small for stencil at " + describe_node(u, node));
            continue;
        }
        for (int i = 0; i < n; ++i) {
            const std::size_t si = u.stride(i);
            hess.set(node, i, i, (v[node + si] - 2.0 * v[node] + v[node - si]) * inv_h2);
            for (int j = i + 1; j < n; ++j) {
                const std::size_t sj = u.stride(j);
                const double cross =
                    v[node + si + sj] - v[node + si - sj] - v[node - si + sj] + v[node - si - sj];
                hess.set(node, i, j, 0.25 * cross * inv_h2);
            }
        }
        hess.mark_valid(node);
    }
    return hess;
}

std::vector<double> gradient_fd(const GridField& u, int axis)
{
    if (axis < 0 || axis >= u.dim()) throw PreconditionError("gradient_fd: axis out of range");
    const std::size_t s = u.stride(axis);
    const double inv = 0.5 / u.spacing();
    const auto& v = u.values();
    std::vector<double> g(u.size(), 0.0);
    for (std::size_t node = 0; node < u.size(); ++node)
        if (u.has_stencil(node)) g[node] = (v[node + s] - v[node - s]) * inv;
    return g;
}

GridField fk_field(const GridField& u, int k)
{
    return fk_field(u, hessian_fd(u), k);
}

GridField fk_field(const GridField& u, const HessianField& hess, int k)
{
    check_k(u.dim(), k, "fk_field");
    std::vector<double> f(u.size(), 0.0);
    for (std::size_t node = 0; node < u.size(); ++node) {
        if (u.cell_weight(node) <= 0.0 && !u.in_mask(node)) continue;
        f[node] = k == 0 ? 1.0 : sigma_of(to_mat(hess, node), u.dim(), k);
    }
    return u.with_values(std::move(f), "F_" + std::to_string(k) + "[" + u.description() + "]");
}

std::optional<NodeViolation> k_convexity_violation(const GridField& u, int k, double tol)
{
    check_k(u.dim(), k, "is_k_convex");
    const HessianField hess = hessian_fd(u);
    std::vector<std::array<double, max_grid_dim + 1>> s;
    s.reserve(u.size());
    double f1_scale = 0.0;
    for (std::size_t node = 0; node < u.size(); ++node) {
        if (!u.in_mask(node)) {
            s.push_back({});
            continue;
        }
        s.push_back(small_elem_sym(to_mat(hess, node), u.dim()));
        f1_scale = std::max(f1_scale, std::abs(s.back()[1]));
    }
    if (tol < 0.0) tol = 1e-8 * f1_scale;
    std::optional<NodeViolation> worst;
    for (int j = 1; j <= k; ++j) {
        for (std::size_t node = 0; node < u.size(); ++node) {
            if (!u.in_mask(node)) continue;
            const double fj = s[node][static_cast<std::size_t>(j)];
            if (fj < -tol && (!worst || fj < worst->value)) worst = NodeViolation{node, j, fj};
        }
        if (worst) return worst;
    }
    return worst;
}

bool is_k_convex(const GridField& u, int k, double tol)
{
    return !k_convexity_violation(u, k, tol).has_value();
}

double integrate(const GridField& f)
{
    return footprint_sum(f, f.values());
}

namespace {

void require_admissible(const GridField& u, int k, const char* op)
{
    if (auto bad = k_convexity_violation(u, k)) {
        throw PreconditionError(std::string(op) + ": field '" + u.description() + "' is not " +
                                std::to_string(k) + "-convex; F_" + std::to_string(bad->order) + " = " +
                                std::to_string(bad->value) + " at " + describe_node(u, bad->node));
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.in_mask(i)) scale = std::max(scale, std::abs(u[i]));
    const double tol = 1e-8 * scale;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.in_mask(i) && u[i] > tol)
            throw PreconditionError(std::string(op) + ": field '" + u.description() + "' is positive (" +
                                    std::to_string(u[i]) + ") at " + describe_node(u, i));
}

} // namespace

double hessian_energy(const GridField& u, int k)
{
    return mutual_energy(u, u, k);
}

double mutual_energy(const GridField& u, const GridField& v, int k)
{
    check_same(u, v, "mutual_energy");
    check_k(u.dim(), k, "mutual_energy");
    require_admissible(u, k, "mutual_energy");
    if (&u != &v) require_admissible(v, k, "mutual_energy");
    const GridField f = fk_field(u, k);
    std::vector<double> prod(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) prod[i] = -v[i] * f[i];
    return footprint_sum(u, prod);
}

HCurve h_curve(const GridField& u, const GridField& v, int k, std::span<const double> t_samples)
{
    check_same(u, v, "h_curve");
    check_k(u.dim(), k, "h_curve");
    if (k < 1) throw PreconditionError("h_curve: order k must be >= 1");
    for (std::size_t i = 1; i < t_samples.size(); ++i)
        if (!(t_samples[i] > t_samples[i - 1])) throw PreconditionError("h_curve: t samples must increase");
    const int n = u.dim();
    const HessianField hu = hessian_fd(u);
    const HessianField hv = hessian_fd(v);
    HCurve out;
    std::vector<double> e0(u.size()), e1(u.size()), e2(u.size());
    for (double t : t_samples) {
        const GridField w = u.axpy(t, v);
        try {
            require_admissible(w, k, "h_curve");
        } catch (const PreconditionError& e) {
            throw PreconditionError("h_curve: u + t v not admissible at t=" + std::to_string(t) + ": " + e.what());
        }
        for (std::size_t node = 0; node < u.size(); ++node) {
            e0[node] = e1[node] = e2[node] = 0.0;
            if (u.cell_weight(node) <= 0.0) continue;
            const Mat4 m = combine(hu, hv, t, node);
            const double sk = sigma_of(m, n, k);
            const Mat4 g = small_sigma_grad(m, n, k);
            const Mat4 mv = to_mat(hv, node);
            double dir = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) dir += mv[i][j] * g[i][j];
            e0[node] = -w[node] * sk;
            e1[node] = -v[node] * sk;
            e2[node] = -v[node] * dir;
        }
        out.t.push_back(t);
        out.h.push_back(footprint_sum(u, e0));
        out.dh.push_back((k + 1) * footprint_sum(u, e1));
        out.d2h.push_back((k + 1) * footprint_sum(u, e2));
    }
    return out;
}

ReillyResidual reilly_residual(const GridField& u, const GridField& v, int k, double t, double step)
{
    check_same(u, v, "reilly_residual");
    check_k(u.dim(), k, "reilly_residual");
    if (k < 1) throw PreconditionError("reilly_residual: order k must be >= 1");
    if (!(step > 0.0)) throw PreconditionError("reilly_residual: step must be positive");
    const int n = u.dim();
    const HessianField hu = hessian_fd(u);
    const HessianField hv = hessian_fd(v);
    // Seven-point first-derivative weights, exact for polynomials of degree <= 6.
    static constexpr std::array<double, 3> wts{45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
    double worst = 0.0;
    for (std::size_t node = 0; node < u.size(); ++node) {
        if (!u.in_mask(node)) continue;
        double fd = 0.0;
        for (int m = 1; m <= 3; ++m) {
            const double plus = sigma_of(combine(hu, hv, t + m * step, node), n, k);
            const double minus = sigma_of(combine(hu, hv, t - m * step, node), n, k);
            fd += wts[static_cast<std::size_t>(m - 1)] * (plus - minus);
        }
        fd /= step;
        const Mat4 g = small_sigma_grad(combine(hu, hv, t, node), n, k);
        const Mat4 mv = to_mat(hv, node);
        double dir = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dir += mv[i][j] * g[i][j];
        worst = std::max(worst, std::abs(fd - dir));
    }
    return {worst, step};
}

namespace {

// Nodes inside the identity-check region whose neighbours all carry Hessians.
std::vector<std::size_t> region_nodes(const GridField& u, const HessianField& hess, double fraction)
{
    std::vector<std::size_t> nodes;
    const double lim = fraction * u.spec().radius;
    for (std::size_t node = 0; node < u.size(); ++node) {
        if (!hess.valid(node)) continue;
        const auto x = u.coords(node);
        double d2 = 0.0;
        for (int a = 0; a < u.dim(); ++a) {
            const double dx = x[static_cast<std::size_t>(a)] - u.spec().center[static_cast<std::size_t>(a)];
            d2 += dx * dx;
        }
        if (std::sqrt(d2) >= lim) continue;
        bool ok = true;
        for (int a = 0; a < u.dim() && ok; ++a) {
            const std::size_t s = u.stride(a);
            ok = hess.valid(node + s) && hess.valid(node - s);
        }
        if (ok) nodes.push_back(node);
    }
    if (nodes.empty()) throw PreconditionError("identity check region contains no interior nodes");
    return nodes;
}

std::vector<Mat4> all_grads(const GridField& u, const HessianField& hess, int k)
{
    std::vector<Mat4> g(u.size());
    for (std::size_t node = 0; node < u.size(); ++node)
        if (hess.valid(node)) g[node] = small_sigma_grad(to_mat(hess, node), u.dim(), k);
    return g;
}

} // namespace

double divergence_form_residual(const GridField& u, int k, double region_fraction)
{
    check_k(u.dim(), k, "divergence_form_residual");
    if (k < 1) throw PreconditionError("divergence_form_residual: order k must be >= 1");
    const int n = u.dim();
    const HessianField hess = hessian_fd(u);
    const auto grads = all_grads(u, hess, k);
    std::vector<std::vector<double>> du;
    for (int a = 0; a < n; ++a) du.push_back(gradient_fd(u, a));
    const double inv = 0.5 / u.spacing();
    double worst = 0.0;
    for (std::size_t node : region_nodes(u, hess, region_fraction)) {
        double div = 0.0;
        for (int j = 0; j < n; ++j) {
            const std::size_t sj = u.stride(j);
            for (int i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                div += (du[ui][node + sj] * grads[node + sj][i][j] - du[ui][node - sj] * grads[node - sj][i][j]) * inv;
            }
        }
        const double sk = sigma_of(to_mat(hess, node), n, k);
        worst = std::max(worst, std::abs(sk - div / k));
    }
    return worst;
}

double null_divergence_residual(const GridField& u, int k, double region_fraction)
{
    check_k(u.dim(), k, "null_divergence_residual");
    if (k < 1) throw PreconditionError("null_divergence_residual: order k must be >= 1");
    const int n = u.dim();
    const HessianField hess = hessian_fd(u);
    const auto grads = all_grads(u, hess, k);
    const double inv = 0.5 / u.spacing();
    double worst = 0.0;
    for (std::size_t node : region_nodes(u, hess, region_fraction)) {
        for (int i = 0; i < n; ++i) {
            double div = 0.0;
            for (int j = 0; j < n; ++j) {
                const std::size_t sj = u.stride(j);
                div += (grads[node + sj][i][j] - grads[node - sj][i][j]) * inv;
            }
            worst = std::max(worst, std::abs(div));
        }
    }
    return worst;
}

} // namespace hesskit
