#pragma once

// Scalar functions sampled on a uniform Cartesian grid that covers a ball,
// finite-difference Hessians, pointwise F_k and the Hessian energies.
//
// Node i along axis a sits at center[a] + (i[a] - (shape[a]-1)/2) * spacing,
// so the box is centred on the ball. The mask marks nodes with
// |x - center| < radius. Integration uses every node whose cell
// [x - h/2, x + h/2]^n meets the ball (the footprint), weighted by the
// fraction of the cell inside; footprint nodes outside the mask carry the
// test function's own extension, which keeps the quadrature second order.

#include "hesskit/hcurve.hpp"
#include "hesskit/symm.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hesskit {

struct GridSpec {
    int n = 2;
    std::vector<int> shape;
    double spacing = 0.0;
    std::vector<double> center;
    double radius = 1.0;

    /// Grid with `cells_across` cells over the ball diameter plus `pad`
    /// extra nodes on each side of the box.
    static GridSpec ball(int n, int cells_across, double radius, std::vector<double> center = {}, int pad = 2);

    [[nodiscard]] std::size_t node_count() const;
    /// Throws PreconditionError on inconsistent fields (2 <= n <= 4 enforced).
    void validate() const;
};

class GridField {
public:
    using Function = std::function<double(std::span<const double>)>;

    GridField(GridSpec spec, std::vector<double> values, std::string description = {});

    /// Samples f at every node of the box, including nodes outside the mask.
    static GridField sample(const GridSpec& spec, const Function& f, std::string description = {});

    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] int dim() const noexcept { return spec_.n; }
    [[nodiscard]] double spacing() const noexcept { return spec_.spacing; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values() const& noexcept { return values_; }
    [[nodiscard]] std::vector<double> values() && { return std::move(values_); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] const std::string& description() const noexcept { return description_; }

    [[nodiscard]] bool in_mask(std::size_t i) const { return mask_[i] != 0; }
    /// Fraction of the node's cell inside the ball (0 outside the footprint).
    [[nodiscard]] double cell_weight(std::size_t i) const { return weights_[i]; }
    [[nodiscard]] std::vector<double> coords(std::size_t i) const;
    [[nodiscard]] std::vector<int> multi_index(std::size_t i) const;
    [[nodiscard]] std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
    /// True when every +-1 neighbour along every axis pair exists.
    [[nodiscard]] bool has_stencil(std::size_t i) const;

    /// Same grid, new values.
    [[nodiscard]] GridField with_values(std::vector<double> values, std::string description = {}) const;
    /// this + t * other (grids must match).
    [[nodiscard]] GridField axpy(double t, const GridField& other) const;
    [[nodiscard]] bool same_grid(const GridField& other) const;

private:
    GridSpec spec_;
    std::vector<double> values_;
    std::string description_;
    std::vector<std::size_t> strides_;
    std::vector<char> mask_;
    std::vector<double> weights_;
};

/// Packed second-derivative matrices, one per node; entries are valid on
/// nodes with a full stencil and zero elsewhere.
class HessianField {
public:
    HessianField(int n, std::size_t nodes);

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] SymMatrix at(std::size_t node) const;
    [[nodiscard]] double entry(std::size_t node, int i, int j) const;
    void set(std::size_t node, int i, int j, double v);
    [[nodiscard]] bool valid(std::size_t node) const { return valid_[node] != 0; }
    void mark_valid(std::size_t node) { valid_[node] = 1; }

private:
    int n_;
    std::size_t packed_;
    std::vector<double> data_;
    std::vector<char> valid_;
};

/// Second-order central differences; four-point cross stencil off the
/// diagonal. Throws PreconditionError if a footprint node lacks a stencil.
[[nodiscard]] HessianField hessian_fd(const GridField& u);

/// Central-difference gradient component along `axis` on stencil nodes.
[[nodiscard]] std::vector<double> gradient_fd(const GridField& u, int axis);

/// Pointwise S_k of the finite-difference Hessian on footprint nodes,
/// zero elsewhere. k == 0 gives the indicator of the footprint.
[[nodiscard]] GridField fk_field(const GridField& u, int k);
[[nodiscard]] GridField fk_field(const GridField& u, const HessianField& hess, int k);

/// Worst node of a pointwise test.
struct NodeViolation {
    std::size_t node = 0;
    int order = 0;
    double value = 0.0;
};

/// F_j >= -tol on every masked node for j = 1..k. tol < 0 selects the
/// default 1e-8 * max|F_1|.
[[nodiscard]] bool is_k_convex(const GridField& u, int k, double tol = -1.0);
/// The first failing (order, node), or nothing when convex.
[[nodiscard]] std::optional<NodeViolation> k_convexity_violation(const GridField& u, int k, double tol = -1.0);

/// Cell-weighted midpoint sum over the footprint, pairwise-summed in node order.
[[nodiscard]] double integrate(const GridField& f);

/// integral of (-u) F_k[u]; u must be k-convex and <= tol on the mask.
[[nodiscard]] double hessian_energy(const GridField& u, int k);
/// integral of (-v) F_k[u]: the first argument is differentiated.
[[nodiscard]] double mutual_energy(const GridField& u, const GridField& v, int k);

/// h, h' and h'' at each t. h'' uses sum_ij v_ij S_k^{ij}[D^2(u+tv)].
[[nodiscard]] HCurve h_curve(const GridField& u, const GridField& v, int k, std::span<const double> t_samples);

struct ReillyResidual {
    double residual = 0.0;   ///< max over masked nodes
    double step = 0.0;       ///< t step of the seven-point derivative
};

/// Compares a seven-point central difference in t of S_k(D^2(u+tv)) with
/// sum_ij v_ij S_k^{ij}[D^2(u+tv)] on the masked nodes.
[[nodiscard]] ReillyResidual reilly_residual(const GridField& u, const GridField& v, int k, double t,
                                             double step = 1e-3);

/// max over nodes with |x - center| < region_fraction * radius of
/// |S_k - (1/k) sum_ij D_j(D_i u S_k^{ij})| with central differences.
[[nodiscard]] double divergence_form_residual(const GridField& u, int k, double region_fraction = 0.7);

/// max over the same region and over i of |sum_j D_j S_k^{ij}[D^2u]|.
[[nodiscard]] double null_divergence_residual(const GridField& u, int k, double region_fraction = 0.7);

} // namespace hesskit
