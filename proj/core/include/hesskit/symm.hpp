#pragma once

// Elementary symmetric functions of eigenvalues and the derivative matrix
// S_k^{ij}[r] = d S_k(lambda[r]) / d r_ij of a symmetric matrix.

#include <Eigen/Core>

#include <span>
#include <vector>

namespace hesskit {

/// Eigenvalues of a symmetric matrix, kept in ascending order.
class Spectrum {
public:
    explicit Spectrum(std::vector<double> values);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.size()); }
    [[nodiscard]] std::span<const double> values() const& noexcept { return values_; }
    std::span<const double> values() const&& = delete;
    [[nodiscard]] double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

private:
    std::vector<double> values_;
};

/// Real symmetric n x n matrix. Construction enforces exact symmetry; a
/// matrix that is symmetric only up to round-off is rejected, use
/// `SymMatrix::symmetrized` for those.
class SymMatrix {
public:
    explicit SymMatrix(Eigen::MatrixXd entries);

    /// (A + A^T) / 2 of an arbitrary square matrix.
    static SymMatrix symmetrized(const Eigen::MatrixXd& a);
    static SymMatrix identity(int n, double scale = 1.0);
    static SymMatrix diagonal(std::span<const double> d);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(m_.rows()); }
    [[nodiscard]] double operator()(int i, int j) const { return m_(i, j); }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return m_; }

    /// Full ascending eigenvalue list. Throws NumericalError if the
    /// symmetric eigensolver does not converge.
    [[nodiscard]] Spectrum spectrum() const;

private:
    Eigen::MatrixXd m_;
};

/// Exponents attached to the order-k Hessian problem in dimension n.
struct ExponentSet {
    int n;
    int k;
    double alpha;      ///< 2k/(k+1), order of the Riesz/Wolff potential
    double p;          ///< k+1
    double q_dual;     ///< n(k+1)/((n+2)k)

    /// n(k+1)/(n-2k), the dilation-invariant Sobolev exponent. Requires 2k < n.
    [[nodiscard]] double q_sobolev() const;
    [[nodiscard]] bool subcritical() const noexcept { return 2 * k < n; }

    /// Throws PreconditionError unless 1 <= k <= n.
    static ExponentSet make(int n, int k);
};

/// S_0..S_n of the given values, by accumulating the coefficients of
/// prod_i (x + lambda_i). Exact for any ordering, O(n^2).
[[nodiscard]] std::vector<double> elem_sym(std::span<const double> lambda);
[[nodiscard]] std::vector<double> elem_sym(const Spectrum& lambda);

/// S_k of the eigenvalues of M; k == 0 returns 1.
[[nodiscard]] double sigma_k(const SymMatrix& m, int k);

/// The matrix S_k^{ij}[M]. Off-diagonal entries treat r_ij and r_ji as
/// independent variables, so a symmetric perturbation of M by
/// (h/2)(E_ij + E_ji) changes S_k by h * S_k^{ij} to first order, and
/// sum_ij M_ij S_k^{ij} = k S_k(M).
[[nodiscard]] SymMatrix sigma_k_grad(const SymMatrix& m, int k);

/// |sum_i S_k^{ii}[M] - (n-k+1) S_{k-1}(M)|.
[[nodiscard]] double check_trace_identity(const SymMatrix& m, int k);

/// sum_ij B_ij S_k^{ij}[A]: the derivative of S_k(A + tB) at t = 0.
[[nodiscard]] double sigma_k_directional(const SymMatrix& a, const SymMatrix& b, int k);

/// |(1/k) sum_ij M_ij S_k^{ij}[M] - S_k(M)|.
[[nodiscard]] double check_euler_identity(const SymMatrix& m, int k);

/// |d/dt S_k(A + tB) - sum_ij B_ij S_k^{ij}[A + tB]| at t, the derivative
/// taken by a seven-point central difference with the given step. S_k(A + tB)
/// is a polynomial of degree k in t, so the stencil is exact for k <= 6 up to
/// round-off.
[[nodiscard]] double check_reilly_derivative(const SymMatrix& a, const SymMatrix& b, int k, double t = 0.0,
                                             double step = 0.05);

/// Pointwise form of sum_j D_j S_k^{ij}[D^2 u] = 0 for a cubic u with
/// D^2 u(x) = A + sum_j x_j T_j, where the T_j are slices of a fully
/// symmetric third-derivative tensor (T_j)_{ab} = u_{abj}. Returns
/// max_i |sum_j d/ds S_k^{ij}[A + s T_j]| at s = 0 (seven-point difference).
[[nodiscard]] double check_null_divergence(const SymMatrix& a, const std::vector<SymMatrix>& third, int k,
                                           double step = 0.05);

/// Pointwise form of S_k[D^2 u] = (1/k) sum_ij D_j(D_i u S_k^{ij}[D^2 u]) for
/// the same cubic with gradient `gradient` at the point. Returns the
/// absolute residual.
[[nodiscard]] double check_divergence_form(const SymMatrix& a, const std::vector<SymMatrix>& third,
                                           std::span<const double> gradient, int k, double step = 0.05);

} // namespace hesskit
