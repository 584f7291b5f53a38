#include "hesskit/symm.hpp"

#include "hesskit/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace hesskit {

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) throw PreconditionError("Spectrum: at least one eigenvalue required");
    std::sort(values_.begin(), values_.end());
}

SymMatrix::SymMatrix(Eigen::MatrixXd entries) : m_(std::move(entries))
{
    if (m_.rows() < 1 || m_.rows() != m_.cols())
        throw PreconditionError("SymMatrix: square matrix of dimension >= 1 required");
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m_.cols(); ++j)
            if (m_(i, j) != m_(j, i))
                throw PreconditionError("SymMatrix: entries (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") and transpose differ");
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& a)
{
    Eigen::MatrixXd s = 0.5 * (a + a.transpose());
    // Force bitwise symmetry; the two halves can differ in the last ulp.
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = i + 1; j < s.cols(); ++j) s(j, i) = s(i, j);
    return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(int n, double scale)
{
    return SymMatrix(Eigen::MatrixXd::Identity(n, n) * scale);
}

SymMatrix SymMatrix::diagonal(std::span<const double> d)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()),
                                              static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return SymMatrix(std::move(m));
}

Spectrum SymMatrix::spectrum() const
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("SymMatrix: eigensolver failed to converge");
    const auto& ev = es.eigenvalues();
    return Spectrum(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

double ExponentSet::q_sobolev() const
{
    if (!subcritical())
        throw PreconditionError("Sobolev exponent n(k+1)/(n-2k) needs 2k < n (n=" +
                                std::to_string(n) + ", k=" + std::to_string(k) + ")");
    return static_cast<double>(n) * (k + 1) / (n - 2 * k);
}

ExponentSet ExponentSet::make(int n, int k)
{
    if (n < 1 || k < 1 || k > n)
        throw PreconditionError("order k must satisfy 1 <= k <= n (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
    ExponentSet e{};
    e.n = n;
    e.k = k;
    e.alpha = 2.0 * k / (k + 1.0);
    e.p = k + 1.0;
    e.q_dual = static_cast<double>(n) * (k + 1) / ((n + 2.0) * k);
    return e;
}

std::vector<double> elem_sym(std::span<const double> lambda)
{
    std::vector<double> s(lambda.size() + 1, 0.0);
    s[0] = 1.0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j >= 1; --j) s[j] += lambda[i] * s[j - 1];
    return s;
}

std::vector<double> elem_sym(const Spectrum& lambda)
{
    return elem_sym(lambda.values());
}

namespace {

void check_order(int n, int k, const char* op)
{
    if (k < 1 || k > n)
        throw PreconditionError(std::string(op) + ": order k=" + std::to_string(k) +
                                " outside [1, " + std::to_string(n) + "]");
}

// S_{k-1} of the eigenvalues with entry `skip` removed.
double elem_sym_without(std::span<const double> lambda, std::size_t skip, int order)
{
    if (order == 0) return 1.0;
    std::vector<double> s(lambda.size(), 0.0);
    s[0] = 1.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (i == skip) continue;
        ++used;
        for (std::size_t j = used; j >= 1; --j) s[j] += lambda[i] * s[j - 1];
    }
    return order <= static_cast<int>(used) ? s[static_cast<std::size_t>(order)] : 0.0;
}

} // namespace

double sigma_k(const SymMatrix& m, int k)
{
    if (k == 0) return 1.0;
    check_order(m.dim(), k, "sigma_k");
    return elem_sym(m.spectrum())[static_cast<std::size_t>(k)];
}

SymMatrix sigma_k_grad(const SymMatrix& m, int k)
{
    check_order(m.dim(), k, "sigma_k_grad");
    const int n = m.dim();
    if (k == 1) return SymMatrix::identity(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("sigma_k_grad: eigensolver failed to converge");
    const Eigen::VectorXd& ev = es.eigenvalues();
    std::span<const double> lambda(ev.data(), static_cast<std::size_t>(ev.size()));

    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = elem_sym_without(lambda, static_cast<std::size_t>(i), k - 1);
    const Eigen::MatrixXd& q = es.eigenvectors();
    return SymMatrix::symmetrized(q * d.asDiagonal() * q.transpose());
}

double check_trace_identity(const SymMatrix& m, int k)
{
    check_order(m.dim(), k, "check_trace_identity");
    const double lhs = sigma_k_grad(m, k).matrix().trace();
    const double rhs = (m.dim() - k + 1) * sigma_k(m, k - 1);
    return std::abs(lhs - rhs);
}

double sigma_k_directional(const SymMatrix& a, const SymMatrix& b, int k)
{
    if (a.dim() != b.dim()) throw PreconditionError("sigma_k_directional: dimension mismatch");
    return (sigma_k_grad(a, k).matrix().cwiseProduct(b.matrix())).sum();
}

double check_euler_identity(const SymMatrix& m, int k)
{
    check_order(m.dim(), k, "check_euler_identity");
    return std::abs(sigma_k_directional(m, m, k) / k - sigma_k(m, k));
}

namespace {

constexpr std::array<double, 3> seven_point{3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};

Eigen::MatrixXd shifted(const SymMatrix& a, const SymMatrix& b, double t)
{
    return a.matrix() + t * b.matrix();
}

} // namespace

double check_reilly_derivative(const SymMatrix& a, const SymMatrix& b, int k, double t, double step)
{
    if (a.dim() != b.dim()) throw PreconditionError("check_reilly_derivative: dimension mismatch");
    check_order(a.dim(), k, "check_reilly_derivative");
    double fd = 0.0;
    for (int j = 1; j <= 3; ++j) {
        const double up = sigma_k(SymMatrix(shifted(a, b, t + j * step)), k);
        const double down = sigma_k(SymMatrix(shifted(a, b, t - j * step)), k);
        fd += seven_point[static_cast<std::size_t>(j - 1)] * (up - down);
    }
    fd /= step;
    return std::abs(fd - sigma_k_directional(SymMatrix(shifted(a, b, t)), b, k));
}

namespace {

/// sum_j d/ds S_k^{ij}[A + s T_j] at s = 0, one entry per i.
Eigen::VectorXd divergence_vector(const SymMatrix& a, const std::vector<SymMatrix>& third, int k, double step,
                                  const char* op)
{
    const int n = a.dim();
    check_order(n, k, op);
    if (static_cast<int>(third.size()) != n) throw PreconditionError(std::string(op) + ": need n tensor slices");
    for (int j = 0; j < n; ++j)
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                if (third[static_cast<std::size_t>(j)](p, q) != third[static_cast<std::size_t>(q)](p, j))
                    throw PreconditionError(std::string(op) + ": third-derivative tensor is not symmetric");
    Eigen::VectorXd div = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const auto& tj = third[static_cast<std::size_t>(j)];
        for (int s = 1; s <= 3; ++s) {
            const Eigen::MatrixXd up = sigma_k_grad(SymMatrix(shifted(a, tj, s * step)), k).matrix();
            const Eigen::MatrixXd down = sigma_k_grad(SymMatrix(shifted(a, tj, -s * step)), k).matrix();
            div += seven_point[static_cast<std::size_t>(s - 1)] / step * (up - down).col(j);
        }
    }
    return div;
}

} // namespace

double check_null_divergence(const SymMatrix& a, const std::vector<SymMatrix>& third, int k, double step)
{
    return divergence_vector(a, third, k, step, "check_null_divergence").cwiseAbs().maxCoeff();
}

double check_divergence_form(const SymMatrix& a, const std::vector<SymMatrix>& third, std::span<const double> gradient,
                             int k, double step)
{
    if (static_cast<int>(gradient.size()) != a.dim())
        throw PreconditionError("check_divergence_form: gradient has the wrong length");
    const Eigen::VectorXd div = divergence_vector(a, third, k, step, "check_divergence_form");
    double s = sigma_k_directional(a, a, k);
    for (int i = 0; i < a.dim(); ++i) s += gradient[static_cast<std::size_t>(i)] * div(i);
    return std::abs(s / k - sigma_k(a, k));
}

} // namespace hesskit
