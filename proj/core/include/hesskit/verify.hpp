#pragma once

// Inequality verifiers. Each returns a report holding both sides, the
// constant that multiplies the right side and where that constant comes
// from. ratio = lhs / rhs, and a report passes iff ratio <= 1 + tolerance
// (and |ratio - 1| <= tolerance for equality witnesses).
//
// Empirical verifiers accept an optional constant. Without one they record
// the raw quotient as the constant (ratio 1); normalize_empirical then
// replaces it by the family maximum so every member is compared against
// the same number.

#include "hesskit/grid.hpp"
#include "hesskit/measures.hpp"
#include "hesskit/radial.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hesskit {

enum class ConstantSource {
    paper_sharp,      ///< the best constant, attained by a known minimizer
    paper_explicit,   ///< an explicit admissible constant, not claimed sharp
    empirical,        ///< measured over a generated family
};

[[nodiscard]] const char* to_string(ConstantSource source) noexcept;
[[nodiscard]] ConstantSource constant_source_from_string(const std::string& s);

inline constexpr double default_tolerance = 1e-4;

struct InequalityReport {
    std::string name;
    std::vector<std::pair<std::string, double>> parameters;
    double lhs = 0.0;
    double rhs = 0.0;
    double rhs_base = 0.0;   ///< right side before multiplying by the constant
    double constant_used = 1.0;
    ConstantSource constant_source = ConstantSource::paper_sharp;
    double ratio = 0.0;
    double tolerance = default_tolerance;
    bool equality_case = false;
    bool pass = false;
    std::vector<std::pair<std::string, std::string>> witness;

    /// Recomputes ratio and pass from lhs, rhs, tolerance and equality_case.
    /// 0/0 gives ratio 0; a positive lhs over rhs = 0 gives +infinity.
    void finish();

    [[nodiscard]] std::optional<double> parameter(const std::string& key) const;
    [[nodiscard]] std::optional<std::string> witness_value(const std::string& key) const;
};

/// Report for a measured deviation against a bound (identities, drifts):
/// lhs = value, rhs = bound, constant 1.
[[nodiscard]] InequalityReport bound_report(std::string name, double value, double bound,
                                            std::vector<std::pair<std::string, double>> parameters = {});

/// Sets every empirical report's constant to the largest raw quotient in the
/// list and recomputes rhs and ratio. Equality-type reports are left alone
/// and reports with a vanishing right side keep ratio 0. Returns the constant.
double normalize_empirical(std::span<InequalityReport> reports);

// ---- sharp and explicit inequalities ----

/// int (-v) F_k[u] <= E(u)^{k/(k+1)} E(v)^{1/(k+1)}.
[[nodiscard]] InequalityReport verify_schwarz(const RadialField& u, const RadialField& v, int k);
[[nodiscard]] InequalityReport verify_schwarz(const GridField& u, const GridField& v, int k);

/// E(u+v)^{1/(k+1)} <= E(u)^{1/(k+1)} + E(v)^{1/(k+1)}, E(u+v) being the
/// energy of the function sum.
[[nodiscard]] InequalityReport verify_minkowski(const RadialField& u, const RadialField& v, int k);
[[nodiscard]] InequalityReport verify_minkowski(const GridField& u, const GridField& v, int k);

/// min_t [h h'' - (k/(k+1)) h'^2] >= -tol max_t(h h''), encoded as
/// lhs = max(h h'') - min slack and rhs = max(h h''); also checks midpoint
/// convexity of h^{1/(k+1)} on equally spaced triples.
[[nodiscard]] InequalityReport verify_h_convexity(const RadialField& u, const RadialField& v, int k,
                                                  std::span<const double> t_samples);
[[nodiscard]] InequalityReport verify_h_convexity(const GridField& u, const GridField& v, int k,
                                                  std::span<const double> t_samples);

/// int (-u) <= (int (-w))^{k/(k+1)} E(u)^{1/(k+1)} with F_k[w] = 1 on the same ball.
[[nodiscard]] InequalityReport verify_poincare_L1(const RadialField& u, int k);
[[nodiscard]] InequalityReport verify_poincare_L1(const GridField& u, int k);

/// R^{-n} int |u| <= (c A)^{k/(k+1)} (R^{2k-n} E(u))^{1/(k+1)} with
/// c = C(n,k)^{-1/k}/2 and A = int_{B_1} (1 - |x|^2).
[[nodiscard]] InequalityReport verify_poincare_ball_scaled(const RadialField& u, int k);

/// (int (-u) F_{k-1}[u])^{1/k} <= (int (-w) F_k[w])^{1/(k(k+1))} E(u)^{1/(k+1)}
/// with F_k[w] = F_{k-1}[w]; F_0 = 1.
[[nodiscard]] InequalityReport verify_poincare_quotient(const RadialField& u, int k);

/// (int (-u) F_l[u])^{1/(l+1)} <= K (int (-w) F_k[w])^{(k-l)/((l+1)(k+1))} E(u)^{1/(k+1)}
/// with K = k^k / (l^l (k-l)^{k-l}) and F_k[w] = F_l[w]. Requires 2 <= l < k,
/// or 1 <= l < k when `extrapolated` is set.
[[nodiscard]] InequalityReport verify_poincare_general(const RadialField& u, int k, int l, bool extrapolated = false);

// ---- empirical constants ----

/// ||Du||_2 <= C E(u)^{1/(k+1)}. For k = 1 the constant is 1 and the report
/// is the Green identity ||Du||_2^2 = int (-u) Lap u (tolerance 1e-3).
[[nodiscard]] InequalityReport verify_gradient_poincare(const RadialField& u, int k,
                                                        std::optional<double> constant = {});
[[nodiscard]] InequalityReport verify_gradient_poincare(const GridField& u, int k,
                                                        std::optional<double> constant = {});

/// ||u||_q <= C E(u)^{1/(k+1)}; requires 2k < n and 0 < q <= n(k+1)/(n-2k).
[[nodiscard]] InequalityReport verify_sobolev(const RadialField& u, int k, double q,
                                              std::optional<double> constant = {});

/// E(v)^{k/(k+1)} <= C ||f||_{q'} for F_k[v] = f, q' = n(k+1)/((n+2)k).
[[nodiscard]] InequalityReport verify_dual_sobolev(const RadialDensity& f, int n, int k, const RadialDomain& domain,
                                                   int samples = 10001, std::optional<double> constant = {});

/// (int |u|^q d omega)^{1/q} <= C kappa(omega)^{1/q} E(u)^{1/(k+1)} for u
/// radial about the origin; requires q > k+1. kappa is computed with
/// adams_kappa unless given. A divergent kappa makes the right side
/// infinite (ratio 0) and is recorded in the witness.
[[nodiscard]] InequalityReport verify_trace(const RadialField& u, const DiscreteMeasure& omega, int k, double q,
                                            std::optional<double> kappa = {}, std::optional<double> constant = {});

/// Growth diagnostic for omega = point mass at the origin: the trace
/// quotient of u_lambda(x) = lambda^{-2} u(lambda x) along `lambdas`.
struct TraceProbe {
    std::vector<double> lambdas;
    std::vector<double> quotients;
    double fitted_exponent = 0.0;
    double expected_exponent = 0.0;   ///< (n - 2k)/(k + 1)
    bool kappa_divergent = false;
    bool unbounded = false;           ///< increasing, with at least a tenfold range
};
[[nodiscard]] TraceProbe trace_necessity_probe(const RadialField& u, int k, double q,
                                               std::span<const double> lambdas, double mass = 1.0);
/// Passes iff kappa diverges, the quotients are unbounded and the fitted
/// growth exponent matches (n - 2k)/(k + 1) to `tolerance`.
[[nodiscard]] InequalityReport trace_probe_report(const TraceProbe& probe, int n, int k, double q,
                                                  double tolerance = 1e-3);

struct SandwichOptions {
    int cloud_points = 61;        ///< log-spaced from 0.01 to 100 times the support radius
    double fit_from = 30.0;       ///< far-field fit window, in support radii
    double fit_to = 100.0;
    int samples = 10001;
};

struct SandwichReport {
    int n = 0;
    int k = 0;
    std::string description;
    std::vector<double> radii;
    std::vector<double> neg_u;
    std::vector<double> wolff;
    std::vector<double> ratios;   ///< (-u) / W
    double c1 = 0.0;
    double c2 = 0.0;
    double decay_u = 0.0;         ///< fitted far-field exponents (positive numbers)
    double decay_wolff = 0.0;
    double expected_decay = 0.0;  ///< (n - 2k)/k
    bool degenerate = false;      ///< f = 0: nothing to compare
    bool pass = false;
};

/// Entire solution of F_k[u] = f against the untruncated Wolff potential
/// W_{2k/(k+1), k+1} of f dx. Requires n > 2k.
[[nodiscard]] SandwichReport verify_wolff_sandwich(const RadialDensity& f, int n, int k,
                                                   const SandwichOptions& options = {});

/// (R^{2k-n} int_{B_{9R/10}} F_k[u])^{1/k} <= C R^{-n} int_{B_R} |u| with R
/// the last sample radius. The left integral uses the divergence form,
/// int_{B_rho} F_k = sigma_{n-1} (C(n-1,k-1)/k) rho^{n-k} u'(rho)^k.
[[nodiscard]] InequalityReport verify_local_integral(const RadialField& u, int k,
                                                     std::optional<double> constant = {});

} // namespace hesskit
