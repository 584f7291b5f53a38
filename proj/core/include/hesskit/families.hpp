#pragma once

// Seeded generators of admissible test inputs. All randomness flows
// through std::mt19937_64, so a seed reproduces a family within one build.

#include "hesskit/grid.hpp"
#include "hesskit/radial.hpp"
#include "hesskit/symm.hpp"

#include <random>

namespace hesskit {

using Rng = std::mt19937_64;

/// Symmetric matrix with independent N(0,1) entries on and above the diagonal.
[[nodiscard]] SymMatrix random_symmetric(Rng& rng, int n);

/// Random rotation (Haar-distributed via QR of a Gaussian matrix).
[[nodiscard]] Eigen::MatrixXd random_orthogonal(Rng& rng, int n);

/// Positive density on [0, radius]: b + sum of three Gaussian bumps with
/// random amplitude, center and width, b in [0.2, 1].
[[nodiscard]] RadialDensity random_density(Rng& rng, double radius);

/// solve_radial of random_density on the ball: k-convex, <= 0, u(R) = 0.
[[nodiscard]] RadialField random_admissible_profile(Rng& rng, int n, int k, double radius, int samples = 10001);

/// u = c (|x|^2 - R^2)(1 + eps g(x)) with g a product of random cosines and
/// c = C(n,k)^{-1/k}/2; eps is drawn in [0, eps_max] and halved until the
/// field passes is_k_convex. Throws NumericalError after 30 rejections.
[[nodiscard]] GridField random_admissible_grid_field(Rng& rng, const GridSpec& spec, int k, double eps_max = 0.3);

/// c (|x - center|^2 - R^2) sampled on the grid.
[[nodiscard]] GridField quadratic_grid_field(const GridSpec& spec, double c);

} // namespace hesskit
