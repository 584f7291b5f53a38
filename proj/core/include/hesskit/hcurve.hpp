#pragma once

#include <vector>

namespace hesskit {

/// Samples of h(t) = integral of -(u+tv) F_k[u+tv] and its first two
/// t-derivatives on an increasing grid of t values.
struct HCurve {
    std::vector<double> t;
    std::vector<double> h;
    std::vector<double> dh;
    std::vector<double> d2h;
};

} // namespace hesskit
