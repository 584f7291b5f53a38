#pragma once

// Small hand-rolled generators for property tests. Every case draws from
// its own engine seeded by (property seed, case index), so a failing case
// is reproduced from the two numbers printed with it.

#include <doctest.h>

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    /// Log-uniform positive number in [lo, hi].
    double scale(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    std::vector<double> vector(int n, double lo, double hi)
    {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

    /// Exactly symmetric matrix with N(0,1) entries.
    Eigen::MatrixXd symmetric(int n)
    {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) m(i, j) = m(j, i) = normal();
        return m;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Runs `body(g)` for `cases` independent generators.
template <class Body>
void for_all(std::uint64_t seed, int cases, Body&& body)
{
    for (int c = 0; c < cases; ++c) {
        CAPTURE(seed);
        CAPTURE(c);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(c)};
        std::mt19937_64 mix(seq);
        Gen g(mix());
        body(g);
    }
}

} // namespace gen
