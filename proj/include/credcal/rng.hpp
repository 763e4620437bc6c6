#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace credcal {

/// Stream derivation: every random stream is keyed by the master seed and a
/// path of counters (replication, scenario, bootstrap index, ...). The same
/// path always yields the same stream, whatever order or thread runs it.
///
///   h0 = mix64(seed);  h_{j+1} = mix64(h_j ^ mix64(id_j + 0x9E3779B97F4A7C15))
///
/// where mix64 is the SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded generator. Variates are produced from raw 64-bit draws with
/// portable transforms so sequences do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    double normal();
    double exponential();
    /// log of a Gamma(shape, 1) draw. Stays finite for tiny shapes where the
    /// variate itself would underflow.
    double log_gamma(double shape);
    /// Draws a class index from a probability vector by inverse CDF.
    int categorical(std::span<const double> probs);
    /// Uniform point on the simplex of dimension `dim` (flat Dirichlet).
    std::vector<double> flat_dirichlet(std::size_t dim);

private:
    std::mt19937_64 engine_;
};

}  // namespace credcal
