#include "credcal/rng.hpp"

#include <cmath>
#include <limits>

#include "credcal/error.hpp"

namespace credcal {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t id : path) h = mix64(h ^ mix64(id + 0x9E3779B97F4A7C15ULL));
    return h;
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "index range is empty");
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
}

double Rng::normal() {
    // Marsaglia polar method; the second variate is discarded to keep the
    // stream position a function of the call count alone.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

double Rng::exponential() {
    return -std::log(uniform_open());
}

double Rng::log_gamma(double shape) {
    if (!(shape > 0.0)) throw Error(ErrorKind::NonPositiveParameter, "gamma shape must be positive");
    // Marsaglia-Tsang; shapes below one are boosted by one and corrected
    // with U^(1/shape), applied in log space.
    const bool boost = shape < 1.0;
    const double a = boost ? shape + 1.0 : shape;
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    double log_x;
    for (;;) {
        double z, v;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * z * z * z * z || std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) {
            log_x = std::log(d * v);
            break;
        }
    }
    if (boost) log_x += std::log(uniform_open()) / shape;
    return log_x;
}

int Rng::categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] > 0.0) last_positive = static_cast<int>(k);
        acc += probs[k];
        if (u < acc) return static_cast<int>(k);
    }
    // Rounding left the cumulative sum just below one.
    return last_positive;
}

std::vector<double> Rng::flat_dirichlet(std::size_t dim) {
    std::vector<double> w(dim);
    double sum = 0.0;
    for (double& x : w) {
        x = exponential();
        sum += x;
    }
    for (double& x : w) x /= sum;
    return w;
}

}  // namespace credcal
