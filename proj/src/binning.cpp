#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "credcal/measures.hpp"

namespace credcal {

namespace {

// Accumulated mixtures may overshoot [0,1] by a few ulps.
constexpr double kUnitSlack = 1e-9;

}  // namespace

BinAssignment bin_equal_width(std::span<const double> values, int bins) {
    if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bin count must be positive");
    BinAssignment out;
    out.bin_of.resize(values.size());
    out.members.resize(static_cast<std::size_t>(bins));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v >= -kUnitSlack && v <= 1.0 + kUnitSlack)) {
            throw Error(ErrorKind::ValueOutOfUnit, "value " + std::to_string(v) + " outside [0,1]");
        }
        int j = static_cast<int>(std::floor(v * bins));
        j = std::clamp(j, 0, bins - 1);
        out.bin_of[i] = j;
        out.members[static_cast<std::size_t>(j)].push_back(i);
    }
    return out;
}

BinAssignment bin_equal_frequency(std::span<const double> values, int bins) {
    if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bin count must be positive");
    const std::size_t n = values.size();
    const auto b = static_cast<std::size_t>(bins);
    if (n < b) throw Error(ErrorKind::TooFewInstances, "equal-frequency binning needs N >= B");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return values[a] < values[c]; });

    BinAssignment out;
    out.bin_of.resize(n);
    out.members.resize(b);
    const std::size_t base = n / b;
    const std::size_t extra = n % b;
    std::size_t pos = 0;
    for (std::size_t j = 0; j < b; ++j) {
        const std::size_t size = base + (j < extra ? 1 : 0);
        for (std::size_t t = 0; t < size; ++t, ++pos) {
            out.bin_of[order[pos]] = static_cast<int>(j);
            out.members[j].push_back(order[pos]);
        }
    }
    return out;
}

}  // namespace credcal
