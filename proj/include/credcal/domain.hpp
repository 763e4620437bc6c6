#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "credcal/error.hpp"

namespace credcal {

/// Tolerance on row sums accepted from external input before renormalization.
inline constexpr double kInputSimplexTol = 1e-6;
/// Accepted rows further than this from summing to one are renormalized;
/// closer rows are kept bit-exact so that files round-trip.
inline constexpr double kRenormalizeTol = 1e-12;
/// Tolerance on row sums held by every validated in-memory object.
inline constexpr double kSimplexTol = 1e-9;

/// A point of the probability simplex. Holds class distributions as well as
/// mixing weights over ensemble members.
class SimplexVector {
public:
    SimplexVector() = default;
    /// Validates at kSimplexTol; throws NonSimplexRow otherwise.
    explicit SimplexVector(std::vector<double> coords);

    static SimplexVector uniform(std::size_t dim);
    static SimplexVector vertex(std::size_t dim, std::size_t index);
    /// Clips negatives to zero and renormalizes. Throws NonSimplexRow when
    /// nothing positive remains.
    static SimplexVector project(std::span<const double> raw);

    std::size_t size() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::span<const double> coords() const noexcept { return coords_; }
    const std::vector<double>& vec() const noexcept { return coords_; }

    bool operator==(const SimplexVector&) const = default;

private:
    std::vector<double> coords_;
};

bool is_simplex(std::span<const double> v, double tol = kSimplexTol);

/// Read-only row-major N x K view over probabilities.
struct ProbView {
    std::span<const double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::span<const double> row(std::size_t i) const { return data.subspan(i * cols, cols); }
    double operator()(std::size_t i, std::size_t k) const { return data[i * cols + k]; }
};

/// Predictions of one model over a dataset: N rows, each a distribution over K classes.
class PredictionSet {
public:
    PredictionSet() = default;
    /// Validates every row at kSimplexTol, N >= 1 and K >= 2.
    PredictionSet(std::size_t n, std::size_t k, std::vector<double> probs);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    std::span<const double> row(std::size_t i) const { return {probs_.data() + i * k_, k_}; }
    double operator()(std::size_t i, std::size_t c) const { return probs_[i * k_ + c]; }
    ProbView view() const noexcept { return {probs_, n_, k_}; }
    const std::vector<double>& data() const noexcept { return probs_; }

    bool operator==(const PredictionSet&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<double> probs_;
};

/// M prediction sets over the same N instances and K classes.
class ClassifierSet {
public:
    ClassifierSet() = default;
    explicit ClassifierSet(std::vector<PredictionSet> members);

    std::size_t m() const noexcept { return members_.size(); }
    std::size_t n() const noexcept { return members_.front().n(); }
    std::size_t k() const noexcept { return members_.front().k(); }
    const PredictionSet& member(std::size_t i) const { return members_[i]; }
    const std::vector<PredictionSet>& members() const noexcept { return members_; }

private:
    std::vector<PredictionSet> members_;
};

/// Classifier set plus one observed label per instance. Labels are 0-based
/// here; the 1-based external convention is converted at I/O boundaries.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(ClassifierSet set, std::vector<int> labels);

    const ClassifierSet& set() const noexcept { return set_; }
    std::span<const int> labels() const noexcept { return labels_; }
    std::size_t n() const noexcept { return labels_.size(); }

private:
    ClassifierSet set_;
    std::vector<int> labels_;
};

/// Builds a dataset from unvalidated input. Rows within kInputSimplexTol of
/// summing to one are renormalized; anything else is NonSimplexRow.
/// `raw_labels` are 1-based.
LabeledDataset validate_dataset(const std::vector<std::vector<std::vector<double>>>& raw_predictions,
                                const std::vector<int>& raw_labels);

/// Indicator vector for a 0-based class index.
std::vector<double> one_hot(int label, std::size_t k);

/// Row-wise convex combination sum_m weights_m * member_m.
PredictionSet mix(const ClassifierSet& set, const SimplexVector& weights);

/// Mixes all rows into a caller-owned n*k buffer.
void mix_into(const ClassifierSet& set, std::span<const double> weights, std::span<double> out);

/// Mixes the instances listed in `rows` (bootstrap indices) into a
/// caller-owned rows.size()*k buffer.
void mix_rows_into(const ClassifierSet& set, std::span<const double> weights,
                   std::span<const std::size_t> rows, std::span<double> out);

}  // namespace credcal
