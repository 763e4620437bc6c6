#include "credcal/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace credcal {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonSimplexRow: return "NonSimplexRow";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ValueOutOfUnit: return "ValueOutOfUnit";
        case ErrorKind::TooFewInstances: return "TooFewInstances";
        case ErrorKind::NonPositiveDof: return "NonPositiveDof";
        case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
        case ErrorKind::EmptyStats: return "EmptyStats";
        case ErrorKind::EmptyTable: return "EmptyTable";
        case ErrorKind::StartOutsideHull: return "StartOutsideHull";
        case ErrorKind::DegenerateSegment: return "DegenerateSegment";
        case ErrorKind::BoundaryDegenerate: return "BoundaryDegenerate";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::ObjectiveFailure: return "ObjectiveFailure";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::FileNotFound: return "FileNotFound";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

bool is_simplex(std::span<const double> v, double tol) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) return false;
        sum += x;
    }
    return !v.empty() && std::abs(sum - 1.0) <= tol;
}

SimplexVector::SimplexVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (!is_simplex(coords_)) throw Error(ErrorKind::NonSimplexRow, "coordinates are not a probability vector");
}

SimplexVector SimplexVector::uniform(std::size_t dim) {
    if (dim == 0) throw Error(ErrorKind::DimensionMismatch, "empty simplex");
    return SimplexVector(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

SimplexVector SimplexVector::vertex(std::size_t dim, std::size_t index) {
    if (index >= dim) throw Error(ErrorKind::DimensionMismatch, "vertex index out of range");
    std::vector<double> v(dim, 0.0);
    v[index] = 1.0;
    return SimplexVector(std::move(v));
}

SimplexVector SimplexVector::project(std::span<const double> raw) {
    std::vector<double> v(raw.begin(), raw.end());
    double sum = 0.0;
    for (double& x : v) {
        if (!(x > 0.0)) x = 0.0;
        sum += x;
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) throw Error(ErrorKind::NonSimplexRow, "projection of a non-positive vector");
    for (double& x : v) x /= sum;
    return SimplexVector(std::move(v));
}

PredictionSet::PredictionSet(std::size_t n, std::size_t k, std::vector<double> probs)
    : n_(n), k_(k), probs_(std::move(probs)) {
    if (n_ < 1 || k_ < 2) throw Error(ErrorKind::ShapeMismatch, "prediction set needs N >= 1 and K >= 2");
    if (probs_.size() != n_ * k_) throw Error(ErrorKind::ShapeMismatch, "payload size does not match N x K");
    for (std::size_t i = 0; i < n_; ++i) {
        if (!is_simplex(row(i))) {
            throw Error(ErrorKind::NonSimplexRow, "row " + std::to_string(i + 1) + " is not a probability vector");
        }
    }
}

ClassifierSet::ClassifierSet(std::vector<PredictionSet> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error(ErrorKind::ShapeMismatch, "classifier set is empty");
    for (const auto& p : members_) {
        if (p.n() != members_.front().n() || p.k() != members_.front().k()) {
            throw Error(ErrorKind::ShapeMismatch, "member shapes disagree");
        }
    }
}

LabeledDataset::LabeledDataset(ClassifierSet set, std::vector<int> labels)
    : set_(std::move(set)), labels_(std::move(labels)) {
    if (labels_.size() != set_.n()) throw Error(ErrorKind::ShapeMismatch, "label count differs from N");
    const int k = static_cast<int>(set_.k());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= k) {
            throw Error(ErrorKind::LabelOutOfRange, "label at position " + std::to_string(i + 1) + " out of range");
        }
    }
}

LabeledDataset validate_dataset(const std::vector<std::vector<std::vector<double>>>& raw_predictions,
                                const std::vector<int>& raw_labels) {
    if (raw_predictions.empty()) throw Error(ErrorKind::ShapeMismatch, "no prediction sets");
    const std::size_t n = raw_predictions.front().size();
    if (n == 0) throw Error(ErrorKind::ShapeMismatch, "prediction set has no rows");
    const std::size_t k = raw_predictions.front().front().size();

    std::vector<PredictionSet> members;
    members.reserve(raw_predictions.size());
    for (std::size_t m = 0; m < raw_predictions.size(); ++m) {
        const auto& rows = raw_predictions[m];
        if (rows.size() != n) throw Error(ErrorKind::ShapeMismatch, "member " + std::to_string(m + 1) + " has a different N");
        std::vector<double> flat;
        flat.reserve(n * k);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = rows[i];
            if (r.size() != k) throw Error(ErrorKind::ShapeMismatch, "member " + std::to_string(m + 1) + " row " + std::to_string(i + 1) + " has a different K");
            double sum = 0.0;
            bool negative = false;
            for (double x : r) {
                negative = negative || !(x >= 0.0);
                sum += x;
            }
            if (negative || !(std::abs(sum - 1.0) <= kInputSimplexTol)) {
                throw Error(ErrorKind::NonSimplexRow, "member " + std::to_string(m + 1) + " row " + std::to_string(i + 1) +
                                                          " sums to " + std::to_string(sum));
            }
            const double scale = std::abs(sum - 1.0) > kRenormalizeTol ? sum : 1.0;
            for (double x : r) flat.push_back(x / scale);
        }
        members.emplace_back(n, k, std::move(flat));
    }

    std::vector<int> labels(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        if (raw_labels[i] < 1 || raw_labels[i] > static_cast<int>(k)) {
            throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(raw_labels[i]) + " at position " + std::to_string(i + 1));
        }
        labels[i] = raw_labels[i] - 1;
    }
    return LabeledDataset(ClassifierSet(std::move(members)), std::move(labels));
}

std::vector<double> one_hot(int label, std::size_t k) {
    if (label < 0 || static_cast<std::size_t>(label) >= k) throw Error(ErrorKind::LabelOutOfRange, "one-hot label out of range");
    std::vector<double> v(k, 0.0);
    v[static_cast<std::size_t>(label)] = 1.0;
    return v;
}

namespace {

// Anchored form a + sum_m w_m (x_m - a), with a the heaviest member: exact at
// vertices and wherever members agree, so one-hot ensembles stay one-hot.
std::size_t anchor_member(std::span<const double> weights) {
    return static_cast<std::size_t>(std::max_element(weights.begin(), weights.end()) - weights.begin());
}

void mix_row(const ClassifierSet& set, std::span<const double> weights, std::size_t anchor, std::size_t row,
             double* out) {
    const std::size_t k = set.k();
    const double* a = set.member(anchor).data().data() + row * k;
    std::copy(a, a + k, out);
    for (std::size_t m = 0; m < set.m(); ++m) {
        const double w = weights[m];
        if (w == 0.0 || m == anchor) continue;
        const double* s = set.member(m).data().data() + row * k;
        for (std::size_t c = 0; c < k; ++c) out[c] += w * (s[c] - a[c]);
    }
    for (std::size_t c = 0; c < k; ++c) out[c] = std::max(0.0, out[c]);
}

}  // namespace

void mix_into(const ClassifierSet& set, std::span<const double> weights, std::span<double> out) {
    if (weights.size() != set.m()) throw Error(ErrorKind::DimensionMismatch, "weight length differs from M");
    const std::size_t k = set.k();
    if (out.size() != set.n() * k) throw Error(ErrorKind::DimensionMismatch, "output buffer size");
    const std::size_t anchor = anchor_member(weights);
    for (std::size_t i = 0; i < set.n(); ++i) mix_row(set, weights, anchor, i, out.data() + i * k);
}

void mix_rows_into(const ClassifierSet& set, std::span<const double> weights,
                   std::span<const std::size_t> rows, std::span<double> out) {
    if (weights.size() != set.m()) throw Error(ErrorKind::DimensionMismatch, "weight length differs from M");
    const std::size_t k = set.k();
    if (out.size() != rows.size() * k) throw Error(ErrorKind::DimensionMismatch, "output buffer size");
    const std::size_t anchor = anchor_member(weights);
    for (std::size_t r = 0; r < rows.size(); ++r) mix_row(set, weights, anchor, rows[r], out.data() + r * k);
}

PredictionSet mix(const ClassifierSet& set, const SimplexVector& weights) {
    std::vector<double> out(set.n() * set.k());
    mix_into(set, weights.coords(), out);
    return PredictionSet(set.n(), set.k(), std::move(out));
}

}  // namespace credcal
