#include "credcal/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "credcal/rng.hpp"

namespace credcal {

std::string_view to_string(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::EceConf: return "ece_conf";
        case MeasureKind::EceCwise: return "ece_cwise";
        case MeasureKind::HlCwise: return "hl_cwise";
        case MeasureKind::SkceUl: return "skce_ul";
        case MeasureKind::SkceUq: return "skce_uq";
    }
    return "unknown";
}

std::string_view to_string(Binning binning) {
    return binning == Binning::EqualWidth ? "equal_width" : "equal_frequency";
}

MeasureKind parse_measure_kind(std::string_view name) {
    for (auto kind : {MeasureKind::EceConf, MeasureKind::EceCwise, MeasureKind::HlCwise, MeasureKind::SkceUl,
                      MeasureKind::SkceUq}) {
        if (name == to_string(kind)) return kind;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown measure '" + std::string(name) + "'");
}

Binning parse_binning(std::string_view name) {
    if (name == "equal_width") return Binning::EqualWidth;
    if (name == "equal_frequency") return Binning::EqualFrequency;
    throw Error(ErrorKind::InvalidArgument, "unknown binning '" + std::string(name) + "'");
}

Binning MeasureSpec::effective_binning() const {
    if (binning) return *binning;
    return kind == MeasureKind::HlCwise ? Binning::EqualFrequency : Binning::EqualWidth;
}

void MeasureSpec::validate() const {
    switch (kind) {
        case MeasureKind::HlCwise:
            if (bins < 3) throw Error(ErrorKind::InvalidArgument, "hl_cwise needs at least 3 bins");
            break;
        case MeasureKind::EceConf:
        case MeasureKind::EceCwise:
            if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bin count must be positive");
            break;
        case MeasureKind::SkceUl:
        case MeasureKind::SkceUq:
            if (!(bandwidth > 0.0)) throw Error(ErrorKind::InvalidArgument, "kernel bandwidth must be positive");
            break;
    }
}

std::string MeasureSpec::label() const {
    std::string s(to_string(kind));
    if (kind == MeasureKind::SkceUl || kind == MeasureKind::SkceUq) return s;
    s += "_b" + std::to_string(bins);
    if (binning && *binning != (kind == MeasureKind::HlCwise ? Binning::EqualFrequency : Binning::EqualWidth)) {
        s += *binning == Binning::EqualWidth ? "_ew" : "_ef";
    }
    return s;
}

namespace {

void check_inputs(ProbView preds, std::span<const int> labels) {
    if (labels.size() != preds.rows) throw Error(ErrorKind::ShapeMismatch, "label count differs from N");
    const int k = static_cast<int>(preds.cols);
    for (int y : labels) {
        if (y < 0 || y >= k) throw Error(ErrorKind::LabelOutOfRange, "label out of range");
    }
}

void assign_bins(std::span<const double> values, int bins, Binning binning, std::vector<int>& bin_of) {
    if (binning == Binning::EqualWidth) {
        bin_of.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double v = values[i];
            if (!(v >= -1e-9 && v <= 1.0 + 1e-9)) throw Error(ErrorKind::ValueOutOfUnit, "value outside [0,1]");
            bin_of[i] = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
        }
    } else {
        bin_of = bin_equal_frequency(values, bins).bin_of;
    }
}

}  // namespace

double ece_conf(ProbView preds, std::span<const int> labels, int bins, Binning binning) {
    check_inputs(preds, labels);
    if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bin count must be positive");
    const std::size_t n = preds.rows;
    std::vector<double> conf(n);
    std::vector<double> correct(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = preds.row(i);
        // max_element returns the first maximum: ties go to the smallest class.
        const auto it = std::max_element(row.begin(), row.end());
        conf[i] = *it;
        correct[i] = (it - row.begin()) == labels[i] ? 1.0 : 0.0;
    }
    std::vector<int> bin_of;
    assign_bins(conf, bins, binning, bin_of);

    std::vector<double> gap(static_cast<std::size_t>(bins), 0.0);
    for (std::size_t i = 0; i < n; ++i) gap[static_cast<std::size_t>(bin_of[i])] += correct[i] - conf[i];
    // |B_j|/N * |acc - conf| = |sum_{i in B_j} (correct_i - c_i)| / N
    double total = 0.0;
    for (double g : gap) total += std::abs(g);
    return total / static_cast<double>(n);
}

double ece_cwise(ProbView preds, std::span<const int> labels, int bins, Binning binning) {
    check_inputs(preds, labels);
    if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bin count must be positive");
    const std::size_t n = preds.rows;
    const std::size_t k = preds.cols;
    std::vector<double> column(n);
    std::vector<int> bin_of;
    std::vector<double> gap(static_cast<std::size_t>(bins));
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) column[i] = preds(i, c);
        assign_bins(column, bins, binning, bin_of);
        std::fill(gap.begin(), gap.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
            gap[static_cast<std::size_t>(bin_of[i])] += y - column[i];
        }
        for (double g : gap) total += std::abs(g);
    }
    return total / (static_cast<double>(n) * static_cast<double>(k));
}

HlResult hl_cwise_detail(ProbView preds, std::span<const int> labels, int bins, Binning binning) {
    check_inputs(preds, labels);
    if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bin count must be positive");
    const std::size_t n = preds.rows;
    const std::size_t k = preds.cols;
    const auto b = static_cast<std::size_t>(bins);
    std::vector<double> column(n);
    std::vector<int> bin_of;
    std::vector<double> observed(b), expected(b);
    std::vector<std::size_t> count(b);
    HlResult out;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) column[i] = preds(i, c);
        assign_bins(column, bins, binning, bin_of);
        std::fill(observed.begin(), observed.end(), 0.0);
        std::fill(expected.begin(), expected.end(), 0.0);
        std::fill(count.begin(), count.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(bin_of[i]);
            observed[j] += labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
            expected[j] += column[i];
            ++count[j];
        }
        for (std::size_t j = 0; j < b; ++j) {
            if (count[j] == 0) continue;
            const double size = static_cast<double>(count[j]);
            const double o = observed[j] / size;
            const double p = expected[j] / size;
            if (!(p > 0.0)) {
                ++out.skipped_bins;
                continue;
            }
            out.statistic += (o - p) * (o - p) / p;
        }
    }
    return out;
}

double hl_cwise(ProbView preds, std::span<const int> labels, int bins, Binning binning) {
    return hl_cwise_detail(preds, labels, bins, binning).statistic;
}

double hl_pvalue(double statistic, std::size_t k, int bins, std::size_t n, HlScale scale) {
    const long dof = (static_cast<long>(k) - 1) * (static_cast<long>(bins) - 2);
    if (dof < 1) throw Error(ErrorKind::NonPositiveDof, "chi-squared degrees of freedom (K-1)(B-2) must be positive");
    if (!(statistic >= 0.0)) throw Error(ErrorKind::InvalidArgument, "statistic must be non-negative");
    double x = statistic;
    if (scale == HlScale::Count) x *= static_cast<double>(n) / static_cast<double>(bins);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

double tv_kernel(std::span<const double> p, std::span<const double> q, double bandwidth) {
    if (p.size() != q.size()) throw Error(ErrorKind::DimensionMismatch, "kernel arguments differ in length");
    if (!(bandwidth > 0.0)) throw Error(ErrorKind::InvalidArgument, "kernel bandwidth must be positive");
    double l1 = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) l1 += std::abs(p[s] - q[s]);
    return std::exp(-0.5 * l1 / bandwidth);
}

namespace {

// sum_{s,t} r_as r_bt Gamma_st(p_a, p_b) for Gamma = k(p_a,p_b) * I.
double pair_term(ProbView preds, std::span<const int> labels, std::size_t a, std::size_t b, double bandwidth) {
    const auto pa = preds.row(a);
    const auto pb = preds.row(b);
    double inner = 0.0;
    for (std::size_t s = 0; s < pa.size(); ++s) {
        const double ra = pa[s] - (labels[a] == static_cast<int>(s) ? 1.0 : 0.0);
        const double rb = pb[s] - (labels[b] == static_cast<int>(s) ? 1.0 : 0.0);
        inner += ra * rb;
    }
    return inner * tv_kernel(pa, pb, bandwidth);
}

// Sum over j > i of the pair terms, accumulated in j order.
double row_partial(ProbView preds, std::span<const int> labels, std::size_t i, double bandwidth) {
    double acc = 0.0;
    for (std::size_t j = i + 1; j < preds.rows; ++j) acc += pair_term(preds, labels, i, j, bandwidth);
    return acc;
}

void check_kernel_inputs(ProbView preds, std::span<const int> labels, const KernelSpec& kernel) {
    check_inputs(preds, labels);
    if (preds.rows < 2) throw Error(ErrorKind::TooFewInstances, "kernel estimators need N >= 2");
    if (!(kernel.bandwidth > 0.0)) throw Error(ErrorKind::InvalidArgument, "kernel bandwidth must be positive");
}

}  // namespace

double skce_ul(ProbView preds, std::span<const int> labels, const KernelSpec& kernel,
               std::optional<std::uint64_t> pair_shuffle_seed) {
    check_kernel_inputs(preds, labels, kernel);
    const std::size_t pairs = preds.rows / 2;
    std::vector<std::size_t> order(preds.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (pair_shuffle_seed) {
        Rng rng(*pair_shuffle_seed);
        for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
    }
    double total = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
        total += pair_term(preds, labels, order[2 * p], order[2 * p + 1], kernel.bandwidth);
    }
    return total / static_cast<double>(pairs);
}

double skce_uq_serial(ProbView preds, std::span<const int> labels, const KernelSpec& kernel) {
    check_kernel_inputs(preds, labels, kernel);
    const std::size_t n = preds.rows;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) total += row_partial(preds, labels, i, kernel.bandwidth);
    return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double skce_uq(ProbView preds, std::span<const int> labels, const KernelSpec& kernel) {
    check_kernel_inputs(preds, labels, kernel);
    const std::size_t n = preds.rows;
    std::vector<double> partial(n, 0.0);
    const auto rows = static_cast<long>(n) - 1;
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < rows; ++i) {
        partial[static_cast<std::size_t>(i)] = row_partial(preds, labels, static_cast<std::size_t>(i), kernel.bandwidth);
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) total += partial[i];
    return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double evaluate(const MeasureSpec& spec, ProbView preds, std::span<const int> labels) {
    switch (spec.kind) {
        case MeasureKind::EceConf: return ece_conf(preds, labels, spec.bins, spec.effective_binning());
        case MeasureKind::EceCwise: return ece_cwise(preds, labels, spec.bins, spec.effective_binning());
        case MeasureKind::HlCwise: return hl_cwise(preds, labels, spec.bins, spec.effective_binning());
        case MeasureKind::SkceUl: return skce_ul(preds, labels, KernelSpec{spec.bandwidth}, spec.pair_shuffle_seed);
        case MeasureKind::SkceUq: return skce_uq(preds, labels, KernelSpec{spec.bandwidth});
    }
    throw Error(ErrorKind::InvalidArgument, "unknown measure");
}

}  // namespace credcal
