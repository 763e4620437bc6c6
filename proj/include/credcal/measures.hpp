#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credcal/domain.hpp"

namespace credcal {

enum class MeasureKind { EceConf, EceCwise, HlCwise, SkceUl, SkceUq };
enum class Binning { EqualWidth, EqualFrequency };

std::string_view to_string(MeasureKind kind);
std::string_view to_string(Binning binning);
MeasureKind parse_measure_kind(std::string_view name);
Binning parse_binning(std::string_view name);

/// Bin index per instance (0-based) plus the member list of every bin.
struct BinAssignment {
    std::vector<int> bin_of;
    std::vector<std::vector<std::size_t>> members;
};

/// Value v lands in bin j (0-based) with j/B <= v < (j+1)/B; the last bin is
/// right-closed. Values outside [0,1] raise ValueOutOfUnit.
BinAssignment bin_equal_width(std::span<const double> values, int bins);

/// Sorts ascending (ties by original index) and cuts into B contiguous
/// groups of floor(N/B) or ceil(N/B), larger groups first.
BinAssignment bin_equal_frequency(std::span<const double> values, int bins);

struct KernelSpec {
    /// Divisor inside the exponential of exp(-TV(p,q) / bandwidth).
    double bandwidth = 2.0;
};

/// Which calibration measure to compute and its parameters.
struct MeasureSpec {
    MeasureKind kind = MeasureKind::EceConf;
    int bins = 10;
    /// Unset means the measure's default: equal width for ECE, equal
    /// frequency for HL.
    std::optional<Binning> binning;
    double bandwidth = 2.0;
    /// When set, SKCE_ul pairs instances after a seeded shuffle instead of in
    /// dataset order.
    std::optional<std::uint64_t> pair_shuffle_seed;

    Binning effective_binning() const;
    /// Throws InvalidArgument on bad parameters.
    void validate() const;
    /// Compact identifier such as "ece_conf_b10" or "skce_ul".
    std::string label() const;
};

double ece_conf(ProbView preds, std::span<const int> labels, int bins, Binning binning = Binning::EqualWidth);
double ece_cwise(ProbView preds, std::span<const int> labels, int bins, Binning binning = Binning::EqualWidth);

struct HlResult {
    double statistic = 0.0;
    /// Bins whose mean predicted probability was exactly zero.
    int skipped_bins = 0;
};
HlResult hl_cwise_detail(ProbView preds, std::span<const int> labels, int bins,
                         Binning binning = Binning::EqualFrequency);
double hl_cwise(ProbView preds, std::span<const int> labels, int bins, Binning binning = Binning::EqualFrequency);

/// Scale on which the chi-squared survival function is evaluated. The
/// measure itself is on the proportion scale; the count scale multiplies it
/// by the expected bin size N/B, which is what the chi-squared
/// approximation assumes.
enum class HlScale { Proportion, Count };

/// Survival function of chi-squared with (K-1)(B-2) degrees of freedom.
double hl_pvalue(double statistic, std::size_t k, int bins, std::size_t n, HlScale scale = HlScale::Count);

/// exp(-TV(p,q) / bandwidth) with TV the half-L1 distance.
double tv_kernel(std::span<const double> p, std::span<const double> q, double bandwidth);

double skce_ul(ProbView preds, std::span<const int> labels, const KernelSpec& kernel,
               std::optional<std::uint64_t> pair_shuffle_seed = std::nullopt);

/// All-pairs U-statistic. The pair loop is OpenMP-parallel; per-row partial
/// sums are reduced in row order so the result matches skce_uq_serial bit
/// for bit.
double skce_uq(ProbView preds, std::span<const int> labels, const KernelSpec& kernel);
double skce_uq_serial(ProbView preds, std::span<const int> labels, const KernelSpec& kernel);

double evaluate(const MeasureSpec& spec, ProbView preds, std::span<const int> labels);

inline double evaluate(const MeasureSpec& spec, const PredictionSet& preds, std::span<const int> labels) {
    return evaluate(spec, preds.view(), labels);
}

}  // namespace credcal
