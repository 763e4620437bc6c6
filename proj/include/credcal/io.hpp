#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "credcal/domain.hpp"
#include "credcal/harness.hpp"
#include "credcal/settest.hpp"

namespace credcal {

/// Dataset text format:
///
///   K=<classes> M=<members> N=<instances>
///   <M blocks of N lines, K decimals each, whitespace separated>
///   <one line of N labels, 1-based>
///
/// Blank lines and lines starting with '#' are ignored. Rows are validated
/// as they stream in; errors carry the 1-based line (and column for
/// malformed tokens).
LabeledDataset read_dataset(std::istream& in);
LabeledDataset read_dataset(const std::filesystem::path& path);

/// Writes shortest round-trip decimals so that reading back is exact.
void write_dataset(std::ostream& out, const LabeledDataset& data);
void write_dataset(const std::filesystem::path& path, const LabeledDataset& data);

nlohmann::ordered_json measure_to_json(const MeasureSpec& spec);
nlohmann::ordered_json optimizer_to_json(const OptimizerConfig& config);
nlohmann::ordered_json report_to_json(const TestReport& report);

/// Header: scenario,measure,alpha,R,rejections,rate,se,wilson_lo,wilson_hi
void write_study_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Shortest round-trip representation of a double.
std::string format_double(double v);

}  // namespace credcal
