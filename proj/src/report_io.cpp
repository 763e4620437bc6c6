#include <ostream>

#include "credcal/io.hpp"

namespace credcal {

nlohmann::ordered_json measure_to_json(const MeasureSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(spec.kind));
    if (spec.kind == MeasureKind::SkceUl || spec.kind == MeasureKind::SkceUq) {
        j["bandwidth"] = spec.bandwidth;
        j["distance"] = "total_variation";
        if (spec.pair_shuffle_seed) j["pair_shuffle_seed"] = *spec.pair_shuffle_seed;
    } else {
        j["bins"] = spec.bins;
        j["binning"] = std::string(to_string(spec.effective_binning()));
    }
    return j;
}

nlohmann::ordered_json optimizer_to_json(const OptimizerConfig& config) {
    nlohmann::ordered_json j;
    j["max_evals"] = config.max_evals;
    j["random_starts"] = config.random_starts;
    j["initial_step"] = config.initial_step;
    j["convergence_tol"] = config.convergence_tol;
    return j;
}

nlohmann::ordered_json report_to_json(const TestReport& report) {
    nlohmann::ordered_json j;
    j["null_stats"] = report.null_stats;
    j["threshold"] = report.threshold;
    j["observed"] = report.observed;
    j["lambda_star"] = report.lambda_star.vec();
    j["reject"] = report.reject;
    j["mc_pvalue"] = report.mc_pvalue;
    nlohmann::ordered_json config;
    config["measure"] = measure_to_json(report.measure);
    config["alpha"] = report.alpha;
    config["bootstrap_d"] = report.bootstrap_d;
    config["seed"] = report.seed;
    config["optimizer"] = optimizer_to_json(report.optimizer);
    j["config"] = std::move(config);
    nlohmann::ordered_json optimizer;
    optimizer["evaluations"] = report.optimizer_evaluations;
    optimizer["budget_exhausted"] = report.optimizer_budget_exhausted;
    j["optimizer"] = std::move(optimizer);
    return j;
}

void write_study_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "scenario,measure,alpha,R,rejections,rate,se,wilson_lo,wilson_hi\n";
    for (const auto& row : rows) {
        const auto& c = row.curve;
        out << to_string(c.scenario) << ',' << c.measure << ',' << format_double(c.alpha) << ',' << c.replications << ','
            << c.rejections << ',' << format_double(c.rate) << ',' << format_double(c.se) << ','
            << format_double(row.wilson_lo) << ',' << format_double(row.wilson_hi) << '\n';
    }
}

}  // namespace credcal
