#include "credcal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace credcal {

namespace {

constexpr std::uint64_t kInstanceTag = 0x494E5354ULL;
constexpr std::uint64_t kMixtureTag = 0x4D4958ULL;

struct Instance {
    InstanceEnsemble ensemble;
    SimplexVector truth;
    int label = 0;
};

Instance gen_instance(const ScenarioSpec& spec, std::span<const double> shared_weights, std::size_t i, int& resampled) {
    for (int attempt = 0; attempt < kMaxInstanceAttempts; ++attempt) {
        Rng rng(derive_seed(spec.seed, {kInstanceTag, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(attempt)}));
        auto ensemble = gen_instance_ensemble(spec.k, spec.m, spec.u, rng);

        std::vector<double> truth(spec.k, 0.0);
        if (spec.scenario == Scenario::S1) {
            for (std::size_t j = 0; j < spec.m; ++j) {
                for (std::size_t s = 0; s < spec.k; ++s) truth[s] += shared_weights[j] * ensemble.members[j][s];
            }
        } else {
            const HullInstance hull(ensemble.members);
            const std::size_t corner =
                spec.scenario == Scenario::S2 ? closest_corner(ensemble.center) : rng.index(spec.k);
            const auto target = SimplexVector::vertex(spec.k, corner);
            // The Dirichlet center is almost never inside the hull of M
            // members, so the search starts from the members' mean.
            const auto boundary = find_boundary(hull, hull.barycenter(), target, spec.search);
            if (boundary.lambda >= 1.0) {
                ++resampled;
                continue;
            }
            try {
                const auto outside = sample_outside_segment(boundary.point, target, spec.margin, rng);
                truth = outside.vec();
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DegenerateSegment) throw;
                ++resampled;
                continue;
            }
        }
        auto truth_vec = SimplexVector::project(truth);
        const int label = rng.categorical(truth_vec.coords());
        return {std::move(ensemble), std::move(truth_vec), label};
    }
    throw Error(ErrorKind::BoundaryDegenerate,
                "instance " + std::to_string(i + 1) + " degenerate after " + std::to_string(kMaxInstanceAttempts) + " attempts");
}

}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::S1: return "S1";
        case Scenario::S2: return "S2";
        case Scenario::S3: return "S3";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view name) {
    if (name == "S1" || name == "s1") return Scenario::S1;
    if (name == "S2" || name == "s2") return Scenario::S2;
    if (name == "S3" || name == "s3") return Scenario::S3;
    throw Error(ErrorKind::InvalidArgument, "unknown scenario '" + std::string(name) + "'");
}

void ScenarioSpec::validate() const {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "N must be positive");
    if (m < 1) throw Error(ErrorKind::InvalidArgument, "M must be positive");
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "K must be at least 2");
    if (!(u > 0.0)) throw Error(ErrorKind::InvalidArgument, "spread u must be positive");
    if (!(margin >= 0.0 && margin < 1.0)) throw Error(ErrorKind::InvalidArgument, "margin must lie in [0,1)");
}

SimplexVector sample_dirichlet(std::span<const double> a, Rng& rng) {
    if (a.empty()) throw Error(ErrorKind::DimensionMismatch, "Dirichlet needs at least one parameter");
    std::vector<double> logs(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (!(a[s] > 0.0) || !std::isfinite(a[s])) throw Error(ErrorKind::NonPositiveParameter, "Dirichlet parameter must be positive");
        logs[s] = rng.log_gamma(a[s]);
    }
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double& l : logs) {
        l = std::exp(l - top);
        sum += l;
    }
    for (double& l : logs) l /= sum;
    return SimplexVector::project(logs);
}

InstanceEnsemble gen_instance_ensemble(std::size_t k, std::size_t m, double u, Rng& rng) {
    if (!(u > 0.0)) throw Error(ErrorKind::NonPositiveParameter, "spread u must be positive");
    std::vector<double> a(k, 1.0 / static_cast<double>(k));
    InstanceEnsemble out{sample_dirichlet(a, rng), {}};
    for (std::size_t s = 0; s < k; ++s) a[s] = std::max(kDirichletFloor, static_cast<double>(k) * out.center[s] / u);
    out.members.reserve(m);
    for (std::size_t j = 0; j < m; ++j) out.members.push_back(sample_dirichlet(a, rng));
    return out;
}

std::size_t closest_corner(const SimplexVector& p) {
    const auto c = p.coords();
    return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
}

SyntheticDataset gen_scenario(const ScenarioSpec& spec) {
    spec.validate();
    std::vector<double> shared_weights;
    if (spec.scenario == Scenario::S1) {
        // One set of mixing weights per dataset, shared by all instances.
        Rng rng(derive_seed(spec.seed, {kMixtureTag}));
        shared_weights = spec.m == 1 ? std::vector<double>{1.0} : rng.flat_dirichlet(spec.m);
    }

    SyntheticDataset out;
    std::vector<std::vector<double>> member_rows(spec.m);
    for (auto& rows : member_rows) rows.reserve(spec.n * spec.k);
    std::vector<int> labels;
    labels.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        auto inst = gen_instance(spec, shared_weights, i, out.resampled_instances);
        for (std::size_t j = 0; j < spec.m; ++j) {
            const auto c = inst.ensemble.members[j].coords();
            member_rows[j].insert(member_rows[j].end(), c.begin(), c.end());
        }
        labels.push_back(inst.label);
        out.truths.push_back(std::move(inst.truth));
        out.centers.push_back(std::move(inst.ensemble.center));
    }
    std::vector<PredictionSet> members;
    members.reserve(spec.m);
    for (auto& rows : member_rows) members.emplace_back(spec.n, spec.k, std::move(rows));
    out.data = LabeledDataset(ClassifierSet(std::move(members)), std::move(labels));
    return out;
}

}  // namespace credcal
