#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "credcal/domain.hpp"
#include "credcal/geometry.hpp"
#include "credcal/rng.hpp"

namespace credcal {

/// S1: labels from a mixture inside every hull (null true).
/// S2: labels from a point beyond the hull toward the closest corner.
/// S3: as S2 but toward a uniformly chosen corner.
enum class Scenario { S1, S2, S3 };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

/// Floor applied to Dirichlet parameters derived from near-boundary centers.
inline constexpr double kDirichletFloor = 1e-8;
inline constexpr int kMaxInstanceAttempts = 100;

struct ScenarioSpec {
    Scenario scenario = Scenario::S1;
    std::size_t n = 100;
    std::size_t m = 10;
    std::size_t k = 10;
    /// Ensemble spread around the instance center; smaller is tighter.
    double u = 0.01;
    std::uint64_t seed = 0;
    /// Minimum fraction of the boundary-to-corner segment skipped when
    /// sampling outside truths. 0 samples the closed segment.
    double margin = 0.02;
    BoundarySearch search;

    void validate() const;
};

struct SyntheticDataset {
    LabeledDataset data;
    /// Distribution each label was drawn from.
    std::vector<SimplexVector> truths;
    /// Dirichlet centers p_e of the per-instance ensembles.
    std::vector<SimplexVector> centers;
    /// Instances regenerated because the outside segment degenerated.
    int resampled_instances = 0;
};

/// Normalized independent Gamma(a_k, 1) draws, combined in log space.
SimplexVector sample_dirichlet(std::span<const double> a, Rng& rng);

struct InstanceEnsemble {
    SimplexVector center;
    std::vector<SimplexVector> members;
};

/// center ~ Dir(1/K, ..., 1/K); members i.i.d. ~ Dir(K * center / u), with
/// parameters floored at kDirichletFloor.
InstanceEnsemble gen_instance_ensemble(std::size_t k, std::size_t m, double u, Rng& rng);

/// Index of the simplex vertex nearest to p (its largest coordinate; ties
/// to the lowest index).
std::size_t closest_corner(const SimplexVector& p);

SyntheticDataset gen_scenario(const ScenarioSpec& spec);

}  // namespace credcal
