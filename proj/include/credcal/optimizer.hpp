#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "credcal/domain.hpp"

namespace credcal {

/// Objective over mixing weights. Called concurrently from restart workers,
/// so it must not mutate shared state.
using SimplexObjective = std::function<double(std::span<const double> weights)>;

struct OptimizerConfig {
    /// Evaluation budget per restart.
    int max_evals = 2000;
    /// Explicit starting points; empty means barycenter + all vertices +
    /// `random_starts` seeded uniform points.
    std::vector<SimplexVector> starts;
    int random_starts = 8;
    std::uint64_t seed = 0;
    double initial_step = 0.1;
    /// Search stops once the working simplex is smaller than this (max-norm
    /// distance of any vertex to the best one).
    double convergence_tol = 1e-6;
    /// Run restarts on the OpenMP team; results are identical either way.
    bool parallel_restarts = true;

    void validate(std::size_t m) const;
};

struct OptimizeResult {
    SimplexVector argmin;
    double value = 0.0;
    /// Some restart hit max_evals before converging.
    bool budget_exhausted = false;
    long evaluations = 0;
    std::size_t best_start = 0;
};

std::vector<SimplexVector> default_starts(std::size_t m, const OptimizerConfig& config);

/// Multi-start derivative-free minimization over the simplex of dimension m.
/// Works in the reduced coordinates z = (w_1..w_{m-1}) with w_m = 1 - sum z;
/// every trial point is projected onto the simplex (clip, renormalize)
/// before the objective sees it. Ties between restarts go to the lower index.
OptimizeResult minimize_over_simplex(const SimplexObjective& objective, std::size_t m,
                                     const OptimizerConfig& config = {});

}  // namespace credcal
