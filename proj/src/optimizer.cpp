#include "credcal/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "credcal/rng.hpp"

namespace credcal {

void OptimizerConfig::validate(std::size_t m) const {
    if (max_evals < static_cast<int>(m) + 2) {
        throw Error(ErrorKind::InvalidArgument, "max_evals must be at least M + 2");
    }
    if (!(initial_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "initial_step must be positive");
    if (!(convergence_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "convergence_tol must be positive");
    if (random_starts < 0) throw Error(ErrorKind::InvalidArgument, "random_starts must be non-negative");
    for (const auto& s : starts) {
        if (s.size() != m) throw Error(ErrorKind::DimensionMismatch, "start point has the wrong dimension");
    }
}

std::vector<SimplexVector> default_starts(std::size_t m, const OptimizerConfig& config) {
    std::vector<SimplexVector> starts;
    starts.reserve(m + 1 + static_cast<std::size_t>(config.random_starts));
    starts.push_back(SimplexVector::uniform(m));
    for (std::size_t i = 0; i < m; ++i) starts.push_back(SimplexVector::vertex(m, i));
    for (int r = 0; r < config.random_starts; ++r) {
        Rng rng(derive_seed(config.seed, {0x5354415254ULL, static_cast<std::uint64_t>(r)}));
        starts.push_back(SimplexVector::project(rng.flat_dirichlet(m)));
    }
    return starts;
}

namespace {

struct Vertex {
    std::vector<double> z;
    double f = 0.0;
};

class ReducedProblem {
public:
    ReducedProblem(const SimplexObjective& objective, std::size_t m) : objective_(objective), m_(m), weights_(m) {}

    // Projects z in place onto {z >= 0, sum z <= 1}.
    void project(std::vector<double>& z) {
        double last = 1.0;
        for (double v : z) last -= v;
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < m_; ++i) {
            weights_[i] = z[i] > 0.0 ? z[i] : 0.0;
            sum += weights_[i];
        }
        weights_[m_ - 1] = last > 0.0 ? last : 0.0;
        sum += weights_[m_ - 1];
        for (std::size_t i = 0; i + 1 < m_; ++i) z[i] = weights_[i] / sum;
    }

    double eval(const std::vector<double>& z) {
        double last = 1.0;
        for (std::size_t i = 0; i + 1 < m_; ++i) {
            weights_[i] = z[i];
            last -= z[i];
        }
        weights_[m_ - 1] = std::max(0.0, last);
        ++evals_;
        const double f = objective_(weights_);
        if (std::isnan(f)) throw Error(ErrorKind::ObjectiveFailure, "objective returned NaN");
        return f;
    }

    long evals() const { return evals_; }

private:
    const SimplexObjective& objective_;
    std::size_t m_;
    std::vector<double> weights_;
    long evals_ = 0;
};

struct RestartOutcome {
    std::vector<double> z;
    double f = 0.0;
    bool exhausted = false;
    long evals = 0;
};

double spread(const std::vector<Vertex>& simplex) {
    double d = 0.0;
    const auto& best = simplex.front().z;
    for (std::size_t v = 1; v < simplex.size(); ++v) {
        for (std::size_t i = 0; i < best.size(); ++i) d = std::max(d, std::abs(simplex[v].z[i] - best[i]));
    }
    return d;
}

RestartOutcome nelder_mead(const SimplexObjective& objective, std::size_t m, const SimplexVector& start,
                           const OptimizerConfig& config) {
    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    const std::size_t d = m - 1;
    ReducedProblem problem(objective, m);

    std::vector<Vertex> simplex(d + 1);
    simplex[0].z.assign(start.coords().begin(), start.coords().begin() + static_cast<long>(d));
    problem.project(simplex[0].z);
    simplex[0].f = problem.eval(simplex[0].z);
    for (std::size_t i = 0; i < d; ++i) {
        auto z = simplex[0].z;
        z[i] += config.initial_step;
        problem.project(z);
        // Stepping outward from a face can project back onto the start.
        if (std::abs(z[i] - simplex[0].z[i]) < 0.5 * config.initial_step * config.initial_step) {
            z = simplex[0].z;
            z[i] -= config.initial_step;
            problem.project(z);
        }
        simplex[i + 1].z = std::move(z);
        simplex[i + 1].f = problem.eval(simplex[i + 1].z);
    }

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::vector<double> centroid(d), trial(d);
    auto point_along = [&](double coef, const std::vector<double>& from) {
        for (std::size_t i = 0; i < d; ++i) trial[i] = centroid[i] + coef * (from[i] - centroid[i]);
        problem.project(trial);
        return problem.eval(trial);
    };

    bool exhausted = false;
    for (;;) {
        std::stable_sort(simplex.begin(), simplex.end(), by_value);
        if (spread(simplex) < config.convergence_tol) break;
        if (problem.evals() + static_cast<long>(d) + 2 > config.max_evals) {
            exhausted = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < d; ++v) {
            for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[v].z[i];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        Vertex& worst = simplex.back();
        const double f_reflect = point_along(-kReflect, worst.z);
        const auto reflected = trial;
        if (f_reflect < simplex.front().f) {
            const double f_expand = point_along(-kReflect * kExpand, worst.z);
            if (f_expand < f_reflect) {
                worst = {trial, f_expand};
            } else {
                worst = {reflected, f_reflect};
            }
            continue;
        }
        if (f_reflect < simplex[d - 1].f) {
            worst = {reflected, f_reflect};
            continue;
        }
        if (f_reflect < worst.f) {
            const double f_contract = point_along(kContract, reflected);
            if (f_contract < f_reflect) {
                worst = {trial, f_contract};
                continue;
            }
        } else {
            const double f_contract = point_along(kContract, worst.z);
            if (f_contract < worst.f) {
                worst = {trial, f_contract};
                continue;
            }
        }
        for (std::size_t v = 1; v <= d; ++v) {
            for (std::size_t i = 0; i < d; ++i) {
                simplex[v].z[i] = simplex[0].z[i] + kShrink * (simplex[v].z[i] - simplex[0].z[i]);
            }
            problem.project(simplex[v].z);
            simplex[v].f = problem.eval(simplex[v].z);
        }
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    return {simplex.front().z, simplex.front().f, exhausted, problem.evals()};
}

std::vector<double> expand(const std::vector<double>& z) {
    std::vector<double> w(z);
    double last = 1.0;
    for (double v : z) last -= v;
    w.push_back(last);
    return w;
}

}  // namespace

OptimizeResult minimize_over_simplex(const SimplexObjective& objective, std::size_t m, const OptimizerConfig& config) {
    if (m == 0) throw Error(ErrorKind::DimensionMismatch, "simplex dimension must be positive");
    if (m == 1) {
        const std::vector<double> one{1.0};
        return {SimplexVector(one), objective(one), false, 1, 0};
    }
    config.validate(m);
    const auto starts = config.starts.empty() ? default_starts(m, config) : config.starts;

    std::vector<RestartOutcome> outcomes(starts.size());
    std::vector<std::exception_ptr> failures(starts.size());
    const auto count = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic, 1) if (config.parallel_restarts)
    for (long s = 0; s < count; ++s) {
        const auto i = static_cast<std::size_t>(s);
        try {
            outcomes[i] = nelder_mead(objective, m, starts[i], config);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    OptimizeResult result;
    std::size_t best = 0;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
        result.evaluations += outcomes[s].evals;
        result.budget_exhausted = result.budget_exhausted || outcomes[s].exhausted;
        if (outcomes[s].f < outcomes[best].f) best = s;
    }
    result.best_start = best;
    result.argmin = SimplexVector::project(expand(outcomes[best].z));
    result.value = objective(result.argmin.coords());
    ++result.evaluations;
    return result;
}

}  // namespace credcal
