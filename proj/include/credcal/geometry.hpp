#pragma once

#include <optional>
#include <span>
#include <vector>

#include "credcal/domain.hpp"
#include "credcal/rng.hpp"

namespace credcal {

/// Residual tolerance for LP feasibility.
inline constexpr double kHullTol = 1e-9;

/// Dense row-major matrix, sized for the tiny (K+1) x M feasibility systems.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

struct LpResult {
    bool feasible = false;
    /// Non-negative weights with ||A w - z||_inf <= tol, present when feasible.
    std::optional<std::vector<double>> certificate;
    double residual = 0.0;
    int pivots = 0;
};

/// Phase-1 simplex with Bland's rule: is there w >= 0 with A w = z (up to
/// `tol` in the max norm)? Throws NumericalFailure if the pivot guard trips.
LpResult lp_feasible(const DenseMatrix& a, std::span<const double> z, double tol = kHullTol);

/// Predicted distributions of the M ensemble members for one instance.
class HullInstance {
public:
    HullInstance(std::size_t m, std::size_t k, std::vector<double> rows);
    explicit HullInstance(const std::vector<SimplexVector>& members);
    /// Members' predictions for instance `i` of a classifier set.
    static HullInstance at(const ClassifierSet& set, std::size_t i);

    std::size_t m() const noexcept { return m_; }
    std::size_t k() const noexcept { return k_; }
    std::span<const double> member(std::size_t j) const { return {rows_.data() + j * k_, k_}; }
    /// Mean of the member rows; always inside the hull.
    SimplexVector barycenter() const;
    /// A = [P^T; 1_M].
    DenseMatrix constraint_matrix() const;

private:
    std::size_t m_;
    std::size_t k_;
    std::vector<double> rows_;
};

bool in_convex_hull(const HullInstance& hull, std::span<const double> q, double tol = kHullTol);

struct BoundaryResult {
    SimplexVector point;
    /// Largest feasible mixing weight toward the target, within refine_tol.
    double lambda = 0.0;
};

struct BoundarySearch {
    int grid = 1000;
    double refine_tol = 1e-6;
    double tol = kHullTol;
};

/// Walks p(t) = (1-t) start + t target, t = 0, 1/G, ..., stopping at the
/// first point outside the hull, then bisects the last grid step. Returns
/// `target` itself (lambda = 1) when it is inside. Throws StartOutsideHull.
BoundaryResult find_boundary(const HullInstance& hull, const SimplexVector& start, const SimplexVector& target,
                             const BoundarySearch& search = {});

/// (1-u) boundary + u target.
SimplexVector point_on_segment(const SimplexVector& boundary, const SimplexVector& target, double u);

/// point_on_segment with u uniform on [margin, 1]. Throws DegenerateSegment
/// when the endpoints coincide.
SimplexVector sample_outside_segment(const SimplexVector& boundary, const SimplexVector& target, double margin, Rng& rng);

}  // namespace credcal
