#include "credcal/geometry.hpp"

#include <cmath>
#include <string>

namespace credcal {

HullInstance::HullInstance(std::size_t m, std::size_t k, std::vector<double> rows)
    : m_(m), k_(k), rows_(std::move(rows)) {
    if (m_ < 1 || k_ < 1 || rows_.size() != m_ * k_) throw Error(ErrorKind::ShapeMismatch, "hull payload is not M x K");
    for (std::size_t j = 0; j < m_; ++j) {
        if (!is_simplex(member(j))) throw Error(ErrorKind::NonSimplexRow, "hull member " + std::to_string(j + 1));
    }
}

HullInstance::HullInstance(const std::vector<SimplexVector>& members) : m_(members.size()), k_(0) {
    if (members.empty()) throw Error(ErrorKind::ShapeMismatch, "hull needs at least one member");
    k_ = members.front().size();
    for (const auto& p : members) {
        if (p.size() != k_) throw Error(ErrorKind::ShapeMismatch, "hull members differ in length");
        rows_.insert(rows_.end(), p.coords().begin(), p.coords().end());
    }
}

HullInstance HullInstance::at(const ClassifierSet& set, std::size_t i) {
    std::vector<double> rows;
    rows.reserve(set.m() * set.k());
    for (const auto& member : set.members()) {
        const auto r = member.row(i);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return HullInstance(set.m(), set.k(), std::move(rows));
}

SimplexVector HullInstance::barycenter() const {
    std::vector<double> c(k_, 0.0);
    for (std::size_t j = 0; j < m_; ++j) {
        for (std::size_t s = 0; s < k_; ++s) c[s] += rows_[j * k_ + s];
    }
    for (double& v : c) v /= static_cast<double>(m_);
    return SimplexVector::project(c);
}

DenseMatrix HullInstance::constraint_matrix() const {
    DenseMatrix a{k_ + 1, m_, std::vector<double>((k_ + 1) * m_)};
    for (std::size_t j = 0; j < m_; ++j) {
        for (std::size_t s = 0; s < k_; ++s) a(s, j) = rows_[j * k_ + s];
        a(k_, j) = 1.0;
    }
    return a;
}

bool in_convex_hull(const HullInstance& hull, std::span<const double> q, double tol) {
    if (q.size() != hull.k()) throw Error(ErrorKind::DimensionMismatch, "query length differs from K");
    std::vector<double> z(q.begin(), q.end());
    z.push_back(1.0);
    return lp_feasible(hull.constraint_matrix(), z, tol).feasible;
}

SimplexVector point_on_segment(const SimplexVector& boundary, const SimplexVector& target, double u) {
    if (boundary.size() != target.size()) throw Error(ErrorKind::DimensionMismatch, "segment endpoints differ in length");
    std::vector<double> p(boundary.size());
    for (std::size_t s = 0; s < p.size(); ++s) p[s] = (1.0 - u) * boundary[s] + u * target[s];
    return SimplexVector::project(p);
}

BoundaryResult find_boundary(const HullInstance& hull, const SimplexVector& start, const SimplexVector& target,
                             const BoundarySearch& search) {
    if (search.grid < 1 || !(search.refine_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "bad boundary search settings");
    const DenseMatrix a = hull.constraint_matrix();
    std::vector<double> z(hull.k() + 1, 1.0);
    auto feasible_at = [&](double t) {
        for (std::size_t s = 0; s < hull.k(); ++s) z[s] = (1.0 - t) * start[s] + t * target[s];
        return lp_feasible(a, z, search.tol).feasible;
    };

    if (start.size() != hull.k() || target.size() != hull.k()) {
        throw Error(ErrorKind::DimensionMismatch, "boundary endpoints differ from K");
    }
    if (!feasible_at(0.0)) throw Error(ErrorKind::StartOutsideHull, "line search starts outside the hull");
    if (feasible_at(1.0)) return {target, 1.0};

    double lo = 0.0;
    double hi = 1.0;
    for (int g = 1; g <= search.grid; ++g) {
        const double t = static_cast<double>(g) / search.grid;
        if (!feasible_at(t)) {
            hi = t;
            break;
        }
        lo = t;
    }
    while (hi - lo > search.refine_tol) {
        const double mid = 0.5 * (lo + hi);
        if (feasible_at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {point_on_segment(start, target, lo), lo};
}

SimplexVector sample_outside_segment(const SimplexVector& boundary, const SimplexVector& target, double margin, Rng& rng) {
    if (boundary.size() != target.size()) throw Error(ErrorKind::DimensionMismatch, "segment endpoints differ in length");
    double gap = 0.0;
    for (std::size_t s = 0; s < boundary.size(); ++s) gap = std::max(gap, std::abs(boundary[s] - target[s]));
    if (gap < 1e-12) throw Error(ErrorKind::DegenerateSegment, "segment endpoints coincide");
    if (!(margin >= 0.0 && margin <= 1.0)) throw Error(ErrorKind::InvalidArgument, "margin must lie in [0,1]");
    const double u = margin + (1.0 - margin) * rng.uniform();
    return point_on_segment(boundary, target, u);
}

}  // namespace credcal
