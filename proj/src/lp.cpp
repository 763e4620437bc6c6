#include <algorithm>
#include <cmath>
#include <string>

#include "credcal/geometry.hpp"

namespace credcal {

namespace {

// Smallest acceptable pivot in the equilibrated tableau.
constexpr double kPivotTol = 1e-9;
// Reduced costs above this are treated as non-improving.
constexpr double kCostTol = 1e-12;
// Ratio-test slack for the Harris pass.
constexpr double kRatioSlack = 1e-12;
// Rows whose entries are all below this fraction of the tolerance are dropped.
constexpr double kNegligibleRow = 0.1;
// Consecutive degenerate pivots before switching to Bland's rule.
constexpr int kDegenerateStreak = 50;

double max_residual(const DenseMatrix& a, std::span<const double> z, std::span<const double> x) {
    double residual = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) {
        double ax = 0.0;
        for (std::size_t c = 0; c < a.cols; ++c) ax += a(r, c) * x[c];
        residual = std::max(residual, std::abs(ax - z[r]));
    }
    return residual;
}

// Least squares on the columns in `support` by Householder QR, in the
// original row units. Returns false when the columns are rank deficient.
bool solve_on_support(const DenseMatrix& a, std::span<const double> z, const std::vector<std::size_t>& support,
                      std::vector<double>& x) {
    const std::size_t m = a.rows, n = support.size();
    if (n == 0 || n > m) return false;
    std::vector<double> q(m * n), b(z.begin(), z.end());
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < n; ++j) q[r * n + j] = a(r, support[j]);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t r = j; r < m; ++r) norm += q[r * n + j] * q[r * n + j];
        norm = std::sqrt(norm);
        if (norm == 0.0) return false;
        const double alpha = q[j * n + j] > 0.0 ? -norm : norm;
        std::vector<double> v(m, 0.0);
        for (std::size_t r = j; r < m; ++r) v[r] = q[r * n + j];
        v[j] -= alpha;
        double vv = 0.0;
        for (std::size_t r = j; r < m; ++r) vv += v[r] * v[r];
        if (vv == 0.0) continue;
        for (std::size_t c = j; c < n; ++c) {
            double d = 0.0;
            for (std::size_t r = j; r < m; ++r) d += v[r] * q[r * n + c];
            d = 2.0 * d / vv;
            for (std::size_t r = j; r < m; ++r) q[r * n + c] -= d * v[r];
        }
        double d = 0.0;
        for (std::size_t r = j; r < m; ++r) d += v[r] * b[r];
        d = 2.0 * d / vv;
        for (std::size_t r = j; r < m; ++r) b[r] -= d * v[r];
    }
    double diag_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) diag_max = std::max(diag_max, std::abs(q[j * n + j]));
    std::vector<double> w(n, 0.0);
    for (std::size_t jj = n; jj-- > 0;) {
        const double diag = q[jj * n + jj];
        if (std::abs(diag) <= 1e-14 * diag_max) return false;
        double s = b[jj];
        for (std::size_t c = jj + 1; c < n; ++c) s -= q[jj * n + c] * w[c];
        w[jj] = s / diag;
    }
    x.assign(a.cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) x[support[j]] = std::max(0.0, w[j]);
    return true;
}

}  // namespace

LpResult lp_feasible(const DenseMatrix& a, std::span<const double> z, double tol) {
    const std::size_t rows = a.rows;
    const std::size_t cols = a.cols;
    if (z.size() != rows || a.values.size() != rows * cols) {
        throw Error(ErrorKind::DimensionMismatch, "LP right-hand side does not match the constraint matrix");
    }

    // Tableau [x (cols) | rhs], artificials implicit: row r starts with
    // artificial r basic. Rows are equilibrated and flipped so rhs >= 0;
    // near-zero class probabilities otherwise produce tiny pivots.
    const std::size_t width = cols + 1;
    std::vector<double> t(rows * width, 0.0);
    std::vector<std::size_t> basis(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double scale = std::abs(z[r]);
        for (std::size_t c = 0; c < cols; ++c) scale = std::max(scale, std::abs(a(r, c)));
        basis[r] = cols + r;
        if (scale < kNegligibleRow * tol) continue;
        if (z[r] < 0.0) scale = -scale;
        double* row = t.data() + r * width;
        for (std::size_t c = 0; c < cols; ++c) row[c] = a(r, c) / scale;
        row[cols] = z[r] / scale;
    }

    LpResult result;
    const int guard = 50 * static_cast<int>(rows + cols) + 1000;
    int degenerate = 0;
    std::vector<double> reduced(cols);
    std::vector<char> excluded(cols, 0);
    for (;;) {
        // Phase-1 cost: sum of artificials still in the basis.
        double objective = 0.0;
        std::fill(reduced.begin(), reduced.end(), 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] < cols) continue;
            const double* row = t.data() + r * width;
            objective += row[cols];
            for (std::size_t c = 0; c < cols; ++c) reduced[c] -= row[c];
        }
        if (objective <= 0.0) break;

        const bool bland = degenerate >= kDegenerateStreak;
        std::size_t enter = cols;
        for (std::size_t c = 0; c < cols; ++c) {
            if (excluded[c] || reduced[c] >= -kCostTol) continue;
            if (enter == cols || (!bland && reduced[c] < reduced[enter])) enter = c;
            if (bland) break;
        }
        if (enter == cols) break;

        // Harris ratio test: bound the step with a little slack, then take
        // the largest pivot among rows within the bound.
        double bound = INFINITY;
        for (std::size_t r = 0; r < rows; ++r) {
            const double coef = t[r * width + enter];
            if (coef > kPivotTol) bound = std::min(bound, (std::max(0.0, t[r * width + cols]) + kRatioSlack) / coef);
        }
        std::size_t leave = rows;
        for (std::size_t r = 0; r < rows; ++r) {
            const double coef = t[r * width + enter];
            if (coef <= kPivotTol || std::max(0.0, t[r * width + cols]) / coef > bound) continue;
            if (leave == rows) {
                leave = r;
                continue;
            }
            const double best = t[leave * width + enter];
            if (bland ? basis[r] < basis[leave] : coef > best) leave = r;
        }
        if (leave == rows) {
            // Only tiny pivots in this column; skip it until the basis changes.
            excluded[enter] = 1;
            continue;
        }
        if (++result.pivots > guard) throw Error(ErrorKind::NumericalFailure, "phase-1 LP exceeded its pivot guard");
        degenerate = t[leave * width + cols] <= kRatioSlack ? degenerate + 1 : 0;

        double* prow = t.data() + leave * width;
        const double pivot = prow[enter];
        for (std::size_t c = 0; c < width; ++c) prow[c] /= pivot;
        prow[cols] = std::max(0.0, prow[cols]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == leave) continue;
            double* row = t.data() + r * width;
            const double f = row[enter];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width; ++c) row[c] -= f * prow[c];
            row[enter] = 0.0;
            row[cols] = std::max(0.0, row[cols]);
        }
        basis[leave] = enter;
        std::fill(excluded.begin(), excluded.end(), 0);
    }

    std::vector<double> x(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        if (basis[r] < cols) x[basis[r]] = std::max(0.0, t[r * width + cols]);
    }
    double residual = max_residual(a, z, x);
    if (residual > tol) {
        // Pivoting through equilibrated tiny rows can cost accuracy; the
        // basis usually still names the right face, so re-solve on it.
        std::vector<std::size_t> support;
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] < cols) support.push_back(basis[r]);
        }
        std::sort(support.begin(), support.end());
        std::vector<double> polished;
        if (solve_on_support(a, z, support, polished)) {
            const double polished_residual = max_residual(a, z, polished);
            if (polished_residual < residual) residual = polished_residual, x = std::move(polished);
        }
    }
    result.residual = residual;
    result.feasible = residual <= tol;
    if (result.feasible) result.certificate = std::move(x);
    return result;
}

}  // namespace credcal
