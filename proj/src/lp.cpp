#include "limas/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "limas/error.hpp"

namespace limas::lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr double kFeasTol = 1e-9;
constexpr int kMaxIterations = 200000;

/// Simplex tableau: rows 0..R-1 are constraints, row R is the reduced-cost
/// row of a minimization, last column is the right-hand side.
class Tableau {
public:
    Tableau(Matrix t, std::vector<Eigen::Index> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

    [[nodiscard]] Eigen::Index rows() const { return t_.rows() - 1; }
    [[nodiscard]] Eigen::Index cols() const { return t_.cols() - 1; }
    Matrix& data() { return t_; }
    [[nodiscard]] const std::vector<Eigen::Index>& basis() const { return basis_; }

    void set_costs(const Vector& costs) {
        const auto R = rows();
        const auto C = cols();
        t_.row(R).setZero();
        t_.row(R).head(C) = costs.transpose();
        for (Eigen::Index i = 0; i < R; ++i) {
            const double cb = costs[basis_[static_cast<std::size_t>(i)]];
            if (cb != 0.0) t_.row(R) -= cb * t_.row(i);
        }
    }

    void pivot(Eigen::Index row, Eigen::Index col) {
        t_.row(row) /= t_(row, col);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f != 0.0) t_.row(i) -= f * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    /// Returns false when unbounded. Columns >= `allowed` never enter.
    bool optimize(Eigen::Index allowed, int& iterations) {
        const auto R = rows();
        const auto C = cols();
        while (true) {
            if (++iterations > kMaxIterations) {
                throw Error(ErrorCode::SolverFailure, "simplex iteration limit reached");
            }
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j) {
                if (t_(R, j) < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;

            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < R; ++i) {
                const double a = t_(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(t_(i, C), 0.0) / a;
                const bool better = leave < 0 || ratio < best - 1e-14;
                const bool tie_lower_index =
                    leave >= 0 && ratio <= best + 1e-14 &&
                    basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)];
                if (better || tie_lower_index) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

private:
    Matrix t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

Solution maximize(const Problem& problem) {
    const auto n = problem.objective.size();
    const auto n_ub = problem.a_ub.rows();
    const auto n_eq = problem.a_eq.rows();
    if ((n_ub > 0 && problem.a_ub.cols() != n) || (n_eq > 0 && problem.a_eq.cols() != n) ||
        problem.b_ub.size() != n_ub || problem.b_eq.size() != n_eq) {
        throw Error(ErrorCode::DimensionMismatch, "LP dimensions disagree");
    }
    const auto R = n_ub + n_eq;

    Matrix a(R, n);
    Vector b(R);
    if (n_ub > 0) {
        a.topRows(n_ub) = problem.a_ub;
        b.head(n_ub) = problem.b_ub;
    }
    if (n_eq > 0) {
        a.bottomRows(n_eq) = problem.a_eq;
        b.tail(n_eq) = problem.b_eq;
    }

    // Equilibrate: columns to unit max-norm, then rows (with their rhs).
    Vector col_scale = Vector::Ones(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double s = R > 0 ? a.col(j).cwiseAbs().maxCoeff() : 0.0;
        if (s > 0.0) {
            col_scale[j] = 1.0 / s;
            a.col(j) *= col_scale[j];
        }
    }
    for (Eigen::Index i = 0; i < R; ++i) {
        const double s = std::max(a.row(i).cwiseAbs().maxCoeff(), std::abs(b[i]));
        if (s > 0.0) {
            a.row(i) /= s;
            b[i] /= s;
        }
    }
    const Vector obj = problem.objective.cwiseProduct(col_scale);

    // Standard form columns: x+ (n), x- (n), slacks (n_ub), artificials (R).
    const Eigen::Index n_struct = 2 * n + n_ub;
    const Eigen::Index C = n_struct + R;
    Matrix t = Matrix::Zero(R + 1, C + 1);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(R));
    for (Eigen::Index i = 0; i < R; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        t.row(i).segment(0, n) = sign * a.row(i);
        t.row(i).segment(n, n) = -sign * a.row(i);
        if (i < n_ub) t(i, 2 * n + i) = sign;
        t(i, n_struct + i) = 1.0;
        t(i, C) = sign * b[i];
        basis[static_cast<std::size_t>(i)] = n_struct + i;
    }

    Tableau tab(std::move(t), std::move(basis));
    Solution sol;

    Vector phase1 = Vector::Zero(C);
    phase1.tail(R).setOnes();
    tab.set_costs(phase1);
    tab.optimize(C, sol.iterations);
    if (-tab.data()(R, C) > kFeasTol * std::max<double>(1.0, static_cast<double>(R))) {
        sol.status = Status::Infeasible;
        return sol;
    }

    // Drive remaining artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < R; ++i) {
        if (tab.basis()[static_cast<std::size_t>(i)] < n_struct) continue;
        Eigen::Index col = -1;
        double best = kPivotTol * 100;
        for (Eigen::Index j = 0; j < n_struct; ++j) {
            if (std::abs(tab.data()(i, j)) > best) {
                best = std::abs(tab.data()(i, j));
                col = j;
            }
        }
        if (col >= 0) tab.pivot(i, col);
    }

    Vector phase2 = Vector::Zero(C);
    phase2.segment(0, n) = -obj;
    phase2.segment(n, n) = obj;
    tab.set_costs(phase2);
    if (!tab.optimize(n_struct, sol.iterations)) {
        sol.status = Status::Unbounded;
        return sol;
    }

    Vector z = Vector::Zero(C);
    for (Eigen::Index i = 0; i < R; ++i) z[tab.basis()[static_cast<std::size_t>(i)]] = tab.data()(i, C);
    sol.x = (z.segment(0, n) - z.segment(n, n)).cwiseProduct(col_scale);
    if (!sol.x.allFinite()) throw Error(ErrorCode::SolverFailure, "non-finite LP solution");
    sol.value = problem.objective.dot(sol.x);
    sol.status = Status::Optimal;
    return sol;
}

}  // namespace limas::lp
