#include "limas/simstab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "limas/error.hpp"
#include "limas/lp.hpp"

namespace limas {

SignMatrix sign_matrix(int m) {
    if (m < 1 || m > kMaxSignOrder) {
        throw Error(ErrorCode::OrderTooLarge, "sign matrix order must lie in [1, 16], got " + std::to_string(m));
    }
    const Eigen::Index count = Eigen::Index{1} << m;
    SignMatrix s;
    s.m = m;
    s.rows.resize(count, m);
    for (Eigen::Index r = 0; r < count; ++r) {
        for (int j = 0; j < m; ++j) {
            const bool bit = ((r >> (m - 1 - j)) & 1) != 0;
            s.rows(r, j) = bit ? 1.0 : -1.0;
        }
    }
    return s;
}

FullLp build_full_lp(const std::vector<SystemPair>& pairs) {
    if (pairs.size() < 2) throw Error(ErrorCode::DimensionMismatch, "need at least two systems");
    const auto m = pairs.front().order();
    for (const auto& p : pairs) {
        if (p.order() != m) throw Error(ErrorCode::DimensionMismatch, "all systems must share the same order");
    }
    if (m > kMaxSignOrder) throw Error(ErrorCode::OrderTooLarge, "system order exceeds 16");

    FullLp f;
    f.m = static_cast<int>(m);
    f.n_systems = static_cast<int>(pairs.size());
    const auto M = static_cast<Eigen::Index>(pairs.size());
    f.bases.reserve(pairs.size());
    for (const auto& p : pairs) f.bases.push_back(ackermann_basis(p));

    f.v_mat = Matrix::Zero((M - 1) * m, M * m);
    f.v_vec.resize((M - 1) * m);
    for (Eigen::Index l = 0; l + 1 < M; ++l) {
        const auto& cur = f.bases[static_cast<std::size_t>(l)];
        const auto& nxt = f.bases[static_cast<std::size_t>(l + 1)];
        f.v_mat.block(l * m, l * m, m, m) = cur.v_mat.transpose();
        f.v_mat.block(l * m, (l + 1) * m, m, m) = -nxt.v_mat.transpose();
        f.v_vec.segment(l * m, m) = (nxt.v_row - cur.v_row).transpose();
    }

    const auto gamma = sign_matrix(f.m);
    const auto rows = gamma.rows.rows();
    f.h_mat = Matrix::Zero(M * rows, M * m);
    for (Eigen::Index l = 0; l < M; ++l) f.h_mat.block(l * rows, l * m, rows, m) = gamma.rows;
    f.h_vec = Vector::Ones(M * rows);
    return f;
}

ReducedLp reduce_lp(const FullLp& full) {
    const Eigen::Index m = full.m;
    const auto M = static_cast<Eigen::Index>(full.bases.size());
    if (M < 2 || full.v_mat.rows() != (M - 1) * m) {
        throw Error(ErrorCode::DimensionMismatch, "malformed full LP");
    }

    std::vector<Matrix> inv_t;  // (V_l^T)^{-1}
    inv_t.reserve(static_cast<std::size_t>(M));
    for (const auto& basis : full.bases) {
        Eigen::FullPivLU<Matrix> lu(basis.v_mat.transpose());
        if (!lu.isInvertible()) throw Error(ErrorCode::BlockInversionFailure, "V_l is singular");
        Matrix inv = lu.inverse();
        if (!inv.allFinite()) throw Error(ErrorCode::BlockInversionFailure, "V_l inverse is not finite");
        inv_t.push_back(std::move(inv));
    }

    ReducedLp r;
    r.m = full.m;
    r.v_dagger = Matrix::Zero(M * m, (M - 1) * m);
    for (Eigen::Index i = 0; i + 1 < M; ++i)
        for (Eigen::Index j = i; j + 1 < M; ++j)
            r.v_dagger.block(i * m, j * m, m, m) = inv_t[static_cast<std::size_t>(i)];
    r.psi.resize(M * m, m);
    for (Eigen::Index l = 0; l < M; ++l) r.psi.block(l * m, 0, m, m) = inv_t[static_cast<std::size_t>(l)];

    const double ident_err = max_abs(full.v_mat * r.v_dagger - Matrix::Identity((M - 1) * m, (M - 1) * m));
    const double null_err = max_abs(full.v_mat * r.psi);
    const double null_scale = std::max(1.0, max_abs(full.v_mat) * max_abs(r.psi));
    if (ident_err > 1e-8 * null_scale || null_err > 1e-8 * null_scale) {
        throw Error(ErrorCode::BlockInversionFailure, "right inverse or null-space identity violated");
    }

    r.a_ineq = full.h_mat * r.psi;
    r.b_ineq = full.h_vec - full.h_mat * (r.v_dagger * full.v_vec);
    r.v_last = full.bases.back().v_row;
    return r;
}

LpVerdict solve_feasibility(const ReducedLp& reduced, double min_margin) {
    const Eigen::Index m = reduced.m;
    lp::Problem prob;
    prob.objective = Vector::Zero(m + 1);
    prob.objective[m] = 1.0;
    prob.a_ub.resize(reduced.a_ineq.rows(), m + 1);
    prob.a_ub << reduced.a_ineq, Vector::Ones(reduced.a_ineq.rows());
    prob.b_ub = reduced.b_ineq;
    prob.a_eq.resize(0, m + 1);
    prob.b_eq.resize(0);

    const auto sol = lp::maximize(prob);
    if (sol.status != lp::Status::Optimal) {
        throw Error(ErrorCode::SolverFailure, "max-slack LP did not reach an optimum");
    }
    LpVerdict v;
    const Vector w = sol.x.head(m);
    // recompute the slack from the constraints rather than trusting the tableau
    v.margin = (reduced.b_ineq - reduced.a_ineq * w).minCoeff();
    v.feasible = v.margin > min_margin;
    if (v.feasible) {
        v.witness = w;
        v.gain = reduced.v_last + w.transpose();
    }
    return v;
}

FullLpVerdict solve_full_lp(const FullLp& full, double min_margin) {
    const auto n = full.v_mat.cols();
    lp::Problem prob;
    prob.objective = Vector::Zero(n + 1);
    prob.objective[n] = 1.0;
    prob.a_ub.resize(full.h_mat.rows(), n + 1);
    prob.a_ub << full.h_mat, Vector::Ones(full.h_mat.rows());
    prob.b_ub = full.h_vec;
    prob.a_eq.resize(full.v_mat.rows(), n + 1);
    prob.a_eq << full.v_mat, Vector::Zero(full.v_mat.rows());
    prob.b_eq = full.v_vec;

    const auto sol = lp::maximize(prob);
    FullLpVerdict v;
    if (sol.status == lp::Status::Infeasible) return v;
    if (sol.status != lp::Status::Optimal) throw Error(ErrorCode::SolverFailure, "full LP is unbounded");
    const Vector c = sol.x.head(n);
    v.margin = (full.h_vec - full.h_mat * c).minCoeff();
    v.feasible = v.margin > min_margin;
    if (v.feasible) {
        const Eigen::Index m = full.m;
        v.gain = c.segment(0, m).transpose() * full.bases.front().v_mat + full.bases.front().v_row;
        v.c = c;
    }
    return v;
}

LpVerdict simultaneous_stabilization(const std::vector<SystemPair>& pairs, double min_margin) {
    const auto full = build_full_lp(pairs);
    const auto reduced = reduce_lp(full);
    auto verdict = solve_feasibility(reduced, min_margin);
    if (verdict.gain) {
        // c = V^+ v + Psi w; every block must reproduce the same gain
        const Eigen::Index m = full.m;
        const Vector c = reduced.v_dagger * full.v_vec + reduced.psi * *verdict.witness;
        double spread = 0;
        for (std::size_t l = 0; l < full.bases.size(); ++l) {
            const auto off = static_cast<Eigen::Index>(l) * m;
            const RowVector k_l = c.segment(off, m).transpose() * full.bases[l].v_mat + full.bases[l].v_row;
            spread = std::max(spread, (k_l - *verdict.gain).cwiseAbs().maxCoeff());
        }
        verdict.gain_spread = spread;
    }
    return verdict;
}

bool verify_gain(const std::vector<SystemPair>& pairs, const RowVector& gain, double margin) {
    for (const auto& p : pairs) {
        if (gain.size() != p.order()) throw Error(ErrorCode::DimensionMismatch, "gain size mismatch");
        if (!is_schur(p.a() + p.b() * gain, margin)) return false;
    }
    return true;
}

void write_reduced_lp_csv(const ReducedLp& reduced, std::ostream& out) {
    for (int j = 0; j < reduced.m; ++j) out << "w_" << (j + 1) << ',';
    out << "rhs\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < reduced.a_ineq.rows(); ++i) {
        for (Eigen::Index j = 0; j < reduced.a_ineq.cols(); ++j) out << reduced.a_ineq(i, j) << ',';
        out << reduced.b_ineq[i] << '\n';
    }
}

}  // namespace limas
