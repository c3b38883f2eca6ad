#pragma once

#include "limas/graph.hpp"
#include "limas/types.hpp"

namespace limas {

/// x+ = (I_N (x) A - Lp (x) Ap + Lc (x) B K) x over N agents with n states.
class LimasModel {
public:
    /// Throws DimensionMismatch on inconsistent shapes or N < 2 and
    /// CyberGraphDisconnected when g_c is not connected.
    LimasModel(Matrix a, Matrix ap, Vector b, WeightedGraph g_p, WeightedGraph g_c);

    [[nodiscard]] const Matrix& a() const { return a_; }
    [[nodiscard]] const Matrix& ap() const { return ap_; }
    [[nodiscard]] const Vector& b() const { return b_; }
    [[nodiscard]] const WeightedGraph& g_p() const { return g_p_; }
    [[nodiscard]] const WeightedGraph& g_c() const { return g_c_; }
    [[nodiscard]] const Matrix& lp() const { return lp_; }
    [[nodiscard]] const Matrix& lc() const { return lc_; }
    [[nodiscard]] Eigen::Index n_agents() const { return lp_.rows(); }
    [[nodiscard]] Eigen::Index n_states() const { return a_.rows(); }

private:
    Matrix a_;
    Matrix ap_;
    Vector b_;
    WeightedGraph g_p_;
    WeightedGraph g_c_;
    Matrix lp_;
    Matrix lc_;
};

Matrix kron(const Matrix& x, const Matrix& y);

/// Nn x Nn matrix of the networked closed loop for gain K (1 x n).
Matrix closed_loop_matrix(const LimasModel& m, const RowVector& k);

/// Closed loop restricted to the disagreement subspace: with Q an orthonormal
/// basis of 1-perp, I (x) A - (Q'LpQ) (x) Ap + (Q'LcQ) (x) BK. Valid without
/// the Laplacians commuting.
Matrix reduced_closed_loop_matrix(const LimasModel& m, const RowVector& k);

}  // namespace limas
