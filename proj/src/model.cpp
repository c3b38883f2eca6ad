#include "limas/model.hpp"

#include "limas/error.hpp"

namespace limas {

LimasModel::LimasModel(Matrix a, Matrix ap, Vector b, WeightedGraph g_p, WeightedGraph g_c)
    : a_(std::move(a)), ap_(std::move(ap)), b_(std::move(b)), g_p_(std::move(g_p)), g_c_(std::move(g_c)) {
    const auto n = a_.rows();
    if (n == 0 || a_.cols() != n || ap_.rows() != n || ap_.cols() != n || b_.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "A, Ap must be n x n and B n x 1");
    }
    if (g_p_.n_nodes() != g_c_.n_nodes()) {
        throw Error(ErrorCode::DimensionMismatch, "physical and cyber graphs must have the same node count");
    }
    if (g_c_.n_nodes() < 2) throw Error(ErrorCode::DimensionMismatch, "need at least two agents");
    if (!a_.allFinite() || !ap_.allFinite() || !b_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "model matrices must be finite");
    }
    if (!is_connected(g_c_)) throw Error(ErrorCode::CyberGraphDisconnected, "cyber graph is not connected");
    lp_ = laplacian(g_p_);
    lc_ = laplacian(g_c_);
}

Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

namespace {

Matrix assemble(const Matrix& eye, const Matrix& lp, const Matrix& lc, const LimasModel& m, const RowVector& k) {
    if (k.size() != m.n_states()) throw Error(ErrorCode::DimensionMismatch, "gain must be 1 x n");
    const Matrix bk = m.b() * k;
    return kron(eye, m.a()) - kron(lp, m.ap()) + kron(lc, bk);
}

}  // namespace

Matrix closed_loop_matrix(const LimasModel& m, const RowVector& k) {
    const auto N = m.n_agents();
    return assemble(Matrix::Identity(N, N), m.lp(), m.lc(), m, k);
}

Matrix reduced_closed_loop_matrix(const LimasModel& m, const RowVector& k) {
    const auto N = m.n_agents();
    const Matrix q = zero_average_basis(static_cast<std::size_t>(N));
    return assemble(Matrix::Identity(N - 1, N - 1), q.transpose() * m.lp() * q, q.transpose() * m.lc() * q, m, k);
}

}  // namespace limas
