#include "limas/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "limas/error.hpp"
#include "limas/random.hpp"

namespace limas {

WeightedGraph::WeightedGraph(std::size_t n_nodes, std::vector<Edge> edges)
    : n_nodes_(n_nodes), edges_(std::move(edges)) {
    if (n_nodes_ == 0) throw Error(ErrorCode::InvalidGraph, "graph needs at least one node");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges_) {
        if (e.i >= n_nodes_ || e.j >= n_nodes_) {
            throw Error(ErrorCode::InvalidGraph, "edge endpoint out of range: (" + std::to_string(e.i + 1) +
                                                     "," + std::to_string(e.j + 1) + ")");
        }
        if (e.i == e.j) throw Error(ErrorCode::InvalidGraph, "self-loop at node " + std::to_string(e.i + 1));
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw Error(ErrorCode::InvalidGraph, "edge weights must be positive and finite");
        }
        auto key = std::minmax(e.i, e.j);
        if (!seen.insert(key).second) {
            throw Error(ErrorCode::InvalidGraph, "duplicate edge (" + std::to_string(key.first + 1) + "," +
                                                     std::to_string(key.second + 1) + ")");
        }
    }
}

WeightedGraph WeightedGraph::scaled(double factor) const {
    if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
    auto edges = edges_;
    for (auto& e : edges) e.weight *= factor;
    return WeightedGraph(n_nodes_, std::move(edges));
}

WeightedGraph WeightedGraph::without_edges(const std::vector<std::size_t>& positions) const {
    std::set<std::size_t> drop(positions.begin(), positions.end());
    std::vector<Edge> kept;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        if (!drop.contains(k)) kept.push_back(edges_[k]);
    }
    return WeightedGraph(n_nodes_, std::move(kept));
}

WeightedGraph complete_graph(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph circle_graph(std::size_t n, double weight) {
    if (n < 3) return path_graph(n, weight);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph star_graph(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t j = 1; j < n; ++j) edges.push_back({0, j, weight});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph path_graph(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
    return WeightedGraph(n, std::move(edges));
}

Matrix laplacian(const WeightedGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.n_nodes());
    Matrix L = Matrix::Zero(n, n);
    for (const auto& e : g.edges()) {
        const auto i = static_cast<Eigen::Index>(e.i);
        const auto j = static_cast<Eigen::Index>(e.j);
        L(i, i) += e.weight;
        L(j, j) += e.weight;
        L(i, j) -= e.weight;
        L(j, i) -= e.weight;
    }
    return L;
}

bool is_connected(const WeightedGraph& g) {
    const std::size_t n = g.n_nodes();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : g.edges()) {
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
    }
    std::vector<bool> visited(n, false);
    std::vector<std::size_t> stack{0};
    visited[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (auto v : adj[u]) {
            if (!visited[v]) {
                visited[v] = true;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

namespace {

double laplacian_tol(const Matrix& L) { return 1e-10 + 1e-8 * max_abs(L); }

}  // namespace

LaplacianSpectrum spectrum(const Matrix& L) {
    if (L.rows() != L.cols() || L.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "Laplacian must be square and non-empty");
    }
    const double tol = laplacian_tol(L);
    if (max_abs(L - L.transpose()) > tol) throw Error(ErrorCode::NotALaplacian, "matrix is not symmetric");
    if (L.rows() > 1 && L.rowwise().sum().cwiseAbs().maxCoeff() > tol) {
        throw Error(ErrorCode::NotALaplacian, "row sums are not zero");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(L, Eigen::EigenvaluesOnly);
    LaplacianSpectrum s;
    s.eigenvalues = es.eigenvalues();
    if (s.eigenvalues[0] < -tol) throw Error(ErrorCode::NotALaplacian, "negative eigenvalue");
    if (s.eigenvalues.size() > 1) {
        const double lmin = s.lambda_min();
        const double lmax = s.lambda_max();
        s.delta = lmax - lmin;
        s.eigenratio = lmin > tol ? lmax / lmin : std::numeric_limits<double>::infinity();
    }
    return s;
}

double default_commute_tol(const Matrix& Lp, const Matrix& Lc) {
    return 1e-8 * std::max(max_abs(Lp), max_abs(Lc));
}

bool commute_check(const Matrix& Lp, const Matrix& Lc, double tol) {
    if (Lp.rows() != Lc.rows() || Lp.cols() != Lc.cols() || Lp.rows() != Lp.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "Laplacians must be square and of equal size");
    }
    return max_abs(Lp * Lc - Lc * Lp) <= tol;
}

Matrix zero_average_basis(std::size_t n) {
    const auto N = static_cast<Eigen::Index>(n);
    if (N <= 1) return Matrix::Zero(N, 0);
    // Householder reflector mapping e_1 onto 1/sqrt(N); its other columns span
    // the complement of the consensus direction.
    Vector u = Vector::Constant(N, -1.0 / std::sqrt(static_cast<double>(N)));
    u[0] += 1.0;
    u.normalize();
    Matrix H = Matrix::Identity(N, N) - 2.0 * u * u.transpose();
    return H.rightCols(N - 1);
}

ModalDecomposition modal_decomposition(const Matrix& Lp, const Matrix& Lc, double tol) {
    if (!commute_check(Lp, Lc, tol)) throw Error(ErrorCode::NotCommuting, "Laplacians do not commute");
    const auto N = Lp.rows();
    const Matrix Q = zero_average_basis(static_cast<std::size_t>(N));
    const Matrix Lp_r = Q.transpose() * Lp * Q;
    const Matrix Lc_r = Q.transpose() * Lc * Q;

    const double norm_p = max_abs(Lp);
    const double norm_c = max_abs(Lc);
    if (N > 1 && norm_c == 0.0) throw Error(ErrorCode::CyberGraphDisconnected, "cyber Laplacian is zero");
    const double scale = norm_p > 0.0 ? norm_p / norm_c : 1.0;

    constexpr int kAttempts = 5;
    CounterRng rng(0x5eedULL, "modal_decomposition");
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        const double mu = scale * rng.uniform(0.5, 1.5);
        Eigen::SelfAdjointEigenSolver<Matrix> es(Lp_r + mu * Lc_r);
        if (es.info() != Eigen::Success) continue;
        const Matrix& U = es.eigenvectors();
        const Matrix Dp = U.transpose() * Lp_r * U;
        const Matrix Dc = U.transpose() * Lc_r * U;
        const Matrix off_p = Dp - Matrix(Dp.diagonal().asDiagonal());
        const Matrix off_c = Dc - Matrix(Dc.diagonal().asDiagonal());
        if (norm_p > 0.0 && max_abs(off_p) > 1e-7 * norm_p) continue;
        if (max_abs(off_c) > 1e-7 * norm_c) continue;

        ModalDecomposition md;
        md.phi.resize(N, N);
        md.phi.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(N)));
        md.phi.rightCols(N - 1) = Q * U;
        md.pairs.reserve(static_cast<std::size_t>(N - 1));
        for (Eigen::Index k = 0; k < N - 1; ++k) {
            const double lc = Dc(k, k);
            if (!(lc > 1e-8 * norm_c)) {
                throw Error(ErrorCode::CyberGraphDisconnected, "cyber Laplacian has a repeated zero eigenvalue");
            }
            md.pairs.push_back({Dp(k, k), lc});
        }
        return md;
    }
    throw Error(ErrorCode::NotSimultaneouslyDiagonalizable,
                "no combination of the Laplacians diagonalized both within tolerance");
}

}  // namespace limas
