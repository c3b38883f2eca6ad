#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "limas/types.hpp"

namespace limas {

/// Undirected edge with 0-based endpoints (the JSON surface is 1-based).
struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph over agents 0..n-1. Construction validates the
/// invariants: no self-loops, no duplicate unordered pairs, positive weights.
class WeightedGraph {
public:
    explicit WeightedGraph(std::size_t n_nodes, std::vector<Edge> edges = {});

    [[nodiscard]] std::size_t n_nodes() const { return n_nodes_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] std::size_t n_edges() const { return edges_.size(); }

    /// Copy with every weight multiplied by `factor` (> 0).
    [[nodiscard]] WeightedGraph scaled(double factor) const;

    /// Copy with the edges at the given positions removed.
    [[nodiscard]] WeightedGraph without_edges(const std::vector<std::size_t>& positions) const;

    friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

private:
    std::size_t n_nodes_;
    std::vector<Edge> edges_;
};

// Topology generators.
WeightedGraph complete_graph(std::size_t n, double weight);
WeightedGraph circle_graph(std::size_t n, double weight);
WeightedGraph star_graph(std::size_t n, double weight);
WeightedGraph path_graph(std::size_t n, double weight);

/// L = D - A.
Matrix laplacian(const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);

struct LaplacianSpectrum {
    Vector eigenvalues;     // ascending; eigenvalues[0] ~ 0
    double eigenratio = 1;  // lambda_max / lambda_2 over indices 2..N; +inf if lambda_2 ~ 0
    double delta = 0;       // lambda_max - lambda_2

    [[nodiscard]] double lambda_min() const { return eigenvalues.size() > 1 ? eigenvalues[1] : 0.0; }
    [[nodiscard]] double lambda_max() const {
        return eigenvalues.size() > 1 ? eigenvalues[eigenvalues.size() - 1] : 0.0;
    }
};

/// Throws NotALaplacian when L is asymmetric, has nonzero row sums or a
/// negative eigenvalue beyond tolerance.
LaplacianSpectrum spectrum(const Matrix& L);

/// Default tolerance for commute_check: 1e-8 * max(|Lp|_max, |Lc|_max).
double default_commute_tol(const Matrix& Lp, const Matrix& Lc);

bool commute_check(const Matrix& Lp, const Matrix& Lc, double tol);
inline bool commute_check(const Matrix& Lp, const Matrix& Lc) {
    return commute_check(Lp, Lc, default_commute_tol(Lp, Lc));
}

struct ModalPair {
    double lambda_p = 0;
    double lambda_c = 0;
};

/// Shared eigenbasis of two commuting Laplacians. Column 0 of phi is exactly
/// 1/sqrt(N); pairs[k] belongs to column k + 1 of phi.
struct ModalDecomposition {
    Matrix phi;
    std::vector<ModalPair> pairs;
};

/// Diagonalizes a generic combination Lp + mu*Lc on the zero-average
/// subspace, so pairing follows shared eigenvectors rather than magnitude
/// order. Throws NotCommuting, CyberGraphDisconnected or
/// NotSimultaneouslyDiagonalizable.
ModalDecomposition modal_decomposition(const Matrix& Lp, const Matrix& Lc, double tol);
inline ModalDecomposition modal_decomposition(const Matrix& Lp, const Matrix& Lc) {
    return modal_decomposition(Lp, Lc, default_commute_tol(Lp, Lc));
}

/// Orthonormal N x (N-1) basis of the zero-average subspace.
Matrix zero_average_basis(std::size_t n);

}  // namespace limas
