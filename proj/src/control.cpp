#include "limas/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "limas/error.hpp"

namespace limas {

SystemPair::SystemPair(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() == 0 || a_.rows() != a_.cols() || b_.size() != a_.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "system pair needs square A and matching B");
    }
}

SystemPair SystemPair::make(Matrix a, Vector b) {
    SystemPair p(std::move(a), std::move(b));
    if (!is_controllable(p.a(), p.b())) {
        throw Error(ErrorCode::SingularControllability, "pair is not controllable");
    }
    return p;
}

Matrix controllability_matrix(const Matrix& a, const Vector& b) {
    const auto m = a.rows();
    Matrix ctrb(m, m);
    Vector col = b;
    for (Eigen::Index j = 0; j < m; ++j) {
        ctrb.col(j) = col;
        col = a * col;
    }
    return ctrb;
}

bool is_controllable(const Matrix& a, const Vector& b) {
    const Matrix ctrb = controllability_matrix(a, b);
    Eigen::JacobiSVD<Matrix> svd(ctrb);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || !(s[0] > 0.0)) return false;
    return s[s.size() - 1] > 1e-10 * s[0];
}

RowVector last_row_inverse(const SystemPair& p) {
    if (!is_controllable(p.a(), p.b())) {
        throw Error(ErrorCode::SingularControllability, "controllability matrix is rank deficient");
    }
    const auto m = p.order();
    const Matrix ctrb = controllability_matrix(p);
    Vector e_last = Vector::Zero(m);
    e_last[m - 1] = 1.0;
    // r * ctrb = e_last^T  <=>  ctrb^T r^T = e_last
    Vector r = ctrb.transpose().fullPivLu().solve(e_last);
    return r.transpose();
}

AckermannBasis ackermann_basis(const SystemPair& p) {
    const auto m = p.order();
    RowVector row = last_row_inverse(p);
    AckermannBasis basis;
    basis.v_mat.resize(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        basis.v_mat.row(j) = -row;
        row = row * p.a();
    }
    basis.v_row = -row;
    return basis;
}

RowVector ackermann_gain(const SystemPair& p, const Vector& coeffs) {
    if (coeffs.size() != p.order()) {
        throw Error(ErrorCode::DimensionMismatch, "need one coefficient per state");
    }
    const auto basis = ackermann_basis(p);
    return coeffs.transpose() * basis.v_mat + basis.v_row;
}

Vector poly_from_roots(const std::vector<std::complex<double>>& roots) {
    // highest power first while multiplying out
    Eigen::VectorXcd c = Eigen::VectorXcd::Ones(1);
    for (const auto& r : roots) {
        Eigen::VectorXcd next = Eigen::VectorXcd::Zero(c.size() + 1);
        next.head(c.size()) += c;
        next.tail(c.size()) -= r * c;
        c = next;
    }
    const auto m = static_cast<Eigen::Index>(roots.size());
    Vector out(m);
    for (Eigen::Index j = 0; j < m; ++j) out[j] = c[m - j].real();
    return out;
}

Vector characteristic_coeffs(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    std::vector<std::complex<double>> roots(es.eigenvalues().data(),
                                            es.eigenvalues().data() + es.eigenvalues().size());
    return poly_from_roots(roots);
}

double spectral_radius(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::EigenSolver<Matrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_schur(const Matrix& m, double margin) { return spectral_radius(m) < 1.0 - margin; }

double sigma_c(const Matrix& a_bar) {
    Eigen::EigenSolver<Matrix> es(a_bar, false);
    double prod = 1.0;
    for (const auto& lam : es.eigenvalues()) {
        const double mod = std::abs(lam);
        if (mod > 1.0) prod *= mod * mod;
    }
    return 1.0 - 1.0 / prod;
}

namespace {

Matrix mare_map(const Matrix& a, const Vector& b, double sigma, const Matrix& p, double& btpb) {
    const Vector pb = p * b;
    btpb = b.dot(pb);
    const RowVector btpa = pb.transpose() * a;
    Matrix next = a.transpose() * p * a - (sigma / btpb) * btpa.transpose() * btpa;
    return 0.5 * (next + next.transpose());
}

}  // namespace

double mare_residual(const Matrix& a_bar, const Vector& b, double sigma, const Matrix& p) {
    double btpb = 0;
    const Matrix lhs = mare_map(a_bar, b, sigma, p, btpb) - p;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (lhs + lhs.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

MareSolution solve_mare(const Matrix& a_bar, const Vector& b, double sigma, double tol, int max_iter) {
    if (a_bar.rows() != a_bar.cols() || b.size() != a_bar.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "MARE needs square A and matching B");
    }
    if (!(sigma > 0.0 && sigma <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sigma must lie in (0, 1]");
    if (!is_controllable(a_bar, b)) throw Error(ErrorCode::SingularControllability, "MARE pair not controllable");
    const double crit = sigma_c(a_bar);
    if (sigma <= crit) {
        throw Error(ErrorCode::SigmaTooSmall,
                    "sigma = " + std::to_string(sigma) + " <= sigma_c = " + std::to_string(crit));
    }

    const auto m = a_bar.rows();
    const double anorm = a_bar.operatorNorm();
    const double eps = 1e-6 * (anorm > 0.0 ? anorm * anorm : 1.0);
    const Matrix offset = eps * Matrix::Identity(m, m);

    Matrix p = Matrix::Identity(m, m);
    for (int it = 1; it <= max_iter; ++it) {
        double btpb = 0;
        Matrix next = mare_map(a_bar, b, sigma, p, btpb) + offset;
        if (!(btpb >= 1e-14 * max_abs(p)) || !next.allFinite()) {
            throw Error(ErrorCode::NoConvergence, "B'PB degenerated during MARE iteration");
        }
        const double step = max_abs(next - p);
        const double scale = max_abs(p);
        p = std::move(next);
        if (step <= tol * scale) {
            MareSolution sol;
            sol.p_mat = p;
            sol.sigma = sigma;
            sol.residual = mare_residual(a_bar, b, sigma, p);
            sol.iterations = it;
            Eigen::SelfAdjointEigenSolver<Matrix> es(p, Eigen::EigenvaluesOnly);
            if (!(es.eigenvalues().minCoeff() > 0.0) || !(sol.residual < 0.0)) {
                throw Error(ErrorCode::NoConvergence, "fixed point is not a strict MARE solution");
            }
            return sol;
        }
    }
    throw Error(ErrorCode::NoConvergence, "MARE iteration budget exhausted");
}

}  // namespace limas
