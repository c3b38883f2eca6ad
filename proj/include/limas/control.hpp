#pragma once

#include <complex>
#include <vector>

#include "limas/types.hpp"

namespace limas {

/// Single-input pair (A, B) with A m x m and B m x 1. The checked factory
/// `make` rejects uncontrollable pairs; the raw constructor only checks shapes.
class SystemPair {
public:
    SystemPair(Matrix a, Vector b);

    /// Throws SingularControllability if (a, b) is not controllable.
    static SystemPair make(Matrix a, Vector b);

    [[nodiscard]] const Matrix& a() const { return a_; }
    [[nodiscard]] const Vector& b() const { return b_; }
    [[nodiscard]] Eigen::Index order() const { return a_.rows(); }

private:
    Matrix a_;
    Vector b_;
};

/// V_l (rows -r A^j, j = 0..m-1) and v_l = -r A^m for the controller
/// parameterization K = c^T V_l + v_l.
struct AckermannBasis {
    Matrix v_mat;
    RowVector v_row;
};

/// [B, AB, ..., A^{m-1} B].
Matrix controllability_matrix(const Matrix& a, const Vector& b);
inline Matrix controllability_matrix(const SystemPair& p) { return controllability_matrix(p.a(), p.b()); }

/// Scale-invariant rank test: sigma_min > 1e-10 * sigma_max.
bool is_controllable(const Matrix& a, const Vector& b);

/// Last row of the inverse controllability matrix.
RowVector last_row_inverse(const SystemPair& p);

AckermannBasis ackermann_basis(const SystemPair& p);

/// Gain placing the characteristic polynomial
/// z^m + c_{m-1} z^{m-1} + ... + c_0; `coeffs` holds (c_0, ..., c_{m-1}).
RowVector ackermann_gain(const SystemPair& p, const Vector& coeffs);

/// Monic polynomial coefficients (c_0, ..., c_{m-1}) with the given roots.
/// Complex roots must come in conjugate pairs.
Vector poly_from_roots(const std::vector<std::complex<double>>& roots);

/// Coefficients (c_0, ..., c_{m-1}) of det(zI - M).
Vector characteristic_coeffs(const Matrix& m);

double spectral_radius(const Matrix& m);

constexpr double kSchurMargin = 1e-9;

/// rho(M) < 1 - margin.
bool is_schur(const Matrix& m, double margin = kSchurMargin);

/// 1 - 1 / prod |lambda_u|^2 over eigenvalues with modulus > 1; 0 if Schur.
double sigma_c(const Matrix& a_bar);

struct MareSolution {
    Matrix p_mat;
    double sigma = 1;
    double residual = 0;  // max eigenvalue of the MARE left-hand side
    int iterations = 0;
};

/// Largest eigenvalue of A'PA - sigma A'PB (B'PB)^{-1} B'PA - P.
double mare_residual(const Matrix& a_bar, const Vector& b, double sigma, const Matrix& p);

/// Fixed-point iteration P <- A'PA - sigma A'PB (B'PB)^{-1} B'PA + eps I from
/// P = I. Throws SigmaTooSmall when sigma <= sigma_c(a_bar) and
/// NoConvergence when the budget runs out or B'PB degenerates.
MareSolution solve_mare(const Matrix& a_bar, const Vector& b, double sigma, double tol = 1e-10,
                        int max_iter = 10000);

}  // namespace limas
