#pragma once

#include <Eigen/Dense>

namespace limas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Infinity norm over entries (max |a_ij|); 0 for empty matrices.
inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace limas
