#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "limas/control.hpp"
#include "limas/types.hpp"

namespace limas {

constexpr int kMaxSignOrder = 16;

/// All 2^m rows of {-1, +1}^m in binary-counting order; bit 0 maps to -1
/// and column 0 is the most significant bit.
struct SignMatrix {
    int m = 0;
    Matrix rows;
};

SignMatrix sign_matrix(int m);

/// Equality/inequality data of the c-parameterized LP:
/// V c = v, H c <= h with H = I_M (x) Gamma and h = 1.
struct FullLp {
    int m = 0;
    int n_systems = 0;
    Matrix v_mat;
    Vector v_vec;
    Matrix h_mat;
    Vector h_vec;
    std::vector<AckermannBasis> bases;
};

FullLp build_full_lp(const std::vector<SystemPair>& pairs);

/// Reduced LP in the null-space coordinate w: a_ineq w <= b_ineq,
/// a_ineq = H Psi and b_ineq = h - H V^+ v.
struct ReducedLp {
    int m = 0;
    Matrix a_ineq;
    Vector b_ineq;
    Matrix v_dagger;
    Matrix psi;
    RowVector v_last;  // v_M
};

/// Assembles V^+ and Psi from block inverses and checks V V^+ = I, V Psi = 0.
/// Throws BlockInversionFailure.
ReducedLp reduce_lp(const FullLp& full);

struct LpVerdict {
    bool feasible = false;
    double margin = 0;  // optimal t of max t s.t. a_ineq w + t 1 <= b_ineq
    std::optional<Vector> witness;
    std::optional<RowVector> gain;
    double gain_spread = 0;  // max deviation among c_l' V_l + v_l, when computed
};

constexpr double kDefaultMinMargin = 1e-9;

/// Feasible iff the optimal slack exceeds min_margin; then K = v_M + w'.
LpVerdict solve_feasibility(const ReducedLp& reduced, double min_margin = kDefaultMinMargin);

/// Solves max t s.t. V c = v, H c + t 1 <= h directly (no reduction) and
/// returns K = c_1' V_1 + v_1. Used to cross-check the reduced route.
struct FullLpVerdict {
    bool feasible = false;
    double margin = 0;
    std::optional<Vector> c;
    std::optional<RowVector> gain;
};

FullLpVerdict solve_full_lp(const FullLp& full, double min_margin = kDefaultMinMargin);

/// Runs build, reduce and solve in sequence.
LpVerdict simultaneous_stabilization(const std::vector<SystemPair>& pairs,
                                     double min_margin = kDefaultMinMargin);

/// True iff A_l + B_l K is Schur with the given margin for every pair.
bool verify_gain(const std::vector<SystemPair>& pairs, const RowVector& gain, double margin = kSchurMargin);

/// CSV dump of [a_ineq | b_ineq]; header w_1..w_m,rhs.
void write_reduced_lp_csv(const ReducedLp& reduced, std::ostream& out);

}  // namespace limas
