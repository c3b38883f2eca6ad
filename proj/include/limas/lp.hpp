#pragma once

#include "limas/types.hpp"

namespace limas::lp {

enum class Status { Optimal, Infeasible, Unbounded };

/// maximize objective' x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,  x free.
struct Problem {
    Vector objective;
    Matrix a_ub;
    Vector b_ub;
    Matrix a_eq;
    Vector b_eq;
};

struct Solution {
    Status status = Status::Infeasible;
    Vector x;
    double value = 0;
    int iterations = 0;
};

/// Dense two-phase simplex with Bland's anti-cycling rule, applied to an
/// equilibrated copy of the problem. Throws SolverFailure on breakdown.
Solution maximize(const Problem& problem);

}  // namespace limas::lp
