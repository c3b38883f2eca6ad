#pragma once

#include <vector>

#include "limas/control.hpp"
#include "limas/random.hpp"

namespace limas::testing {

inline Matrix random_matrix(CounterRng& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

/// Controllable pair with entries in [-scale, scale]; redraws until the rank test passes.
inline SystemPair random_pair(CounterRng& rng, Eigen::Index m, double scale = 1.0) {
    while (true) {
        Matrix a = random_matrix(rng, m, m, -scale, scale);
        Vector b = random_matrix(rng, m, 1, -1.0, 1.0);
        if (is_controllable(a, b)) return SystemPair(std::move(a), std::move(b));
    }
}

}  // namespace limas::testing
