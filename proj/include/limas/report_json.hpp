#pragma once

#include <json.hpp>

#include "limas/consensus.hpp"

namespace limas {

/// Rounds to `digits` significant digits so serialized reports stay
/// byte-stable across platforms; non-finite values pass through.
double round_significant(double x, int digits = 12);

/// Fixed field set: test, verdict, gain, gamma_c, delta_p, sigma_c, sigma,
/// k_star, intervals, n_flags, margin, message. Absent or infinite values
/// serialize as null.
nlohmann::ordered_json to_json(const TestReport& r);
nlohmann::ordered_json to_json(const std::vector<TestReport>& reports);

}  // namespace limas
