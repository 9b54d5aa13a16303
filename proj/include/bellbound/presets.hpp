#pragma once

// Ready-made behaviors for the two-setting/two-outcome bipartite scenario,
// used by the command-line examples and the regression suite.

#include <cmath>
#include <string>
#include <vector>

#include "bellbound/errors.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

// The bipartite scenario with two dichotomic settings per party.
inline Scenario chsh_scenario() { return Scenario::homogeneous(2, 2, 2); }

// Correlation-form behavior p(ab|xy) = (1 + e (-1)^(a+b+xy)) / 4: every
// correlator <A_x B_y> equals e up to the sign pattern of the two-setting
// game.
inline Behavior correlated_behavior(double e) {
    if (!(std::abs(e) <= 1.0)) {
        throw InvalidInputError("correlator strength must lie in [-1, 1], got " +
                                std::to_string(e));
    }
    const Scenario s = chsh_scenario();
    std::vector<double> flat(s.flat_dimension(), 0.0);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const int mt[2] = {x, y};
            const std::size_t m = s.setting_index(mt);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const int at[2] = {a, b};
                    const double sign = (a + b + x * y) % 2 == 0 ? 1.0 : -1.0;
                    flat[s.flat_offset(m) + s.outcome_index(mt, at)] =
                        (1.0 + sign * e) / 4.0;
                }
            }
        }
    }
    return Behavior(s, std::move(flat));
}

// Quantum-optimal behavior for the two-setting game: correlators 1/sqrt(2),
// game value 2 sqrt(2).
inline Behavior tsirelson_behavior() {
    return correlated_behavior(1.0 / std::sqrt(2.0));
}

// Symmetric behavior with correlator alpha; it stays inside the local set
// exactly when |alpha| <= 1/2.
inline Behavior symmetric_local_behavior(double alpha) {
    return correlated_behavior(alpha);
}

}  // namespace bellbound
