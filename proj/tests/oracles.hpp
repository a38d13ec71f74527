#pragma once

// Test-only oracles, independent of the library implementations they check.

#include <algorithm>
#include <cmath>

#include "hbdof/model.hpp"

namespace hbdof::test {

/// Exhaustive integer maximization of d1+d2 over the six two-user stream
/// conditions, restated here directly from their definition.
inline int brute_force_two_user_dof(const NetworkConfig& cfg) {
    const UserProfile& u1 = cfg.users.at(0);
    const UserProfile& u2 = cfg.users.at(1);
    const int cap1 = std::min(u1.m_rf, u1.n_rf);
    const int cap2 = std::min(u2.m_rf, u2.n_rf);
    const int null1 = std::max(0, u1.m_ant - u2.n_ant);
    const int null2 = std::max(0, u2.m_ant - u1.n_ant);

    int best = 0;
    for (int d11 = 0; d11 <= null1 && d11 <= cap1; ++d11) {
        for (int d10 = 0; d10 <= cap1; ++d10) {
            const int d1 = d11 + d10;
            if (d1 > cap1) continue;
            for (int d22 = 0; d22 <= null2 && d22 <= cap2; ++d22) {
                for (int d20 = 0; d20 <= cap2; ++d20) {
                    const int d2 = d22 + d20;
                    if (d2 > cap2) continue;
                    if (d1 + d20 > u1.n_ant) continue;
                    if (d2 + d10 > u2.n_ant) continue;
                    best = std::max(best, d1 + d2);
                }
            }
        }
    }
    return best;
}

}  // namespace hbdof::test
