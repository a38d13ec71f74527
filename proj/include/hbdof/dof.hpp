#pragma once

// Closed-form sum-DoF calculators for the K-user interference channel with
// hybrid beam-forming, the two-user stream allocation, and the symbol
// extension stream-count arithmetic. All DoF outputs are exact rationals so
// values like 4/3 per user compare without rounding.

#include <cstdint>
#include <gmpxx.h>
#include <optional>
#include <string>
#include <vector>

#include "hbdof/model.hpp"

namespace hbdof {

using BigInt = mpz_class;
using Rat = mpq_class;

inline std::string to_string(const Rat& q) { return q.get_str(); }
inline double to_double(const Rat& q) { return q.get_d(); }

/// DoF of the point-to-point channel with M<=M' transmit and N<=N' receive
/// RF chains/antennas: min{M, N}.
int dof_ptp(int m_rf, int m_ant, int n_rf, int n_ant);

/// Sum DoF of the multiple access channel: min{sum M_i, N}.
int dof_mac(const std::vector<int>& m_rfs, int n_rf);

/// Sum DoF of the broadcast channel: min{M, sum N_i}.
int dof_bc(int m_rf, const std::vector<int>& n_rfs);

/// Exact sum DoF of the two-user channel:
/// min{M1+M2, N1+N2, M1+N2, M2+N1, max{M1',N2'}, max{M2',N1'}}.
int dof_two_user(const NetworkConfig& cfg);

/// Stream split for the two-user zero-forcing design. d_i = d_ii + d_i0 where
/// d_ii streams are nulled at the analog stage and d_i0 are handled by
/// receive zero forcing.
struct TwoUserAllocation {
    int d1 = 0, d11 = 0, d10 = 0;
    int d2 = 0, d22 = 0, d20 = 0;

    friend bool operator==(const TwoUserAllocation&, const TwoUserAllocation&) = default;
};

/// True iff the six stream-count conditions of the two-user design hold for
/// this config.
bool allocation_feasible(const NetworkConfig& cfg, const TwoUserAllocation& a);

/// Allocation maximizing d1+d2 subject to the feasibility conditions;
/// ties broken by maximizing d11+d22, then d1. The achieved sum always equals
/// dof_two_user(cfg).
TwoUserAllocation alloc_two_user(const NetworkConfig& cfg);

struct DofBounds {
    Rat lower;
    Rat upper;
    int ratio;  // R = floor(max{M',N'} / min{M',N'})
};

/// Achievable lower and converse upper bound on the sum DoF of the symmetric
/// K-user channel. The bounds coincide whenever max{M',N'}/min{M',N'} is an
/// integer.
DofBounds dof_k_user_bounds(int k, int m_rf, int m_ant, int n_rf, int n_ant);

/// Ratio of the hybrid sum DoF to the full-digital sum DoF with the same
/// RF-chain counts (the exact two-user value for K<=2, the achievable K-user
/// bound otherwise). Never exceeds 2.
Rat hybrid_gain_ratio(const NetworkConfig& cfg);

/// Stream-count bookkeeping for the asymptotic interference-alignment scheme
/// over a T = (R+1)(n+1)^p symbol extension.
struct ExtensionPlan {
    int ratio = 0;       // R
    BigInt exponent;     // p (astronomical for real parameters unless overridden)
    BigInt extension;    // T
    int k1 = 0;          // floor((R+1)/M')
    long n = 0;
    std::vector<BigInt> simo_streams;  // d_i^s for the K*M' SIMO users
    std::vector<BigInt> columns;       // c_i per real user
    std::vector<BigInt> streams;       // d_i = min{M*T, N*T, c_i}
    Rat sum_dof;                       // (sum d_i) / T
    Rat limit;                         // lim n->inf of sum_dof
    bool swapped = false;              // true if reciprocity swap (M' > N') applied
};

/// Builds the extension plan for the interference-alignment regime (K > R).
/// When M' > N' the reciprocity swap is applied internally. p_override
/// replaces the astronomically large exponent for testing.
ExtensionPlan extension_plan(int k, int m_rf, int m_ant, int n_rf, int n_ant, long n,
                             std::optional<long> p_override = std::nullopt);

/// lim n->inf of (sum d_i)/T = K * min{R*min{M',N'}/(R+1), M, N}.
Rat extension_limit(int k, int m_rf, int m_ant, int n_rf, int n_ant);

}  // namespace hbdof
