#pragma once

// Hybrid precoder/combiner synthesis. Three construction families:
//   - the two-user zero-forcing design (analog nulling + receive ZF + SVD
//     diagonalization of the direct link),
//   - the K-user single-slot zero-forcing design, on either the receive or
//     the transmit side,
//   - iterative interference alignment by alternating leakage minimization
//     over the forward and reverse networks, optionally on a symbol-extended
//     channel.
// All returned analog precoders have unit-norm columns and all combiners have
// orthonormal columns, so the effective noise covariance stays the identity.

#include <span>
#include <utility>
#include <vector>

#include "hbdof/dof.hpp"
#include "hbdof/model.hpp"

namespace hbdof {

/// A probability-zero rank deficiency surfaced by tolerance checks.
struct DegenerateChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested scheme violates a dimension inequality; the message names it.
struct InfeasibleSchemeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UserDesign {
    ComplexMatrix analog_tx;   // M'(*T) x d, unit-norm columns
    ComplexMatrix digital_tx;  // d x d
    ComplexMatrix analog_rx;   // N'(*T) x d, orthonormal columns
    ComplexMatrix digital_rx;  // d x d, orthonormal columns
    int streams = 0;
    std::vector<double> direct_singulars;  // gains of the diagonalized direct link

    ComplexMatrix tx_combined() const { return analog_tx * digital_tx; }
    ComplexMatrix rx_combined() const { return analog_rx * digital_rx; }
};

struct HybridDesign {
    std::vector<UserDesign> users;
    int slots = 1;  // symbol-extension length the design lives on

    int total_streams() const;
};

struct LeakageTrace {
    std::vector<double> values;  // total leakage at unit per-stream power, per iteration
    bool converged = false;
    int iterations = 0;
};

struct DiaOptions {
    int max_iter = 5000;
    double leak_tol = 1e-6;  // absolute, at unit per-stream power
};

/// Two-user zero-forcing design for a feasible stream allocation. Also
/// accepts a single-user realization (no interference) with a zero cross
/// allocation, reducing to SVD beamforming of the restricted direct channel.
HybridDesign design_two_user_zf(const NetworkConfig& cfg, const ChannelRealization& r,
                                const TwoUserAllocation& alloc, Rng& rng,
                                double rel_tol = kDefaultRankTol);

enum class NullingSide { kReceive, kTransmit };

/// K-user zero-forcing with d streams per user. The receive side nulls the
/// stacked interference at each receiver and requires K*d <= N'. The transmit
/// side is the reciprocal scheme: receivers commit to random analog
/// combiners, and each transmitter's beams live in the kernel of the cross
/// links projected through those combiners, requiring K*d <= M'.
HybridDesign design_k_user_zf(const NetworkConfig& cfg, const ChannelRealization& r, int streams,
                              NullingSide side, Rng& rng, double rel_tol = kDefaultRankTol);

struct DiaResult {
    HybridDesign design;
    LeakageTrace trace;
};

/// Alternating leakage minimization over the (extended) channel. streams[i]
/// is user i's stream count over the whole extension. Non-convergence is
/// reported through the trace, not thrown.
DiaResult design_dia(const NetworkConfig& cfg, std::span<const ChannelRealization> slots,
                     const std::vector<int>& streams, double power, const DiaOptions& opts,
                     Rng& rng);

/// Total residual interference power
///   sum_i sum_{j != i} (P_j / d_j) * ||U_i^H H_ij W_j||_F^2
/// with combined transmit/receive matrices; zero iff every effective cross
/// channel vanishes.
double leakage(const HybridDesign& design, std::span<const ChannelRealization> slots,
               const std::vector<double>& powers);

/// Splits a combined precoder into a unit-column analog stage and a diagonal
/// digital stage; the product reconstructs the input exactly.
std::pair<ComplexMatrix, ComplexMatrix> factor_hybrid(const ComplexMatrix& combined,
                                                      int rf_chains);

}  // namespace hbdof
