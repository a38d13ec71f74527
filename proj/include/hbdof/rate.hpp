#pragma once

// Achievable-rate evaluation and Monte-Carlo SNR sweeps. Rates are computed
// analytically per channel draw as a log-determinant ratio (no noise
// sampling), in bits, so the high-SNR slope against log2(SNR) reads the sum
// DoF directly.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hbdof/beamform.hpp"

namespace hbdof {

/// The design's combiner is numerically non-injective.
struct InvalidDesignError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown by scheme factories when an iterative design did not converge;
/// recorded by sweeps as a failed trial.
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RatePoint {
    double snr_db = 0.0;
    std::vector<double> per_user_bits;  // per channel use, per slot
    double sum_bits = 0.0;
    int trials = 0;  // successful trials averaged into this point
    std::uint64_t seed = 0;
};

struct RateTable {
    std::vector<RatePoint> points;  // snr_db strictly increasing
    std::string scenario;
    int trials_requested = 0;
    int failures = 0;

    double failure_fraction() const {
        return trials_requested > 0 ? static_cast<double>(failures) / trials_requested : 0.0;
    }
};

/// More than 20% of trials failed; carries the partial table averaged over
/// the trials that did succeed.
struct SweepDegradedError : std::runtime_error {
    SweepDegradedError(std::string msg, RateTable table)
        : std::runtime_error(std::move(msg)), partial(std::move(table)) {}
    RateTable partial;
};

/// Per-user achievable rate in bits for one channel draw at transmit power P
/// (unit noise), over the design's whole extension:
///   log2|A_i + sum_j (P/d_j) He_ij He_ij^H| - log2|A_i + sum_{j!=i} ...|
/// with A_i the effective noise covariance of user i's combiners.
std::vector<double> sum_rate_instant(const HybridDesign& design,
                                     std::span<const ChannelRealization> slots, double power);

/// How a sweep synthesizes a design for each trial's channel draw.
struct SweepScheme {
    int slots = 1;  // symbol-extension length per trial
    std::function<HybridDesign(const NetworkConfig&, std::span<const ChannelRealization>, Rng&)>
        make_design;
    std::string name;
};

/// Monte-Carlo average of sum_rate_instant over per-trial channel draws.
/// Trial k runs on the sub-seed mix64(seed, k), so results are independent of
/// execution order; extended-channel rates are normalized per slot. Trials
/// whose design synthesis throws a runtime error are recorded as failures;
/// above 20% failures the sweep throws SweepDegradedError. Trials may run on
/// several workers (capped by the HDL_THREADS environment variable) with
/// bit-identical output.
RateTable mc_sweep(const NetworkConfig& cfg, const SweepScheme& scheme,
                   const std::vector<double>& snr_db, int trials, std::uint64_t seed);

/// Least-squares slope of sum_bits against log2(P) over the points with
/// lo_db <= snr_db <= hi_db. Needs at least two points in the window.
double estimate_dof(const RateTable& table, double lo_db, double hi_db);

}  // namespace hbdof
