#pragma once

// Scenario files, scheme resolution, sweep execution and result formatting.
// A scenario is a strict UTF-8 JSON object (unknown keys are rejected)
// describing the network, the beamforming scheme, the SNR grid and the
// Monte-Carlo budget.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hbdof/dof.hpp"
#include "hbdof/rate.hpp"

namespace hbdof {

enum class Scheme { kAuto, kTwoUserZf, kKUserZf, kDia, kFullDigitalBaseline };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct DiaSettings {
    int max_iter = 5000;
    double leak_tol = 1e-6;

    friend bool operator==(const DiaSettings&, const DiaSettings&) = default;
};

struct Scenario {
    NetworkConfig config;
    Scheme scheme = Scheme::kAuto;
    std::optional<std::vector<int>> streams;  // per user, over the whole extension
    std::optional<int> extension_t;
    std::vector<double> snr_db;
    int trials = 1;
    std::uint64_t seed = 0;
    DiaSettings dia;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses a scenario from JSON text; throws std::invalid_argument on schema
/// violations (including unknown keys).
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);

/// A scenario resolved into something a sweep can run: the effective network
/// (full-digital baselines swap in the reduced antennas), the per-user stream
/// counts, the extension length and the design factory.
struct ResolvedScheme {
    NetworkConfig effective_config;
    std::vector<int> streams;
    SweepScheme sweep;
    Rat dof_lower;
    Rat dof_upper;
    std::string description;
};

/// Deterministic scheme selection: K=2 runs the two-user ZF design with the
/// optimal allocation; symmetric K>2 with K <= R runs single-slot ZF; anything
/// else runs iterative alignment with stream counts from the achievable
/// K-user bound (extended over T slots when the per-user bound is
/// fractional).
ResolvedScheme resolve_scheme(const Scenario& s);

struct ResultRecord {
    Scenario scenario;
    ResolvedScheme resolved;
    RateTable table;
    double estimated_dof = 0.0;
    double window_lo_db = 40.0;
    double window_hi_db = 60.0;
    bool degraded = false;  // more than 20% of trials failed
};

/// Runs the sweep for a scenario. A degraded sweep (over 20% failures) is
/// returned with the partial table and degraded=true rather than thrown.
ResultRecord run_scenario(const Scenario& s);

/// CSV emission: scenario header comments, a column-name row, then one row
/// per SNR point with columns snr_db, sum_rate_bits, rate_user_1.._K, trials,
/// failures. Numbers carry 6 significant digits.
std::string format_csv(const ResultRecord& record);

/// One-line JSON summary: estimated DoF, exact theoretical bounds, failure
/// fraction, the slope window and the scenario echo.
std::string format_summary(const ResultRecord& record);

struct PresetResult {
    std::vector<std::string> files;
    bool degraded = false;
};

/// Figure-reproduction presets. fig2/fig3/fig6 emit closed-form DoF curves;
/// fig4/fig5 run rate sweeps whose scenario is recorded in each file header.
PresetResult run_preset(const std::string& name, const std::string& outdir,
                        std::optional<int> trials_override,
                        std::optional<std::uint64_t> seed_override, std::ostream& log);

}  // namespace hbdof
