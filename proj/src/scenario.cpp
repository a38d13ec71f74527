#include "hbdof/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace hbdof {

using nlohmann::json;

namespace {

std::string fmt6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument("scenario: unknown key '" + item.key() + "' in " + where);
        }
    }
}

const json& require_key(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) {
        throw std::invalid_argument("scenario: missing key '" + std::string(key) + "' in " + where);
    }
    return obj.at(key);
}

}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::kAuto: return "auto";
        case Scheme::kTwoUserZf: return "two_user_zf";
        case Scheme::kKUserZf: return "k_user_zf";
        case Scheme::kDia: return "dia";
        case Scheme::kFullDigitalBaseline: return "full_digital_baseline";
    }
    return "auto";
}

Scheme scheme_from_name(const std::string& name) {
    for (Scheme s : {Scheme::kAuto, Scheme::kTwoUserZf, Scheme::kKUserZf, Scheme::kDia,
                     Scheme::kFullDigitalBaseline}) {
        if (scheme_name(s) == name) return s;
    }
    throw std::invalid_argument(
        "scenario: unknown scheme '" + name +
        "' (expected auto, two_user_zf, k_user_zf, dia or full_digital_baseline)");
}

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
    try {
        if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");
        reject_unknown_keys(j, "scenario",
                            {"config", "scheme", "streams", "extension_T", "snr_db", "trials",
                             "seed", "dia"});

        Scenario s;
        const json& cfg = require_key(j, "scenario", "config");
        reject_unknown_keys(cfg, "config", {"users"});
        for (const json& u : require_key(cfg, "config", "users")) {
            reject_unknown_keys(u, "config.users[]", {"m_rf", "m_ant", "n_rf", "n_ant"});
            s.config.users.push_back(UserProfile{require_key(u, "user", "m_rf").get<int>(),
                                                 require_key(u, "user", "m_ant").get<int>(),
                                                 require_key(u, "user", "n_rf").get<int>(),
                                                 require_key(u, "user", "n_ant").get<int>()});
        }
        s.config.validate();

        s.scheme = scheme_from_name(require_key(j, "scenario", "scheme").get<std::string>());
        if (j.contains("streams")) {
            s.streams = j.at("streams").get<std::vector<int>>();
            if (s.streams->size() != s.config.users.size()) {
                throw std::invalid_argument("scenario: streams must list one count per user");
            }
        }
        if (j.contains("extension_T")) {
            s.extension_t = j.at("extension_T").get<int>();
            if (*s.extension_t < 1) throw std::invalid_argument("scenario: extension_T must be >= 1");
        }
        s.snr_db = require_key(j, "scenario", "snr_db").get<std::vector<double>>();
        s.trials = require_key(j, "scenario", "trials").get<int>();
        if (s.trials < 1) throw std::invalid_argument("scenario: trials must be >= 1");
        s.seed = require_key(j, "scenario", "seed").get<std::uint64_t>();
        if (j.contains("dia")) {
            const json& d = j.at("dia");
            reject_unknown_keys(d, "dia", {"max_iter", "leak_tol"});
            if (d.contains("max_iter")) s.dia.max_iter = d.at("max_iter").get<int>();
            if (d.contains("leak_tol")) s.dia.leak_tol = d.at("leak_tol").get<double>();
            if (s.dia.max_iter < 1 || !(s.dia.leak_tol > 0.0)) {
                throw std::invalid_argument("scenario: dia options out of range");
            }
        }
        return s;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    json j;
    json users = json::array();
    for (const UserProfile& u : s.config.users) {
        users.push_back({{"m_rf", u.m_rf}, {"m_ant", u.m_ant}, {"n_rf", u.n_rf}, {"n_ant", u.n_ant}});
    }
    j["config"] = {{"users", users}};
    j["scheme"] = scheme_name(s.scheme);
    if (s.streams) j["streams"] = *s.streams;
    if (s.extension_t) j["extension_T"] = *s.extension_t;
    j["snr_db"] = s.snr_db;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    if (!(s.dia == DiaSettings{})) {
        j["dia"] = {{"max_iter", s.dia.max_iter}, {"leak_tol", s.dia.leak_tol}};
    }
    return j.dump();
}

// ---------------------------------------------------------------------------
// Scheme resolution
// ---------------------------------------------------------------------------

namespace {

// allocation with prescribed stream totals, nulling as much as possible
TwoUserAllocation alloc_for_streams(const NetworkConfig& cfg, int d1, int d2) {
    TwoUserAllocation best;
    bool found = false;
    for (int d11 = 0; d11 <= d1; ++d11) {
        for (int d22 = 0; d22 <= d2; ++d22) {
            const TwoUserAllocation a{d1, d11, d1 - d11, d2, d22, d2 - d22};
            if (!allocation_feasible(cfg, a)) continue;
            if (!found || a.d11 + a.d22 > best.d11 + best.d22) {
                best = a;
                found = true;
            }
        }
    }
    if (!found) {
        throw std::invalid_argument("scenario: stream override (" + std::to_string(d1) + "," +
                                    std::to_string(d2) + ") is infeasible for this config");
    }
    return best;
}

std::string streams_str(const std::vector<int>& d) {
    std::string out = "(";
    for (std::size_t i = 0; i < d.size(); ++i) out += (i ? "," : "") + std::to_string(d[i]);
    return out + ")";
}

}  // namespace

ResolvedScheme resolve_scheme(const Scenario& s) {
    s.config.validate();
    NetworkConfig cfg = s.config;
    Scheme scheme = s.scheme;
    if (scheme == Scheme::kFullDigitalBaseline) {
        cfg = cfg.full_digital();
        scheme = Scheme::kAuto;
    }
    const int k = cfg.size();

    ResolvedScheme out;
    out.effective_config = cfg;

    const UserProfile& u0 = cfg.users[0];
    int ratio = 0;
    if (k == 1) {
        out.dof_lower = out.dof_upper = dof_ptp(u0.m_rf, u0.m_ant, u0.n_rf, u0.n_ant);
    } else if (k == 2) {
        out.dof_lower = out.dof_upper = dof_two_user(cfg);
    } else {
        if (!cfg.is_symmetric()) {
            throw std::invalid_argument("scenario: K >= 3 requires a symmetric config");
        }
        const DofBounds b = dof_k_user_bounds(k, u0.m_rf, u0.m_ant, u0.n_rf, u0.n_ant);
        out.dof_lower = b.lower;
        out.dof_upper = b.upper;
        ratio = b.ratio;
    }

    if (scheme == Scheme::kAuto) {
        if (k == 2) {
            scheme = Scheme::kTwoUserZf;
        } else if (k == 1 || k <= ratio) {
            scheme = Scheme::kKUserZf;
        } else {
            scheme = Scheme::kDia;
        }
    }

    const int extension = s.extension_t.value_or(1);
    switch (scheme) {
        case Scheme::kTwoUserZf: {
            if (k > 2) throw std::invalid_argument("scenario: two_user_zf needs K <= 2");
            if (extension != 1) {
                throw std::invalid_argument("scenario: two_user_zf runs on a single slot");
            }
            TwoUserAllocation alloc;
            if (s.streams) {
                alloc = k == 2 ? alloc_for_streams(cfg, (*s.streams)[0], (*s.streams)[1])
                               : TwoUserAllocation{(*s.streams)[0], 0, (*s.streams)[0], 0, 0, 0};
            } else if (k == 2) {
                alloc = alloc_two_user(cfg);
            } else {
                const int d = std::min(u0.m_rf, u0.n_rf);
                alloc = TwoUserAllocation{d, 0, d, 0, 0, 0};
            }
            out.streams = {alloc.d1};
            if (k == 2) out.streams.push_back(alloc.d2);
            out.sweep.slots = 1;
            out.sweep.make_design = [alloc](const NetworkConfig& c,
                                            std::span<const ChannelRealization> rs, Rng& rng) {
                return design_two_user_zf(c, rs.front(), alloc, rng);
            };
            out.description = "two_user_zf d=" + streams_str(out.streams) + " alloc[d11=" +
                              std::to_string(alloc.d11) + ",d10=" + std::to_string(alloc.d10) +
                              ",d22=" + std::to_string(alloc.d22) + ",d20=" +
                              std::to_string(alloc.d20) + "]";
            break;
        }
        case Scheme::kKUserZf: {
            if (!cfg.is_symmetric()) {
                throw std::invalid_argument("scenario: k_user_zf requires a symmetric config");
            }
            if (extension != 1) {
                throw std::invalid_argument("scenario: k_user_zf runs on a single slot");
            }
            int d = std::min(u0.m_rf, u0.n_rf);
            if (s.streams) {
                for (int v : *s.streams) {
                    if (v != (*s.streams)[0]) {
                        throw std::invalid_argument("scenario: k_user_zf needs equal stream counts");
                    }
                }
                d = (*s.streams)[0];
            }
            NullingSide side;
            if (k * d <= u0.n_ant) {
                side = NullingSide::kReceive;
            } else if (k * d <= u0.m_ant) {
                side = NullingSide::kTransmit;
            } else {
                throw InfeasibleSchemeError("k_user_zf: K*d exceeds both N' and M'");
            }
            out.streams.assign(static_cast<std::size_t>(k), d);
            out.sweep.slots = 1;
            out.sweep.make_design = [d, side](const NetworkConfig& c,
                                              std::span<const ChannelRealization> rs, Rng& rng) {
                return design_k_user_zf(c, rs.front(), d, side, rng);
            };
            out.description = std::string("k_user_zf d=") + std::to_string(d) + " side=" +
                              (side == NullingSide::kReceive ? "receive" : "transmit");
            break;
        }
        case Scheme::kDia: {
            if (!cfg.is_symmetric()) {
                throw std::invalid_argument("scenario: dia requires a symmetric config");
            }
            int slots = extension;
            if (s.streams) {
                out.streams = *s.streams;
            } else {
                // per-user target from the achievable K-user bound; extend when
                // fractional so d*T is an integer
                const Rat per_user = out.dof_lower / k;
                if (!s.extension_t) {
                    slots = static_cast<int>(per_user.get_den().get_si());
                }
                const Rat scaled = per_user * slots;
                BigInt whole = scaled.get_num() / scaled.get_den();  // floor for override T
                out.streams.assign(static_cast<std::size_t>(k),
                                   static_cast<int>(whole.get_si()));
            }
            for (int v : out.streams) {
                if (v < 1 || v > slots * std::min(u0.m_rf, u0.n_rf)) {
                    throw std::invalid_argument(
                        "scenario: dia streams must satisfy 1 <= d_i <= T*min{M,N}");
                }
            }
            out.sweep.slots = slots;
            const std::vector<int> streams = out.streams;
            const DiaSettings settings = s.dia;
            out.sweep.make_design = [streams, settings](const NetworkConfig& c,
                                                        std::span<const ChannelRealization> rs,
                                                        Rng& rng) {
                DiaOptions opts;
                opts.max_iter = settings.max_iter;
                opts.leak_tol = settings.leak_tol;
                DiaResult r = design_dia(c, rs, streams, 1.0, opts, rng);
                if (!r.trace.converged) {
                    throw NonConvergenceError("dia: leakage " +
                                              std::to_string(r.trace.values.back()) +
                                              " after " + std::to_string(r.trace.iterations) +
                                              " iterations");
                }
                return std::move(r.design);
            };
            out.description = "dia d=" + streams_str(out.streams) + " T=" + std::to_string(slots);
            break;
        }
        default:
            throw std::invalid_argument("scenario: unresolved scheme");
    }
    if (s.scheme == Scheme::kFullDigitalBaseline) {
        out.description += " (full-digital baseline)";
    }
    out.sweep.name = out.description;
    return out;
}

// ---------------------------------------------------------------------------
// Execution and formatting
// ---------------------------------------------------------------------------

ResultRecord run_scenario(const Scenario& s) {
    ResultRecord record;
    record.scenario = s;
    record.resolved = resolve_scheme(s);
    try {
        record.table =
            mc_sweep(record.resolved.effective_config, record.resolved.sweep, s.snr_db, s.trials, s.seed);
    } catch (SweepDegradedError& e) {
        record.table = std::move(e.partial);
        record.degraded = true;
    }

    // slope window: 40-60 dB by default, else the top of the grid
    record.window_lo_db = 40.0;
    record.window_hi_db = 60.0;
    int in_window = 0;
    for (const RatePoint& p : record.table.points) {
        if (p.snr_db >= record.window_lo_db && p.snr_db <= record.window_hi_db) ++in_window;
    }
    if (in_window < 2 && record.table.points.size() >= 2) {
        const std::size_t n = record.table.points.size();
        record.window_lo_db = record.table.points[n >= 5 ? n - 5 : 0].snr_db;
        record.window_hi_db = record.table.points.back().snr_db;
    }
    const bool no_data = record.table.points.empty() ||
                         record.table.points.front().trials == 0 ||
                         record.table.points.size() < 2;
    record.estimated_dof =
        no_data ? std::numeric_limits<double>::quiet_NaN()
                : estimate_dof(record.table, record.window_lo_db, record.window_hi_db);
    return record;
}

std::string format_csv(const ResultRecord& record) {
    std::ostringstream out;
    out << "# scenario: " << serialize_scenario(record.scenario) << "\n";
    out << "# scheme: " << record.resolved.description << "\n";
    out << "snr_db,sum_rate_bits";
    for (std::size_t u = 0; u < record.resolved.effective_config.users.size(); ++u) {
        out << ",rate_user_" << (u + 1);
    }
    out << ",trials,failures\n";
    for (const RatePoint& p : record.table.points) {
        out << fmt6(p.snr_db) << "," << fmt6(p.sum_bits);
        for (double r : p.per_user_bits) out << "," << fmt6(r);
        out << "," << p.trials << "," << record.table.failures << "\n";
    }
    return out.str();
}

std::string format_summary(const ResultRecord& record) {
    json j;
    j["estimated_dof"] = record.estimated_dof;
    j["window_db"] = {record.window_lo_db, record.window_hi_db};
    j["dof_lower"] = to_double(record.resolved.dof_lower);
    j["dof_upper"] = to_double(record.resolved.dof_upper);
    j["dof_lower_exact"] = to_string(record.resolved.dof_lower);
    j["dof_upper_exact"] = to_string(record.resolved.dof_upper);
    j["failure_fraction"] = record.table.failure_fraction();
    j["degraded"] = record.degraded;
    j["scheme"] = record.resolved.description;
    j["slots"] = record.resolved.sweep.slots;
    j["streams"] = record.resolved.streams;
    j["trials"] = record.scenario.trials;
    j["seed"] = record.scenario.seed;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (int db = 0; db <= 60; db += 5) grid.push_back(db);
    return grid;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("preset: cannot write '" + path + "'");
    out << content;
}

Scenario make_sim_scenario(const NetworkConfig& cfg, int trials, std::uint64_t seed) {
    Scenario s;
    s.config = cfg;
    s.scheme = Scheme::kAuto;
    s.snr_db = default_snr_grid();
    s.trials = trials;
    s.seed = seed;
    return s;
}

}  // namespace

PresetResult run_preset(const std::string& name, const std::string& outdir,
                        std::optional<int> trials_override,
                        std::optional<std::uint64_t> seed_override, std::ostream& log) {
    const int trials = trials_override.value_or(200);
    const std::uint64_t seed = seed_override.value_or(12345);
    const std::string dir = outdir.empty() ? "." : outdir;
    PresetResult result;

    auto run_and_write = [&](const std::string& file, const Scenario& s) {
        const ResultRecord record = run_scenario(s);
        const std::string path = dir + "/" + file;
        write_file(path, format_csv(record));
        log << file << ": " << format_summary(record) << "\n";
        result.files.push_back(path);
        result.degraded = result.degraded || record.degraded;
    };

    if (name == "fig2") {
        std::ostringstream out;
        out << "# preset fig2: two-user sum DoF vs antennas, M=N=2, N'=M'\n";
        out << "m_ant,dof_hybrid,dof_full_digital\n";
        const int full = dof_two_user(NetworkConfig::symmetric(2, 2, 2, 2, 2));
        for (int mp = 2; mp <= 8; ++mp) {
            out << mp << "," << dof_two_user(NetworkConfig::symmetric(2, 2, mp, 2, mp)) << ","
                << full << "\n";
        }
        const std::string path = dir + "/fig2.csv";
        write_file(path, out.str());
        result.files.push_back(path);
    } else if (name == "fig3") {
        std::ostringstream out;
        out << "# preset fig3: three-user sum DoF vs transmit antennas, M=N=2\n";
        out << "m_ant,np_eq_mp_lower,np_eq_mp_upper,np_eq_2_lower,np_eq_2_upper,full_digital\n";
        const Rat full = dof_k_user_bounds(3, 2, 2, 2, 2).lower;
        for (int mp = 2; mp <= 8; ++mp) {
            const DofBounds both = dof_k_user_bounds(3, 2, mp, 2, mp);
            const DofBounds tx_only = dof_k_user_bounds(3, 2, mp, 2, 2);
            out << mp << "," << fmt6(to_double(both.lower)) << "," << fmt6(to_double(both.upper))
                << "," << fmt6(to_double(tx_only.lower)) << "," << fmt6(to_double(tx_only.upper))
                << "," << fmt6(to_double(full)) << "\n";
        }
        const std::string path = dir + "/fig3.csv";
        write_file(path, out.str());
        result.files.push_back(path);
    } else if (name == "fig6") {
        std::ostringstream out;
        out << "# preset fig6: sum DoF vs K, M=N=M'=2\n";
        out << "k,dof_np_4,dof_np_8,dof_full_digital\n";
        for (int k = 1; k <= 10; ++k) {
            out << k << "," << fmt6(to_double(dof_k_user_bounds(k, 2, 2, 2, 4).lower)) << ","
                << fmt6(to_double(dof_k_user_bounds(k, 2, 2, 2, 8).lower)) << ","
                << fmt6(to_double(dof_k_user_bounds(k, 2, 2, 2, 2).lower)) << "\n";
        }
        const std::string path = dir + "/fig6.csv";
        write_file(path, out.str());
        result.files.push_back(path);
    } else if (name == "fig4") {
        for (int mp : {2, 3, 4}) {
            run_and_write("fig4_mp" + std::to_string(mp) + ".csv",
                          make_sim_scenario(NetworkConfig::symmetric(2, 2, mp, 2, mp), trials, seed));
        }
    } else if (name == "fig5") {
        run_and_write("fig5_mp4_np4.csv",
                      make_sim_scenario(NetworkConfig::symmetric(3, 2, 4, 2, 4), trials, seed));
        run_and_write("fig5_mp6_np6.csv",
                      make_sim_scenario(NetworkConfig::symmetric(3, 2, 6, 2, 6), trials, seed));
        run_and_write("fig5_mp4_np2.csv",
                      make_sim_scenario(NetworkConfig::symmetric(3, 2, 4, 2, 2), trials, seed));
        run_and_write("fig5_mp6_np2.csv",
                      make_sim_scenario(NetworkConfig::symmetric(3, 2, 6, 2, 2), trials, seed));
        run_and_write("fig5_full_digital.csv",
                      make_sim_scenario(NetworkConfig::symmetric(3, 2, 2, 2, 2), trials, seed));
    } else {
        throw std::invalid_argument("preset: unknown preset '" + name +
                                    "' (expected fig2, fig3, fig4, fig5 or fig6)");
    }
    return result;
}

}  // namespace hbdof
