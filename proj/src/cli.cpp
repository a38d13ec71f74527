#include "hbdof/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "hbdof/scenario.hpp"

namespace hbdof {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDegraded = 3;

UserProfile parse_user_profile(const std::string& text) {
    UserProfile u;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream in(text);
    if (!(in >> u.m_rf >> c1 >> u.m_ant >> c2 >> u.n_rf >> c3 >> u.n_ant) || c1 != ',' ||
        c2 != ',' || c3 != ',' || !(in >> std::ws).eof()) {
        throw std::invalid_argument("--user expects 'M,M_ant,N,N_ant', got '" + text + "'");
    }
    return u;
}

void print_dof_report(const NetworkConfig& cfg, std::ostream& out) {
    cfg.validate();
    out << "users:";
    for (const UserProfile& u : cfg.users) {
        out << " (M=" << u.m_rf << ",M'=" << u.m_ant << ")x(N=" << u.n_rf << ",N'=" << u.n_ant
            << ")";
    }
    out << "\n";

    const int k = cfg.size();
    if (k == 2) {
        const TwoUserAllocation a = alloc_two_user(cfg);
        out << "sum DoF: " << dof_two_user(cfg) << "\n";
        out << "allocation: d1=" << a.d1 << " (nulled " << a.d11 << ", random " << a.d10
            << "), d2=" << a.d2 << " (nulled " << a.d22 << ", random " << a.d20 << ")\n";
        if (cfg.is_symmetric()) {
            const UserProfile& u = cfg.users[0];
            out << "R: " << std::max(u.m_ant, u.n_ant) / std::min(u.m_ant, u.n_ant) << "\n";
        } else {
            out << "R: n/a (asymmetric)\n";
        }
    } else if (k == 1) {
        const UserProfile& u = cfg.users[0];
        out << "PTP DoF: " << dof_ptp(u.m_rf, u.m_ant, u.n_rf, u.n_ant) << "\n";
    } else {
        if (!cfg.is_symmetric()) {
            throw std::invalid_argument("dof: K >= 3 requires a symmetric config");
        }
        const UserProfile& u = cfg.users[0];
        const DofBounds b = dof_k_user_bounds(k, u.m_rf, u.m_ant, u.n_rf, u.n_ant);
        out << "sum DoF lower: " << to_string(b.lower) << "\n";
        out << "sum DoF upper: " << to_string(b.upper) << "\n";
        out << "R: " << b.ratio << "\n";
        if (k > b.ratio) {
            // alignment regime: the per-user d_i/T limit of the extension
            // scheme, reported symbolically (T itself is astronomical)
            const Rat per_user = extension_limit(k, u.m_rf, u.m_ant, u.n_rf, u.n_ant) / k;
            out << "alignment per-user d/T limit: " << to_string(per_user) << "\n";
        }
    }
    out << "hybrid gain vs full digital: " << to_string(hybrid_gain_ratio(cfg)) << "\n";
}

void write_or_print(const std::string& content, const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
        fallback << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sum-DoF calculators and achievable-rate simulator for K-user MIMO "
                 "interference channels with hybrid beamforming"};
    app.require_subcommand(1);

    // dof
    auto* dof_cmd = app.add_subcommand("dof", "closed-form sum DoF, allocation and bounds");
    int k = 0, m = 0, mp = 0, n = 0, np = 0;
    std::vector<std::string> user_args;
    dof_cmd->add_option("--k", k, "number of users (symmetric form)");
    dof_cmd->add_option("--m", m, "transmit RF chains M");
    dof_cmd->add_option("--mp", mp, "transmit antennas M'");
    dof_cmd->add_option("--n", n, "receive RF chains N");
    dof_cmd->add_option("--np", np, "receive antennas N'");
    dof_cmd->add_option("--user", user_args,
                        "per-user profile 'M,M_ant,N,N_ant' (repeatable, overrides --k form)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run a Monte-Carlo SNR sweep from a scenario file");
    std::string scenario_path, out_path, summary_path;
    sim_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sim_cmd->add_option("--out", out_path, "CSV output path (default: stdout)");
    sim_cmd->add_option("--summary", summary_path, "JSON summary path (default: stderr)");

    // preset
    auto* preset_cmd = app.add_subcommand("preset", "emit figure-reproduction CSV data");
    std::string preset_name, outdir = ".";
    std::optional<int> trials_override;
    std::optional<std::uint64_t> seed_override;
    preset_cmd->add_option("name", preset_name, "fig2|fig3|fig4|fig5|fig6")->required();
    preset_cmd->add_option("--outdir", outdir, "output directory (default: .)");
    preset_cmd->add_option("--trials", trials_override, "Monte-Carlo trials (default: 200)");
    preset_cmd->add_option("--seed", seed_override, "base seed (default: 12345)");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("hbdof");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (dof_cmd->parsed()) {
            NetworkConfig cfg;
            if (!user_args.empty()) {
                for (const std::string& arg : user_args) cfg.users.push_back(parse_user_profile(arg));
            } else {
                if (k < 1) throw std::invalid_argument("dof: pass --k or at least one --user");
                cfg = NetworkConfig::symmetric(k, m, mp, n, np);
            }
            print_dof_report(cfg, out);
            return kExitOk;
        }
        if (sim_cmd->parsed()) {
            const Scenario s = load_scenario(scenario_path);
            const ResultRecord record = run_scenario(s);
            write_or_print(format_csv(record), out_path, out);
            write_or_print(format_summary(record) + "\n", summary_path, err);
            if (record.degraded) {
                err << "warning: " << record.table.failures << " of " << s.trials
                    << " trials failed; CSV is partial\n";
                return kExitDegraded;
            }
            return kExitOk;
        }
        if (preset_cmd->parsed()) {
            const PresetResult result =
                run_preset(preset_name, outdir, trials_override, seed_override, err);
            for (const std::string& f : result.files) out << "wrote " << f << "\n";
            if (result.degraded) {
                err << "warning: at least one sweep was degraded; its CSV is partial\n";
                return kExitDegraded;
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDegraded;
    }
    return kExitUsage;
}

}  // namespace hbdof
