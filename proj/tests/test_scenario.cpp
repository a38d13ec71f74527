#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hbdof/cli.hpp"
#include "hbdof/scenario.hpp"

using namespace hbdof;

namespace {

const char* kExampleScenario = R"({
  "config": {"users": [
    {"m_rf": 2, "m_ant": 4, "n_rf": 2, "n_ant": 2},
    {"m_rf": 2, "m_ant": 4, "n_rf": 2, "n_ant": 2}]},
  "scheme": "auto",
  "snr_db": [0, 20, 40, 60],
  "trials": 3,
  "seed": 11
})";

std::string temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "hbdof_test";
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("scenario round-trips through serialization") {
    const Scenario s = parse_scenario(kExampleScenario);
    CHECK(s.config.size() == 2);
    CHECK(s.scheme == Scheme::kAuto);
    CHECK(s.trials == 3);
    CHECK(s.seed == 11);
    CHECK(parse_scenario(serialize_scenario(s)) == s);

    Scenario full = s;
    full.scheme = Scheme::kDia;
    full.streams = std::vector<int>{2, 2};
    full.extension_t = 3;
    full.dia.max_iter = 100;
    full.dia.leak_tol = 1e-8;
    CHECK(parse_scenario(serialize_scenario(full)) == full);
}

TEST_CASE("scenario parsing is strict") {
    CHECK_THROWS_AS(parse_scenario("not json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("[1,2]"), std::invalid_argument);

    // unknown top-level key
    CHECK_THROWS_WITH_AS(
        parse_scenario(R"({"config":{"users":[{"m_rf":1,"m_ant":1,"n_rf":1,"n_ant":1}]},
                           "scheme":"auto","snr_db":[0],"trials":1,"seed":0,"snrdb":[0]})"),
        "scenario: unknown key 'snrdb' in scenario", std::invalid_argument);

    // unknown user key
    CHECK_THROWS_AS(
        parse_scenario(R"({"config":{"users":[{"m_rf":1,"m_ant":1,"n_rf":1,"n_ant":1,"x":2}]},
                           "scheme":"auto","snr_db":[0],"trials":1,"seed":0})"),
        std::invalid_argument);

    // invalid profile ordering
    CHECK_THROWS_AS(
        parse_scenario(R"({"config":{"users":[{"m_rf":3,"m_ant":2,"n_rf":1,"n_ant":1}]},
                           "scheme":"auto","snr_db":[0],"trials":1,"seed":0})"),
        std::invalid_argument);

    // unknown scheme name
    CHECK_THROWS_AS(
        parse_scenario(R"({"config":{"users":[{"m_rf":1,"m_ant":1,"n_rf":1,"n_ant":1}]},
                           "scheme":"zf","snr_db":[0],"trials":1,"seed":0})"),
        std::invalid_argument);
}

TEST_CASE("auto scheme resolution follows the closed-form guidance") {
    Scenario s = parse_scenario(kExampleScenario);

    // K=2 resolves to the two-user ZF with the optimal allocation
    ResolvedScheme two = resolve_scheme(s);
    CHECK(two.description.find("two_user_zf") != std::string::npos);
    CHECK(two.streams == std::vector<int>{2, 2});
    CHECK(two.dof_lower == 4);
    CHECK(two.dof_upper == 4);

    // K=3, K <= R: single-slot zero forcing on the transmit side
    s.config = NetworkConfig::symmetric(3, 2, 6, 2, 2);
    ResolvedScheme zf = resolve_scheme(s);
    CHECK(zf.description.find("k_user_zf") != std::string::npos);
    CHECK(zf.description.find("transmit") != std::string::npos);
    CHECK(zf.streams == std::vector<int>{2, 2, 2});

    // K=3 > R with integral per-user bound: DIA on a single slot
    s.config = NetworkConfig::symmetric(3, 2, 4, 2, 4);
    ResolvedScheme dia = resolve_scheme(s);
    CHECK(dia.description.find("dia") != std::string::npos);
    CHECK(dia.streams == std::vector<int>{2, 2, 2});
    CHECK(dia.sweep.slots == 1);

    // K=3 > R with per-user bound 4/3: three-slot extension, 4 streams each
    s.config = NetworkConfig::symmetric(3, 2, 4, 2, 2);
    ResolvedScheme frac = resolve_scheme(s);
    CHECK(frac.sweep.slots == 3);
    CHECK(frac.streams == std::vector<int>{4, 4, 4});
    CHECK(frac.dof_lower == 4);

    // full-digital baseline reduces the antennas, then resolves as usual
    s.config = NetworkConfig::symmetric(3, 2, 4, 2, 4);
    s.scheme = Scheme::kFullDigitalBaseline;
    ResolvedScheme digital = resolve_scheme(s);
    CHECK(digital.effective_config == NetworkConfig::symmetric(3, 2, 2, 2, 2));
    CHECK(digital.streams == std::vector<int>{1, 1, 1});
    CHECK(digital.dof_lower == 3);
}

TEST_CASE("simulate produces the documented CSV shape deterministically") {
    Scenario s = parse_scenario(kExampleScenario);
    const ResultRecord a = run_scenario(s);
    const ResultRecord b = run_scenario(s);
    const std::string csv_a = format_csv(a);
    CHECK(csv_a == format_csv(b));

    std::istringstream lines(csv_a);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("# scenario: ", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("# scheme: ", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "snr_db,sum_rate_bits,rate_user_1,rate_user_2,trials,failures");
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        CHECK(line.find(",3,0") != std::string::npos);  // trials and failures columns
    }
    CHECK(rows == 4);

    const std::string summary = format_summary(a);
    CHECK(summary.find("\"estimated_dof\"") != std::string::npos);
    CHECK(summary.find("\"dof_lower_exact\":\"4\"") != std::string::npos);
}

TEST_CASE("fig2 preset reproduces the two-user staircase") {
    const std::string dir = temp_dir();
    std::ostringstream log;
    const PresetResult result = run_preset("fig2", dir, std::nullopt, std::nullopt, log);
    REQUIRE(result.files.size() == 1);
    std::ifstream in(result.files[0]);
    std::string line;
    std::getline(in, line);  // header comment
    std::getline(in, line);
    CHECK(line == "m_ant,dof_hybrid,dof_full_digital");
    std::getline(in, line);
    CHECK(line == "2,2,2");
    std::getline(in, line);
    CHECK(line == "3,3,2");
    std::getline(in, line);
    CHECK(line == "4,4,2");
}

TEST_CASE("fig6 preset follows the closed-form K scaling") {
    const std::string dir = temp_dir();
    std::ostringstream log;
    const PresetResult result = run_preset("fig6", dir, std::nullopt, std::nullopt, log);
    std::ifstream in(result.files[0]);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "k,dof_np_4,dof_np_8,dof_full_digital");
    // spot checks: K=2 -> 4,4,2 ; K=3 -> 4, 6, 3 ; K=5 -> 20/3, 8, 5
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    CHECK(rows.at(1) == "2,4,4,2");
    CHECK(rows.at(2) == "3,4,6,3");
    CHECK(rows.at(4) == "5,6.66667,8,5");
}

TEST_CASE("unknown preset is rejected") {
    std::ostringstream log;
    CHECK_THROWS_AS(run_preset("fig9", ".", std::nullopt, std::nullopt, log),
                    std::invalid_argument);
}

TEST_CASE("three-user full-digital channel reaches its DoF through alignment") {
    Scenario s;
    s.config = NetworkConfig::symmetric(3, 2, 2, 2, 2);
    s.scheme = Scheme::kAuto;
    for (int db = 40; db <= 60; db += 5) s.snr_db.push_back(db);
    s.trials = 40;
    s.seed = 90210;
    const ResultRecord rec = run_scenario(s);
    CHECK(rec.resolved.streams == std::vector<int>{1, 1, 1});
    CHECK(rec.estimated_dof == doctest::Approx(3.0).epsilon(0.1));
    CHECK(rec.table.failure_fraction() <= 0.05);
}

TEST_CASE("cli dof reports the reference configurations") {
    std::ostringstream out, err;
    CHECK(run_cli({"dof", "--k", "2", "--m", "2", "--mp", "4", "--n", "2", "--np", "2"}, out, err) == 0);
    CHECK(out.str().find("sum DoF: 4") != std::string::npos);
    CHECK(out.str().find("d1=2") != std::string::npos);

    out.str("");
    CHECK(run_cli({"dof", "--k", "3", "--m", "2", "--mp", "2", "--n", "2", "--np", "2"}, out, err) == 0);
    CHECK(out.str().find("sum DoF lower: 3") != std::string::npos);
    CHECK(out.str().find("sum DoF upper: 3") != std::string::npos);
}

TEST_CASE("cli exit codes: usage errors are 2") {
    std::ostringstream out, err;
    CHECK(run_cli({"dof", "--k", "2", "--m", "3", "--mp", "2", "--n", "2", "--np", "2"}, out, err) == 2);
    CHECK(err.str().find("RF chains exceed") != std::string::npos);
    CHECK(run_cli({"preset", "fig9"}, out, err) == 2);
    CHECK(run_cli({"simulate", "/nonexistent/file.json"}, out, err) == 2);
    CHECK(run_cli({"bogus"}, out, err) == 2);
}

TEST_CASE("fig4 and fig5 presets emit one CSV per curve") {
    const std::string dir = temp_dir();
    std::ostringstream log;
    const PresetResult fig4 = run_preset("fig4", dir, 3, 7, log);
    CHECK(fig4.files.size() == 3);
    const PresetResult fig5 = run_preset("fig5", dir, 2, 7, log);
    CHECK(fig5.files.size() == 5);
    for (const std::string& path : fig5.files) {
        std::ifstream in(path);
        REQUIRE(in.good());
        std::string line;
        std::getline(in, line);
        CHECK(line.rfind("# scenario: ", 0) == 0);
    }
}

TEST_CASE("cli simulate exits 3 on a degraded sweep but still writes the CSV") {
    const std::string dir = temp_dir();
    const std::string scenario_path = dir + "/degraded.json";
    {
        std::ofstream f(scenario_path);
        // one alignment iteration can never hit the leakage tolerance here
        f << R"({"config":{"users":[
                 {"m_rf":2,"m_ant":4,"n_rf":2,"n_ant":4},
                 {"m_rf":2,"m_ant":4,"n_rf":2,"n_ant":4},
                 {"m_rf":2,"m_ant":4,"n_rf":2,"n_ant":4}]},
               "scheme":"dia","snr_db":[0,10],"trials":4,"seed":3,
               "dia":{"max_iter":1}})";
    }
    const std::string csv_path = dir + "/degraded.csv";
    std::ostringstream out, err;
    CHECK(run_cli({"simulate", scenario_path, "--out", csv_path}, out, err) == 3);
    CHECK(err.str().find("warning") != std::string::npos);
    std::ifstream csv(csv_path);
    REQUIRE(csv.good());
    std::string text((std::istreambuf_iterator<char>(csv)), std::istreambuf_iterator<char>());
    CHECK(text.find("snr_db,") != std::string::npos);
    CHECK(text.find(",4\n") != std::string::npos);  // all four trials failed
}

TEST_CASE("cli simulate writes CSV and summary files") {
    const std::string dir = temp_dir();
    const std::string scenario_path = dir + "/scenario.json";
    {
        std::ofstream f(scenario_path);
        f << kExampleScenario;
    }
    const std::string csv_path = dir + "/out.csv";
    const std::string summary_path = dir + "/summary.json";
    std::ostringstream out, err;
    CHECK(run_cli({"simulate", scenario_path, "--out", csv_path, "--summary", summary_path}, out,
                  err) == 0);
    std::ifstream csv(csv_path);
    REQUIRE(csv.good());
    std::string first;
    std::getline(csv, first);
    CHECK(first.rfind("# scenario: ", 0) == 0);
    std::ifstream summary(summary_path);
    REQUIRE(summary.good());
    std::string text((std::istreambuf_iterator<char>(summary)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"degraded\":false") != std::string::npos);
}
