// Copyright 2026 The qladder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli_path() { return QLADDER_CLI_PATH; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path make_work_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("qladder_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path path = dir / "config.json";
    std::ofstream os(path);
    os << doc.dump(2);
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json base_chain_config() {
    return json{
        {"seed", 7},
        {"threads", 2},
        {"chain",
         {{"qudits", json::array({json{{"dim", 2}, {"freq01_ghz", 5.30}, {"anharmonicity_mhz", 330.0}},
                                  json{{"dim", 2}, {"freq01_ghz", 5.57}, {"anharmonicity_mhz", 330.0}}})},
          {"couplings", json::array({json{{"a", 0}, {"b", 1}, {"g01_mhz", 3.0}}})}}},
    };
}

}  // namespace

TEST_CASE("cli: config validation failures exit with code 2") {
    const auto dir = make_work_dir("badcfg");
    REQUIRE(run_cli("chevron --config " + (dir / "missing.json").string()) == 4);

    json bad = base_chain_config();
    bad["mystery_key"] = 1;
    const auto path = write_config(dir, bad);
    REQUIRE(run_cli("chevron --config " + path.string()) == 2);

    json empty_grid = base_chain_config();
    empty_grid["drive"] = {{"amp_mhz", 40.0}};
    empty_grid["scan"] = {{"freq_points", 0}};
    const auto path2 = write_config(dir, empty_grid);
    REQUIRE(run_cli("chevron --config " + path2.string() + " --out " + (dir / "o").string()) == 2);
}

TEST_CASE("cli: chevron writes a deterministic map and a manifest") {
    const auto dir = make_work_dir("chevron");
    json cfg = base_chain_config();
    cfg["drive"] = {{"amp_mhz", 60.0}, {"ramp_ns", 60.0}, {"dt_ps", 0.03}};
    cfg["scan"] = {{"freq_span_mhz", 4.0},
                   {"freq_points", 5},
                   {"duration_max_ns", 400.0},
                   {"duration_points", 4}};
    const auto path = write_config(dir, cfg);

    const auto out1 = dir / "run1";
    const auto out2 = dir / "run2";
    REQUIRE(run_cli("chevron --config " + path.string() + " --out " + out1.string()) == 0);
    REQUIRE(run_cli("chevron --config " + path.string() + " --out " + out2.string()) == 0);

    const std::string csv1 = slurp(out1 / "chevron.csv");
    REQUIRE(csv1.rfind("freq_ghz,duration_ns,population\n", 0) == 0);
    REQUIRE(std::count(csv1.begin(), csv1.end(), '\n') == 1 + 5 * 4);
    REQUIRE(csv1 == slurp(out2 / "chevron.csv"));  // byte-identical

    const json manifest = json::parse(slurp(out1 / "manifest_chevron.json"));
    REQUIRE(manifest.at("command") == "chevron");
    REQUIRE(manifest.at("seed") == 7);
    REQUIRE(manifest.contains("config_hash"));
}

TEST_CASE("cli: prepare reports raw and purified fidelities") {
    const auto dir = make_work_dir("prepare");
    json cfg = base_chain_config();
    cfg["tomo"] = {{"n_rep", 400}, {"snr", 8.0}, {"confusion_shots", 400}};
    const auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("prepare --state bell2 --config " + path.string() + " --out " + out.string()) ==
            0);
    const json report = json::parse(slurp(out / "prepare_report.json"));
    REQUIRE(report.at("state") == "bell2");
    REQUIRE(report.at("mode") == "full");
    REQUIRE(report.at("raw_fidelity").get<double>() > 0.8);
    REQUIRE(report.at("purified_fidelity").get<double>() >= report.at("raw_fidelity").get<double>() - 0.05);
    REQUIRE(fs::exists(out / "density_matrix.json"));

    REQUIRE(run_cli("prepare --state nosuch --config " + path.string() + " --out " +
                    out.string()) == 2);
}

TEST_CASE("cli: prepare in populations mode for larger registers") {
    const auto dir = make_work_dir("prepare_ghz");
    json cfg = base_chain_config();
    cfg["tomo"] = {{"n_rep", 3000}, {"snr", 1e9}};
    const auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("prepare --state \"ghz(4,3)\" --config " + path.string() + " --out " +
                    out.string()) == 0);
    const json report = json::parse(slurp(out / "prepare_report.json"));
    REQUIRE(report.at("mode") == "populations");
    double p000 = -1.0;
    for (const auto& row : report.at("measured_populations")) {
        if (row.at("ditstring") == "0000") p000 = row.at("population").get<double>();
    }
    REQUIRE(p000 == Catch::Approx(1.0 / 3).margin(0.05));
    REQUIRE(report.at("population_overlap").get<double>() > 0.95);
}

TEST_CASE("cli: synth emits circuits and honours budgets") {
    const auto dir = make_work_dir("synth");
    json cfg = base_chain_config();
    cfg["synth"] = {{"task", "ghz"}, {"n", 3}, {"d", 3}};
    auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("synth --config " + path.string() + " --out " + out.string()) == 0);
    const json circuit = json::parse(slurp(out / "circuit.json"));
    int two_photon = 0;
    for (const auto& op : circuit.at("ops")) {
        if (op.at("kind") == "TwoPhotonSwap") ++two_photon;
    }
    REQUIRE(two_photon == 4);  // (n-1)(d-1)
    const json summary = json::parse(slurp(out / "synth_summary.json"));
    REQUIRE(summary.at("two_photon_count") == 4);

    // Kernel rediscovery through the search.
    cfg["synth"] = {{"task", "kernel"}, {"d", 3}};
    path = write_config(dir, cfg);
    REQUIRE(run_cli("synth --config " + path.string() + " --out " + out.string()) == 0);

    // An impossible budget exits with the algorithmic-failure code.
    cfg["synth"] = {{"task", "kernel"}, {"d", 4}, {"max_nodes", 500}};
    path = write_config(dir, cfg);
    REQUIRE(run_cli("synth --config " + path.string() + " --out " + out.string()) == 3);
}

TEST_CASE("cli: qpd exports grids for named and reconstructed states") {
    const auto dir = make_work_dir("qpd");
    json cfg = base_chain_config();
    cfg["qpd"] = {{"n_theta", 16}, {"n_phi", 16}};
    cfg["tomo"] = {{"n_rep", 300}, {"snr", 1e9}};
    const auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("qpd --state bell2 --kind husimi --config " + path.string() + " --out " +
                    out.string()) == 0);
    const std::string csv = slurp(out / "qpd_husimi.csv");
    REQUIRE(csv.rfind("theta,phi,value\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 1 + 16 * 16);

    // A density matrix written by prepare feeds back into qpd.
    REQUIRE(run_cli("prepare --state bell2 --config " + path.string() + " --out " +
                    out.string()) == 0);
    REQUIRE(run_cli("qpd --load " + (out / "density_matrix.json").string() + " --kind wigner "
                    "--config " + path.string() + " --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "qpd_wigner.csv"));
}

TEST_CASE("cli: xeb pipeline writes decay data and a fit") {
    const auto dir = make_work_dir("xeb");
    json cfg = base_chain_config();
    cfg["xeb"] = {{"gate", "ccz"},
                  {"depths", json::array({1, 2, 4})},
                  {"circuits_per_depth", 4},
                  {"depol_rate", 0.05},
                  {"shots", 4000}};
    const auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("xeb --config " + path.string() + " --out " + out.string()) == 0);
    const json fit = json::parse(slurp(out / "xeb_fit.json"));
    REQUIRE(fit.at("per_cycle_fidelity").get<double>() > 0.8);
    REQUIRE(fit.at("per_cycle_fidelity").get<double>() < 1.05);
    const std::string csv = slurp(out / "xeb.csv");
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 4);
}

TEST_CASE("cli: rates sweep matches the analytic rate on a two-level pair") {
    const auto dir = make_work_dir("rates");
    json cfg = base_chain_config();
    cfg["rates"] = {{"amps_mhz", json::array({0.0, 60.0})},
                    {"subspaces", json::array({json::array({0, 0})})},
                    {"periods", 2.2}};
    const auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("rates --config " + path.string() + " --out " + out.string()) == 0);
    std::ifstream in(out / "rates.csv");
    std::string header, zero_row, row;
    std::getline(in, header);
    REQUIRE(header == "subspace_k,subspace_l,amp_mhz,omega_d_ghz,rate_sim_mhz,rate_analytic_mhz");
    std::getline(in, zero_row);
    std::getline(in, row);
    int k, l;
    double amp, wd, sim, analytic;
    REQUIRE(std::sscanf(zero_row.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &k, &l, &amp, &wd, &sim,
                        &analytic) == 6);
    REQUIRE(sim == 0.0);  // undriven row reports zero rate
    REQUIRE(std::sscanf(row.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &k, &l, &amp, &wd, &sim,
                        &analytic) == 6);
    REQUIRE(sim / analytic > 0.95);
    REQUIRE(sim / analytic < 1.05);
}

TEST_CASE("cli: optfreq columns show the higher-level drift") {
    const auto dir = make_work_dir("optfreq");
    json cfg = base_chain_config();
    cfg["optfreq"] = {{"amps_mhz", json::array({5.0, 40.0})}, {"dims", json::array({3})}};
    const auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("optfreq --config " + path.string() + " --out " + out.string()) == 0);
    std::ifstream in(out / "optfreq.csv");
    std::string header, row1, row2;
    std::getline(in, header);
    REQUIRE(header == "amp_mhz,omega_d_2ls_ghz,omega_d_ed_d3_ghz");
    std::getline(in, row1);
    std::getline(in, row2);
    double a1, w2ls_1, wd3_1, a2, w2ls_2, wd3_2;
    REQUIRE(std::sscanf(row1.c_str(), "%lf,%lf,%lf", &a1, &w2ls_1, &wd3_1) == 3);
    REQUIRE(std::sscanf(row2.c_str(), "%lf,%lf,%lf", &a2, &w2ls_2, &wd3_2) == 3);
    // Symmetric driving: the two-level column is flat; higher levels drift.
    REQUIRE(w2ls_1 == Catch::Approx(w2ls_2).epsilon(1e-12));
    REQUIRE(std::abs(wd3_2 - w2ls_2) > std::abs(wd3_1 - w2ls_1));
}

TEST_CASE("cli: shotnoise writes the six-row table") {
    const auto dir = make_work_dir("shotnoise");
    json cfg = base_chain_config();
    cfg["shotnoise"] = {{"n_rep", 500}, {"trials", 12}};
    const auto path = write_config(dir, cfg);
    const auto out = dir / "out";
    REQUIRE(run_cli("shotnoise --config " + path.string() + " --out " + out.string()) == 0);
    const std::string csv = slurp(out / "shotnoise.csv");
    REQUIRE(csv.rfind("label,n_rep,trials,mean,std\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 1 + 6);
    REQUIRE(csv.find("bell4") != std::string::npos);
    REQUIRE(csv.find("ghz4q") != std::string::npos);
}
