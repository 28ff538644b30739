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

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qladder/analytics.hpp"
#include "qladder/circuits.hpp"
#include "qladder/dynamics.hpp"
#include "qladder/errors.hpp"
#include "qladder/qpd.hpp"
#include "qladder/readout.hpp"
#include "qladder/synthesis.hpp"
#include "qladder/tomography.hpp"
#include "qladder/xeb.hpp"

namespace qladder::cli {

inline constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config handling. One JSON document, units spelled out in the keys; unknown
// keys are rejected with their full path.

inline const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"", {"seed", "threads", "output", "chain", "drive", "scan", "rates", "optfreq", "tomo",
              "prepare", "synth", "qpd", "xeb", "shotnoise"}},
        {"/output", {"directory", "format"}},
        {"/chain", {"qudits", "couplings"}},
        {"/chain/qudits[]", {"dim", "freq01_ghz", "anharmonicity_mhz"}},
        {"/chain/couplings[]", {"a", "b", "g01_mhz"}},
        {"/drive", {"amp_mhz", "lambda", "phi1_rad", "phi2_rad", "ramp_ns", "subspace", "dt_ps"}},
        {"/scan",
         {"freq_center_ghz", "freq_span_mhz", "freq_points", "duration_max_ns",
          "duration_points"}},
        {"/rates", {"amps_mhz", "subspaces", "periods"}},
        {"/optfreq", {"amps_mhz", "lambda", "dims"}},
        {"/tomo", {"n_rep", "trials", "snr", "mode", "confusion_shots"}},
        {"/prepare", {"state"}},
        {"/synth", {"task", "n", "d", "two_qudit_cost", "single_qudit_cost", "max_nodes"}},
        {"/qpd", {"kind", "state", "n_theta", "n_phi"}},
        {"/xeb", {"gate", "depths", "circuits_per_depth", "depol_rate", "shots"}},
        {"/shotnoise", {"n_rep", "trials"}},
    };
    return schema;
}

inline void validate_keys(const json& node, const std::string& path) {
    if (!node.is_object()) return;
    const auto& schema = config_schema();
    const auto it = schema.find(path);
    if (it == schema.end()) {
        throw ConfigError("config: no keys allowed under '" + path + "'");
    }
    for (const auto& [key, value] : node.items()) {
        if (!it->second.count(key)) {
            throw ConfigError("config: unknown key '" + path + "/" + key + "'");
        }
        const std::string child = path + "/" + key;
        if (value.is_object()) {
            validate_keys(value, child);
        } else if (value.is_array()) {
            for (const auto& element : value) {
                if (element.is_object()) validate_keys(element, child + "[]");
            }
        }
    }
}

struct RunConfig {
    json doc;
    std::uint64_t seed = 1;
    int threads = 0;
    std::filesystem::path out_dir = "out";

    template <typename T>
    T get(const std::string& pointer, const T& fallback) const {
        const json::json_pointer p(pointer);
        if (doc.contains(p)) return doc.at(p).get<T>();
        return fallback;
    }
    bool has(const std::string& pointer) const {
        return doc.contains(json::json_pointer(pointer));
    }
    template <typename T>
    T require(const std::string& pointer) const {
        const json::json_pointer p(pointer);
        if (!doc.contains(p)) throw ConfigError("config: missing required field " + pointer);
        try {
            return doc.at(p).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("config: bad value at " + pointer + ": " + e.what());
        }
    }
};

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    validate_keys(doc, "");
    RunConfig cfg;
    cfg.doc = std::move(doc);
    cfg.seed = cfg.get<std::uint64_t>("/seed", 1);
    cfg.threads = cfg.get<int>("/threads", 0);
    cfg.out_dir = cfg.get<std::string>("/output/directory", "out");
    return cfg;
}

inline Chain chain_from_config(const RunConfig& cfg) {
    Chain chain;
    const json qudits = cfg.require<json>("/chain/qudits");
    for (const auto& jq : qudits) {
        QuditParams q;
        q.dim = jq.at("dim").get<int>();
        q.freq01 = ghz(jq.at("freq01_ghz").get<double>());
        q.anharmonicity = mhz(jq.at("anharmonicity_mhz").get<double>());
        chain.qudits.push_back(q);
    }
    if (cfg.has("/chain/couplings")) {
        for (const auto& jc : cfg.require<json>("/chain/couplings")) {
            CouplingSpec c;
            c.qudit_a = jc.at("a").get<int>();
            c.qudit_b = jc.at("b").get<int>();
            c.g01 = mhz(jc.at("g01_mhz").get<double>());
            chain.couplings.push_back(c);
        }
    }
    try {
        chain.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: /chain invalid: ") + e.what());
    }
    return chain;
}

// ---------------------------------------------------------------------------
// Output helpers.

inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream os(dir / name);
    if (!os) throw IoError("cannot open output file " + (dir / name).string());
    return os;
}

class Manifest {
  public:
    Manifest(const RunConfig& cfg, std::string command)
        : cfg_(cfg), command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

    void write(const std::vector<std::string>& outputs) const {
        json m;
        m["command"] = command_;
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(fnv1a(cfg_.doc.dump())));
        m["config_hash"] = hash;
        m["seed"] = cfg_.seed;
        m["threads"] = cfg_.threads;
        m["outputs"] = outputs;
        m["versions"] = {{"qladder", kVersion},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                       std::to_string(EIGEN_MINOR_VERSION)}};
        m["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        auto os = open_output(cfg_.out_dir, "manifest_" + command_ + ".json");
        os << m.dump(2) << "\n";
    }

  private:
    const RunConfig& cfg_;
    std::string command_;
    std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Named state preparations.

struct NamedState {
    std::string name;
    Circuit circuit;
    QuantumState ideal;
    int d = 2;  // projector-set dimension for tomography
};

inline std::vector<std::string> known_state_names() {
    return {"bell2", "bell3", "bell4", "noon4", "cat2", "cat3", "ghz(n,d)"};
}

inline NamedState make_named_state(const std::string& name) {
    NamedState out;
    out.name = name;
    if (name == "bell2" || name == "bell3" || name == "bell4") {
        const int d = name.back() - '0';
        out.circuit = bell_prep_circuit(d);
        out.d = d;
    } else if (name == "noon4") {
        out.circuit = noon_prep_circuit(4);
        out.d = 4;
    } else if (name == "cat2") {
        out.circuit = cat_circuit(2, 4);
        out.d = 4;
    } else if (name == "cat3") {
        out.circuit = cat_circuit(3, 4);
        out.d = 4;
    } else {
        std::smatch m;
        static const std::regex ghz_re(R"(ghz\((\d+),(\d+)\))");
        if (!std::regex_match(name, m, ghz_re)) {
            std::string options;
            for (const auto& n : known_state_names()) options += " " + n;
            throw ConfigError("unknown state name '" + name + "'; options:" + options);
        }
        const int n = std::stoi(m[1]);
        const int d = std::stoi(m[2]);
        out.circuit = ghz_circuit(n, d);
        out.d = out.circuit.dims[0];
    }
    std::vector<int> zeros(out.circuit.dims.size(), 0);
    out.ideal = apply_circuit(out.circuit, QuantumState::basis(out.circuit.dims, zeros));
    return out;
}

inline std::vector<ReadoutModel> default_readout_models(const std::vector<int>& dims, double snr,
                                                        std::uint64_t seed) {
    std::vector<ReadoutModel> models;
    for (std::size_t q = 0; q < dims.size(); ++q) {
        ReadoutModel m;
        m.resonator_freq = kTwoPi * 7.2e9;
        m.linewidth = mhz(1.5);
        m.probe_freq = m.resonator_freq;
        m.snr = snr;
        m.seed = seed + q;
        for (int k = 0; k < dims[q]; ++k) {
            m.dispersive_shifts.push_back(k * m.linewidth * 1e-3);
        }
        models.push_back(std::move(m));
    }
    return models;
}

// ---------------------------------------------------------------------------
// Subcommands.

inline int cmd_chevron(const RunConfig& cfg) {
    Manifest manifest(cfg, "chevron");
    const Chain chain = chain_from_config(cfg);
    ChevronConfig cc;
    cc.omega = mhz(cfg.require<double>("/drive/amp_mhz"));
    cc.lambda = cfg.get<double>("/drive/lambda", 1.0);
    cc.ramp_time = ns(cfg.get<double>("/drive/ramp_ns", 100.0));
    cc.threads = cfg.threads;
    cc.dt = cfg.get<double>("/drive/dt_ps", 0.0) * 1e-12;
    const auto subspace = cfg.get<std::vector<int>>("/drive/subspace", {0, 0});
    cc.k = subspace.at(0);
    cc.l = subspace.at(1);

    const int freq_points = cfg.get<int>("/scan/freq_points", 21);
    const int dur_points = cfg.get<int>("/scan/duration_points", 13);
    if (freq_points < 1 || dur_points < 1) throw ConfigError("config: /scan grids must be non-empty");
    double center;
    if (cfg.has("/scan/freq_center_ghz")) {
        center = ghz(cfg.require<double>("/scan/freq_center_ghz"));
    } else {
        ResonanceOptions opt;
        opt.k = cc.k;
        opt.l = cc.l;
        center = find_resonance_ed(chain, cc.omega, cc.lambda, opt);
    }
    const double span = mhz(cfg.get<double>("/scan/freq_span_mhz", 10.0));
    const double dur_max = ns(cfg.get<double>("/scan/duration_max_ns", 1000.0));
    std::vector<double> freqs, durations;
    for (int i = 0; i < freq_points; ++i) {
        const double x = freq_points == 1 ? 0.0 : -0.5 + static_cast<double>(i) / (freq_points - 1);
        freqs.push_back(center + span * x);
    }
    for (int i = 0; i < dur_points; ++i) {
        durations.push_back(dur_max * static_cast<double>(i) / std::max(1, dur_points - 1));
    }

    const auto map = chevron_scan(chain, cc, freqs, durations);
    auto os = open_output(cfg.out_dir, "chevron.csv");
    os << "freq_ghz,duration_ns,population\n";
    for (std::size_t r = 0; r < durations.size(); ++r) {
        for (std::size_t c = 0; c < freqs.size(); ++c) {
            const auto& pt = map.at(r, c);
            os << fmt(to_ghz(pt.freq)) << "," << fmt(pt.duration * 1e9) << ","
               << (pt.failed ? "nan" : fmt(pt.population)) << "\n";
        }
    }
    // Resonance estimate: the deepest-transfer column.
    std::size_t best_col = 0;
    double best = -1.0;
    for (std::size_t c = 0; c < freqs.size(); ++c) {
        double colmax = 0.0;
        for (std::size_t r = 0; r < durations.size(); ++r) {
            if (!map.at(r, c).failed) colmax = std::max(colmax, map.at(r, c).population);
        }
        if (colmax > best) {
            best = colmax;
            best_col = c;
        }
    }
    std::cout << "chevron: resonance estimate " << fmt(to_ghz(freqs[best_col]))
              << " GHz (peak transfer " << fmt(best) << ")\n";
    manifest.write({"chevron.csv"});
    return 0;
}

inline int cmd_rates(const RunConfig& cfg) {
    Manifest manifest(cfg, "rates");
    const Chain chain = chain_from_config(cfg);
    const auto amps = cfg.require<std::vector<double>>("/rates/amps_mhz");
    const auto subspaces =
        cfg.get<std::vector<std::vector<int>>>("/rates/subspaces", {{0, 0}, {1, 1}, {2, 2}});
    const double lambda = cfg.get<double>("/drive/lambda", 1.0);
    const double ramp = ns(cfg.get<double>("/drive/ramp_ns", 100.0));
    const double periods = cfg.get<double>("/rates/periods", 2.4);

    struct Row {
        int k, l;
        double amp_mhz, wd = 0.0, sim = 0.0, analytic = 0.0;
        bool failed = false;
    };
    std::vector<Row> rows;
    for (const auto& ss : subspaces) {
        for (double amp : amps) rows.push_back(Row{ss.at(0), ss.at(1), amp});
    }
    parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
        Row& row = rows[i];
        try {
            const double omega = mhz(row.amp_mhz);
            ResonanceOptions opt;
            opt.k = row.k;
            opt.l = row.l;
            row.wd = find_resonance_ed(chain, omega, lambda, opt);
            const double wa = chain.qudits[0].transition_freq(row.k);
            const double wb = chain.qudits[1].transition_freq(row.l);
            const auto angles = make_dressed_angles(row.wd - wa, lambda * omega, row.wd - wb, omega);
            const double g_kl = coupling_matrix_element(chain.couplings.at(0).g01, row.k, row.l);
            row.analytic = two_photon_rate(g_kl, angles);
            if (row.analytic < 1e-6 * g_kl) {
                // Undriven limit: the interaction is off, nothing to fit.
                row.sim = 0.0;
                row.analytic = 0.0;
                return;
            }
            const double hold = periods * kTwoPi / row.analytic;
            auto tones =
                two_photon_tones(chain, row.k, row.l, row.wd, omega, lambda, 0.0, 0.0, ramp, hold);
            auto schedule = make_schedule(tones, chain, -1.0, cfg.get<double>("/drive/dt_ps", 0.0) * 1e-12);
            std::vector<int> start(chain.qudits.size(), 0);
            start[0] = row.k;
            start[1] = row.l;
            auto traj = evolve(QuantumState::basis(chain.dims(), start), schedule, chain, 3001);
            std::vector<int> target = start;
            target[0] = row.k + 1;
            target[1] = row.l + 1;
            row.sim = extract_rate(traj, ditstring_index(target, chain.dims()), ramp * 1.1,
                                   ramp + hold)
                          .rate;
        } catch (const Error&) {
            row.failed = true;
        }
    });

    auto os = open_output(cfg.out_dir, "rates.csv");
    os << "subspace_k,subspace_l,amp_mhz,omega_d_ghz,rate_sim_mhz,rate_analytic_mhz\n";
    int failures = 0;
    for (const auto& row : rows) {
        os << row.k << "," << row.l << "," << fmt(row.amp_mhz) << ",";
        if (row.failed) {
            os << "nan,nan,nan\n";
            ++failures;
        } else {
            os << fmt(to_ghz(row.wd)) << "," << fmt(to_mhz(row.sim)) << ","
               << fmt(to_mhz(row.analytic)) << "\n";
        }
    }
    if (failures > 0) std::cerr << "rates: " << failures << " point(s) failed\n";
    manifest.write({"rates.csv"});
    return 0;
}

inline int cmd_optfreq(const RunConfig& cfg) {
    Manifest manifest(cfg, "optfreq");
    const Chain chain = chain_from_config(cfg);
    const auto amps = cfg.require<std::vector<double>>("/optfreq/amps_mhz");
    const double lambda = cfg.get<double>("/optfreq/lambda", 1.0);
    const auto ed_dims = cfg.get<std::vector<int>>("/optfreq/dims", {3, 4});

    auto with_dim = [&](int dim) {
        Chain c = chain;
        for (auto& q : c.qudits) q.dim = dim;
        return c;
    };

    auto os = open_output(cfg.out_dir, "optfreq.csv");
    os << "amp_mhz,omega_d_2ls_ghz";
    for (int dim : ed_dims) os << ",omega_d_ed_d" << dim << "_ghz";
    os << "\n";
    for (double amp : amps) {
        const double omega = mhz(amp);
        const double w2ls = optimal_drive_frequency_2ls(chain.qudits[0].freq01,
                                                        chain.qudits[1].freq01, omega, lambda);
        os << fmt(amp) << "," << fmt(to_ghz(w2ls));
        for (int dim : ed_dims) {
            const double wd = find_resonance_ed(with_dim(dim), omega, lambda);
            os << "," << fmt(to_ghz(wd));
        }
        os << "\n";
    }
    manifest.write({"optfreq.csv"});
    return 0;
}

inline json density_to_json(const MatrixXcd& rho) {
    json out;
    out["dim"] = rho.rows();
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
        json row_re = json::array(), row_im = json::array();
        for (Eigen::Index c = 0; c < rho.cols(); ++c) {
            row_re.push_back(rho(r, c).real());
            row_im.push_back(rho(r, c).imag());
        }
        re.push_back(row_re);
        im.push_back(row_im);
    }
    out["re"] = re;
    out["im"] = im;
    return out;
}

inline int cmd_prepare(const RunConfig& cfg, const std::string& state_flag) {
    Manifest manifest(cfg, "prepare");
    const std::string name =
        state_flag.empty() ? cfg.get<std::string>("/prepare/state", "") : state_flag;
    if (name.empty()) throw ConfigError("prepare: no state name given (flag --state or /prepare/state)");
    const NamedState st = make_named_state(name);

    const std::int64_t n_rep = cfg.get<std::int64_t>("/tomo/n_rep", 1000);
    const double snr = cfg.get<double>("/tomo/snr", 5.0);
    const std::int64_t confusion_shots = cfg.get<std::int64_t>("/tomo/confusion_shots", 1000);
    std::string mode = cfg.get<std::string>("/tomo/mode", "auto");

    const auto& dims = st.circuit.dims;
    std::int64_t n_settings = 1;
    for (std::size_t q = 0; q < dims.size(); ++q) {
        n_settings *= static_cast<std::int64_t>(projector_set(st.d).size());
    }
    if (mode == "auto") mode = (n_settings > 1000) ? "populations" : "full";
    if (mode != "full" && mode != "populations") {
        throw ConfigError("config: /tomo/mode must be auto, full or populations");
    }

    const auto models = default_readout_models(dims, snr, cfg.seed ^ 0xace1);
    ConfusionMatrix confusion;
    const bool ideal_readout = snr >= 1e6;
    std::vector<std::string> confusion_outputs;
    if (!ideal_readout) {
        confusion = estimate_confusion(models, dims, confusion_shots, cfg.seed + 17);
        auto os = open_output(cfg.out_dir, "confusion.csv");
        write_confusion_csv(confusion, os);
        confusion_outputs.push_back("confusion.csv");
    }

    json report;
    report["state"] = name;
    report["mode"] = mode;
    report["n_rep"] = n_rep;
    report["snr"] = snr;
    report["circuit_two_photon_count"] = st.circuit.count_kind(GateKind::TwoPhotonSwap);
    std::vector<std::string> outputs;

    // Ideal populations of the prepared state.
    json pops = json::array();
    for (std::int64_t i = 0; i < st.ideal.dim(); ++i) {
        if (st.ideal.population(i) > 1e-12) {
            pops.push_back({{"ditstring", ditstring_label(i, dims)},
                            {"population", st.ideal.population(i)}});
        }
    }
    report["ideal_populations"] = pops;

    if (mode == "full") {
        const auto ps = projector_set(st.d);
        auto record = simulate_tomography(st.ideal, ps, n_rep, confusion, cfg.seed + 23);
        {
            auto os = open_output(cfg.out_dir, "tomo_record.json");
            os << tomo_record_to_json(record).dump() << "\n";
            outputs.push_back("tomo_record.json");
        }
        const auto mle = mle_reconstruct(record, ps);
        const double raw = fidelity_to_pure(mle.rho, st.ideal.vec);
        double purified_fidelity = raw;
        try {
            purified_fidelity = fidelity_to_pure(mcweeny_purify(mle.rho), st.ideal.vec);
        } catch (const AmbiguousPurificationError&) {
            report["purification"] = "degenerate top eigenvalue; raw value reported";
        }
        report["raw_fidelity"] = raw;
        report["purified_fidelity"] = purified_fidelity;
        report["mle_iterations"] = mle.iterations;
        report["mle_converged"] = mle.converged;
        auto os = open_output(cfg.out_dir, "density_matrix.json");
        json jrho = density_to_json(mle.rho);
        jrho["dims"] = dims;
        os << jrho.dump(2) << "\n";
        outputs.push_back("density_matrix.json");
    } else {
        // Direct population measurement through the readout channel.
        const std::int64_t shots = std::max<std::int64_t>(n_rep, 1);
        auto counts = sample_and_classify(models, st.ideal, shots, confusion_shots);
        Eigen::VectorXd q(st.ideal.dim());
        for (std::int64_t x = 0; x < st.ideal.dim(); ++x) {
            q(x) = static_cast<double>(counts.counts[x]) / static_cast<double>(shots);
        }
        Eigen::VectorXd corrected =
            counts.confusion.p.transpose().fullPivLu().solve(q).eval();
        json measured = json::array();
        double diag_fidelity = 0.0;
        for (std::int64_t x = 0; x < st.ideal.dim(); ++x) {
            const double ideal_p = st.ideal.population(x);
            if (ideal_p > 1e-12 || corrected(x) > 5e-3) {
                measured.push_back({{"ditstring", ditstring_label(x, dims)},
                                    {"population", corrected(x)}});
            }
            diag_fidelity += std::sqrt(std::max(0.0, corrected(x)) * ideal_p);
        }
        report["measured_populations"] = measured;
        report["population_overlap"] = diag_fidelity * diag_fidelity;
    }

    auto os = open_output(cfg.out_dir, "prepare_report.json");
    os << report.dump(2) << "\n";
    outputs.push_back("prepare_report.json");
    for (const auto& extra : confusion_outputs) outputs.push_back(extra);
    std::cout << "prepare " << name << ": " << report.dump() << "\n";
    manifest.write(outputs);
    return 0;
}

inline int cmd_synth(const RunConfig& cfg) {
    Manifest manifest(cfg, "synth");
    const std::string task = cfg.get<std::string>("/synth/task", "ghz");
    const int n = cfg.get<int>("/synth/n", 3);
    const int d = cfg.get<int>("/synth/d", 3);
    SynthGateSet gateset;
    gateset.two_qudit_cost = cfg.get<std::int64_t>("/synth/two_qudit_cost", 100);
    gateset.single_qudit_cost = cfg.get<std::int64_t>("/synth/single_qudit_cost", 1);
    const std::size_t max_nodes = cfg.get<std::size_t>("/synth/max_nodes", 5000000);

    Circuit circuit;
    std::string label;
    if (task == "ghz") {
        circuit = ghz_circuit(n, d);
        label = "ghz(" + std::to_string(n) + "," + std::to_string(d) + ")";
        const int expected = (n - 1) * (d - 1);
        if (circuit.count_kind(GateKind::TwoPhotonSwap) != expected) {
            throw Error("synth: two-photon count violates the (n-1)(d-1) law");
        }
        const auto out =
            apply_circuit(circuit, QuantumState::basis(circuit.dims,
                                                       std::vector<int>(circuit.dims.size(), 0)));
        if (ghz_family_fidelity(out, d) < 1.0 - 1e-9) {
            throw Error("synth: simulated output does not reach the GHZ family");
        }
    } else if (task == "cat") {
        circuit = cat_circuit(n, d, gateset, max_nodes);
        label = "cat(" + std::to_string(n) + "," + std::to_string(d) + ")";
        const auto out =
            apply_circuit(circuit, QuantumState::basis(circuit.dims,
                                                       std::vector<int>(circuit.dims.size(), 0)));
        if (cat_family_fidelity(out, d) < 1.0 - 1e-9) {
            throw Error("synth: simulated output does not reach the cat family");
        }
    } else if (task == "kernel") {
        // Bell->GHZ kernel rediscovered by the state-graph search.
        const int site_dim = std::max(d, 3);
        const std::vector<int> dims{site_dim, site_dim, site_dim};
        SearchState start, target;
        start.dims = dims;
        target.dims = dims;
        for (int k = 0; k < d; ++k) {
            start.branches.push_back(
                {static_cast<std::int32_t>(ditstring_index({k, k, 0}, dims)), 0});
            target.branches.push_back(
                {static_cast<std::int32_t>(ditstring_index({k, k, k}, dims)), 0});
        }
        SynthGateSet kernel_set = gateset;
        kernel_set.active_sites = {1, 2};
        const auto result = dijkstra_synthesize(canonicalize(start), canonicalize(target),
                                                kernel_set, max_nodes, true);
        circuit = result.circuit;
        label = "kernel(d=" + std::to_string(d) + ")";
        std::cout << "synth kernel: cost " << result.cost << ", expanded " << result.expanded
                  << "\n";
    } else {
        throw ConfigError("config: /synth/task must be ghz, cat or kernel");
    }

    const int two = circuit.count_kind(GateKind::TwoPhotonSwap);
    const int single = static_cast<int>(circuit.ops.size()) - two;
    json summary;
    summary["task"] = label;
    summary["two_photon_count"] = two;
    summary["single_qudit_count"] = single;
    summary["cost"] = gateset.two_qudit_cost * two + gateset.single_qudit_cost * single;
    std::cout << "synth " << label << ": " << summary.dump() << "\n";

    auto os = open_output(cfg.out_dir, "circuit.json");
    os << circuit_to_json(circuit).dump(2) << "\n";
    auto os2 = open_output(cfg.out_dir, "synth_summary.json");
    os2 << summary.dump(2) << "\n";
    manifest.write({"circuit.json", "synth_summary.json"});
    return 0;
}

inline QuantumState load_density_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("qpd: cannot open density matrix file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("qpd: bad density matrix JSON: ") + e.what());
    }
    if (!j.contains("dims")) throw ConfigError("qpd: density matrix JSON lacks per-site dims");
    const auto dims = j.at("dims").get<std::vector<int>>();
    const auto n = total_dim(dims);
    MatrixXcd rho(n, n);
    for (std::int64_t r = 0; r < n; ++r) {
        for (std::int64_t c = 0; c < n; ++c) {
            rho(r, c) = Complex(j.at("re")[r][c].get<double>(), j.at("im")[r][c].get<double>());
        }
    }
    return QuantumState::density(dims, std::move(rho));
}

inline int cmd_qpd(const RunConfig& cfg, const std::string& state_flag,
                   const std::string& kind_flag, const std::string& load_path) {
    Manifest manifest(cfg, "qpd");
    const std::string kind =
        kind_flag.empty() ? cfg.get<std::string>("/qpd/kind", "husimi") : kind_flag;
    const int n_theta = cfg.get<int>("/qpd/n_theta", 64);
    const int n_phi = cfg.get<int>("/qpd/n_phi", 128);

    QuantumState state;
    if (!load_path.empty()) {
        state = load_density_json(load_path);
    } else {
        const std::string name =
            state_flag.empty() ? cfg.get<std::string>("/qpd/state", "") : state_flag;
        if (name.empty()) throw ConfigError("qpd: no state name or --load file given");
        state = make_named_state(name).ideal;
    }
    SphereGrid grid;
    if (kind == "husimi") {
        grid = husimi_q(state, n_theta, n_phi);
    } else if (kind == "wigner") {
        grid = wigner(state, n_theta, n_phi);
    } else {
        throw ConfigError("qpd: kind must be husimi or wigner");
    }
    const std::string filename = "qpd_" + kind + ".csv";
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    export_grid(grid, (cfg.out_dir / filename).string());
    std::cout << "qpd " << kind << ": " << grid.values.size() << " grid points\n";
    manifest.write({filename});
    return 0;
}

inline int cmd_xeb(const RunConfig& cfg) {
    Manifest manifest(cfg, "xeb");
    const std::string gate = cfg.get<std::string>("/xeb/gate", "ccz");
    MatrixXcd dressed;
    std::vector<int> dims;
    if (gate == "ccz") {
        const auto c = ccz_circuit();
        dressed = qubit_restriction(circuit_unitary(c), c.dims);
        dims = {2, 2, 2};
    } else if (gate == "cccz") {
        const auto c = cccz_circuit();
        dressed = qubit_restriction(circuit_unitary(c), c.dims);
        dims = {2, 2, 2, 2};
    } else {
        throw ConfigError("config: /xeb/gate must be ccz or cccz");
    }
    XebConfig xc;
    xc.depths = cfg.get<std::vector<int>>("/xeb/depths", {1, 2, 4, 8, 16});
    xc.circuits_per_depth = cfg.get<int>("/xeb/circuits_per_depth", 30);
    xc.depol_rate = cfg.get<double>("/xeb/depol_rate", 0.03);
    xc.shots = cfg.get<std::int64_t>("/xeb/shots", 100000);
    xc.seed = cfg.seed;
    xc.threads = cfg.threads;

    const auto run = simulate_xeb(dressed, dims, xc);
    auto os = open_output(cfg.out_dir, "xeb.csv");
    os << "depth,circuit,fidelity\n";
    for (std::size_t di = 0; di < run.depths.size(); ++di) {
        for (std::size_t ci = 0; ci < run.fidelities[di].size(); ++ci) {
            os << run.depths[di] << "," << ci << "," << fmt(run.fidelities[di][ci]) << "\n";
        }
    }
    const auto fit = fit_decay(run.depths, run.mean_fidelity);
    json jfit;
    jfit["amplitude"] = fit.amplitude;
    jfit["per_cycle_fidelity"] = fit.per_cycle;
    jfit["amplitude_err"] = fit.amplitude_err;
    jfit["per_cycle_err"] = fit.per_cycle_err;
    jfit["points_used"] = fit.points_used;
    jfit["points_dropped"] = fit.points_dropped;
    // Depolarizing-parameter conversion: r = 1 - f, and the average fidelity
    // of the channel over a D-dimensional space is 1 - r(D²-1)/D².
    const double dim_total = static_cast<double>(total_dim(dims));
    jfit["depolarizing_rate"] = 1.0 - fit.per_cycle;
    jfit["average_channel_fidelity"] =
        1.0 - (1.0 - fit.per_cycle) * (dim_total * dim_total - 1.0) / (dim_total * dim_total);
    auto os2 = open_output(cfg.out_dir, "xeb_fit.json");
    os2 << jfit.dump(2) << "\n";
    std::cout << "xeb " << gate << ": per-cycle fidelity " << fmt(fit.per_cycle) << " +/- "
              << fmt(fit.per_cycle_err) << "\n";
    manifest.write({"xeb.csv", "xeb_fit.json"});
    return 0;
}

inline int cmd_shotnoise(const RunConfig& cfg) {
    Manifest manifest(cfg, "shotnoise");
    const std::int64_t n_rep = cfg.get<std::int64_t>("/shotnoise/n_rep", 1000);
    const int trials = cfg.get<int>("/shotnoise/trials", 100);

    struct Row {
        std::string label;
        QuantumState state;
        int d;
    };
    std::vector<Row> rows;
    for (int d : {2, 3, 4}) {
        std::vector<int> dims{d, d};
        VectorXcd v = VectorXcd::Zero(total_dim(dims));
        for (int k = 0; k < d; ++k) {
            v(ditstring_index({k, k}, dims)) = 1.0 / std::sqrt(static_cast<double>(d));
        }
        rows.push_back({"bell" + std::to_string(d), QuantumState::pure(dims, v), d});
    }
    for (int n : {2, 3, 4}) {
        std::vector<int> dims(n, 2);
        VectorXcd v = VectorXcd::Zero(total_dim(dims));
        v(0) = 1.0 / std::sqrt(2.0);
        v(v.size() - 1) = 1.0 / std::sqrt(2.0);
        rows.push_back({"ghz" + std::to_string(n) + "q", QuantumState::pure(dims, v), 2});
    }

    auto os = open_output(cfg.out_dir, "shotnoise.csv");
    os << "label,n_rep,trials,mean,std\n";
    for (const auto& row : rows) {
        const auto stats =
            shot_noise_mc(row.state, projector_set(row.d), n_rep, trials, cfg.seed, cfg.threads);
        os << row.label << "," << n_rep << "," << trials << "," << fmt(stats.mean) << ","
           << fmt(stats.std_dev) << "\n";
        std::cout << "shotnoise " << row.label << ": mean " << fmt(stats.mean) << " std "
                  << fmt(stats.std_dev) << "\n";
    }
    manifest.write({"shotnoise.csv"});
    return 0;
}

// ---------------------------------------------------------------------------

inline int run(int argc, char** argv) {
    CLI::App app{"driven coupled-qudit chain simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string state_name;
    std::string qpd_kind;
    std::string qpd_load;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    std::optional<int> threads_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--out", out_override, "override the output directory");
        sub->add_option("--threads", threads_override, "cap worker threads");
    };

    auto* chevron = app.add_subcommand("chevron", "two-photon population map over (freq, duration)");
    add_common(chevron);
    auto* rates = app.add_subcommand("rates", "interaction rates vs drive amplitude");
    add_common(rates);
    auto* optfreq = app.add_subcommand("optfreq", "optimal drive frequencies vs amplitude");
    add_common(optfreq);
    auto* prepare = app.add_subcommand("prepare", "prepare a named state and run tomography");
    add_common(prepare);
    prepare->add_option("--state", state_name, "bell2|bell3|bell4|noon4|cat2|cat3|ghz(n,d)");
    auto* synth = app.add_subcommand("synth", "circuit synthesis (ghz, cat, kernel)");
    add_common(synth);
    auto* qpd = app.add_subcommand("qpd", "quasiprobability grid of a named state");
    add_common(qpd);
    qpd->add_option("--state", state_name, "named state");
    qpd->add_option("--kind", qpd_kind, "husimi|wigner");
    qpd->add_option("--load", qpd_load, "density matrix JSON (from prepare) instead of a name");
    auto* xeb = app.add_subcommand("xeb", "randomized-cycle cross-entropy benchmarking");
    add_common(xeb);
    auto* shotnoise = app.add_subcommand("shotnoise", "tomography shot-noise Monte Carlo table");
    add_common(shotnoise);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (out_override) cfg.out_dir = *out_override;
        if (threads_override) cfg.threads = *threads_override;

        if (chevron->parsed()) return cmd_chevron(cfg);
        if (rates->parsed()) return cmd_rates(cfg);
        if (optfreq->parsed()) return cmd_optfreq(cfg);
        if (prepare->parsed()) return cmd_prepare(cfg, state_name);
        if (synth->parsed()) return cmd_synth(cfg);
        if (qpd->parsed()) return cmd_qpd(cfg, state_name, qpd_kind, qpd_load);
        if (xeb->parsed()) return cmd_xeb(cfg);
        if (shotnoise->parsed()) return cmd_shotnoise(cfg);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const SearchExhaustedError& e) {
        std::cerr << "search exhausted: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace qladder::cli
